#include "nsad/autodiff.hpp"

#include <cmath>

namespace nsad::ad {

const Tensor& Value::tensor() const {
    if (!valid()) throw ShapeError("use of an unbound Value");
    return tape->value(*this);
}

double Value::scalar() const {
    const Tensor& t = tensor();
    if (t.size() != 1) throw ShapeError("scalar() on tensor of shape " + t.shape_str());
    return t[0];
}

Value Tape::push(Node n) {
    nodes_.push_back(std::move(n));
    has_grads_ = false;
    return Value{this, static_cast<int>(nodes_.size()) - 1};
}

void Tape::check_same_tape(Value v) const {
    if (v.tape != this) throw ShapeError("Value belongs to a different tape");
    if (v.idx < 0 || v.idx >= static_cast<int>(nodes_.size()))
        throw ShapeError("Value index out of range");
}

Value Tape::input(Tensor t) {
    Node n;
    n.op = Op::Leaf;
    n.value = std::move(t);
    n.needs_grad = false;
    return push(std::move(n));
}

Value Tape::param(const Tensor& t) {
    Node n;
    n.op = Op::Leaf;
    n.value = t;
    n.needs_grad = true;
    return push(std::move(n));
}

Value Tape::unary(Op op, Value a, double c0) {
    check_same_tape(a);
    Node n;
    n.op = op;
    n.a = a.idx;
    n.c0 = c0;
    n.needs_grad = nodes_[a.idx].needs_grad;
    const Tensor& x = nodes_[a.idx].value;
    switch (op) {
    case Op::Sin: {
        n.value = x;
        for (double& v : n.value.values()) v = std::sin(v);
        break;
    }
    case Op::Cos: {
        n.value = x;
        for (double& v : n.value.values()) v = std::cos(v);
        break;
    }
    case Op::Exp: {
        n.value = x;
        for (double& v : n.value.values()) v = std::exp(v);
        check_finite(n.value, "exp");
        break;
    }
    case Op::Tanh: {
        n.value = x;
        for (double& v : n.value.values()) v = std::tanh(v);
        break;
    }
    case Op::Sqrt: {
        n.value = x;
        for (double& v : n.value.values()) v = std::sqrt(v);
        check_finite(n.value, "sqrt");
        break;
    }
    case Op::Relu: {
        n.value = x;
        for (double& v : n.value.values()) v = v > 0.0 ? v : 0.0;
        break;
    }
    case Op::Scale: {
        n.value = x;
        for (double& v : n.value.values()) v *= c0;
        break;
    }
    case Op::Shift: {
        n.value = x;
        for (double& v : n.value.values()) v += c0;
        break;
    }
    case Op::SumAll: {
        double acc = 0.0;
        for (double v : x.values()) acc += v;
        n.value = Tensor::scalar(acc);
        break;
    }
    case Op::RowSum: {
        const std::size_t r = x.rows(), c = x.cols();
        n.value = Tensor({r, 1});
        for (std::size_t i = 0; i < r; ++i) {
            double acc = 0.0;
            const double* row = x.data() + i * c;
            for (std::size_t j = 0; j < c; ++j) acc += row[j];
            n.value[i] = acc;
        }
        break;
    }
    case Op::RowMax: {
        const std::size_t r = x.rows(), c = x.cols();
        n.value = Tensor({r, 1});
        for (std::size_t i = 0; i < r; ++i) {
            const double* row = x.data() + i * c;
            double best = row[0];
            for (std::size_t j = 1; j < c; ++j)
                if (row[j] > best) best = row[j];
            n.value[i] = best;
        }
        break;
    }
    default:
        throw ShapeError("unary() on non-unary op");
    }
    return push(std::move(n));
}

Value Tape::binary(Op op, Value a, Value b) {
    check_same_tape(a);
    check_same_tape(b);
    Node n;
    n.op = op;
    n.a = a.idx;
    n.b = b.idx;
    n.needs_grad = nodes_[a.idx].needs_grad || nodes_[b.idx].needs_grad;
    const Tensor& x = nodes_[a.idx].value;
    const Tensor& y = nodes_[b.idx].value;
    if (op == Op::MatMul) {
        n.value = nsad::matmul(x, y);
        check_finite(n.value, "matmul");
    } else {
        if (!x.same_shape(y))
            throw ShapeError("elementwise shape mismatch: " + x.shape_str() + " vs " + y.shape_str());
        n.value = x;
        double* o = n.value.data();
        const double* py = y.data();
        const std::size_t sz = x.size();
        switch (op) {
        case Op::Add:
            for (std::size_t i = 0; i < sz; ++i) o[i] += py[i];
            break;
        case Op::Sub:
            for (std::size_t i = 0; i < sz; ++i) o[i] -= py[i];
            break;
        case Op::Mul:
            for (std::size_t i = 0; i < sz; ++i) o[i] *= py[i];
            break;
        case Op::Div:
            for (std::size_t i = 0; i < sz; ++i) o[i] /= py[i];
            check_finite(n.value, "div");
            break;
        default:
            throw ShapeError("binary() on non-binary op");
        }
    }
    return push(std::move(n));
}

Value Tape::add(Value a, Value b) { return binary(Op::Add, a, b); }
Value Tape::sub(Value a, Value b) { return binary(Op::Sub, a, b); }
Value Tape::mul(Value a, Value b) { return binary(Op::Mul, a, b); }
Value Tape::div(Value a, Value b) { return binary(Op::Div, a, b); }
Value Tape::matmul(Value a, Value b) { return binary(Op::MatMul, a, b); }
Value Tape::sin(Value a) { return unary(Op::Sin, a); }
Value Tape::cos(Value a) { return unary(Op::Cos, a); }
Value Tape::exp(Value a) { return unary(Op::Exp, a); }
Value Tape::tanh(Value a) { return unary(Op::Tanh, a); }
Value Tape::sqrt(Value a) { return unary(Op::Sqrt, a); }
Value Tape::relu(Value a) { return unary(Op::Relu, a); }
Value Tape::scale(Value a, double c) { return unary(Op::Scale, a, c); }
Value Tape::shift(Value a, double c) { return unary(Op::Shift, a, c); }
Value Tape::sum_all(Value a) { return unary(Op::SumAll, a); }
Value Tape::row_sum(Value a) { return unary(Op::RowSum, a); }
Value Tape::row_max(Value a) { return unary(Op::RowMax, a); }

Value Tape::broadcast_row(Value a, std::size_t rows) {
    check_same_tape(a);
    const Tensor& x = nodes_[a.idx].value;
    if (x.rows() != 1)
        throw ShapeError("broadcast_row needs a 1xN tensor, got " + x.shape_str());
    Node n;
    n.op = Op::BroadcastRow;
    n.a = a.idx;
    n.i0 = rows;
    n.needs_grad = nodes_[a.idx].needs_grad;
    const std::size_t c = x.cols();
    n.value = Tensor({rows, c});
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < c; ++j) n.value(i, j) = x[j];
    return push(std::move(n));
}

Value Tape::broadcast_col(Value a, std::size_t cols) {
    check_same_tape(a);
    const Tensor& x = nodes_[a.idx].value;
    if (x.cols() != 1)
        throw ShapeError("broadcast_col needs a Bx1 tensor, got " + x.shape_str());
    Node n;
    n.op = Op::BroadcastCol;
    n.a = a.idx;
    n.i0 = cols;
    n.needs_grad = nodes_[a.idx].needs_grad;
    const std::size_t r = x.rows();
    n.value = Tensor({r, cols});
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < cols; ++j) n.value(i, j) = x[i];
    return push(std::move(n));
}

Value Tape::slice_cols(Value a, std::size_t start, std::size_t len) {
    check_same_tape(a);
    const Tensor& x = nodes_[a.idx].value;
    const std::size_t r = x.rows(), c = x.cols();
    if (len == 0 || start + len > c)
        throw ShapeError("slice_cols out of range");
    Node n;
    n.op = Op::SliceCols;
    n.a = a.idx;
    n.i0 = start;
    n.i1 = len;
    n.needs_grad = nodes_[a.idx].needs_grad;
    n.value = Tensor({r, len});
    for (std::size_t i = 0; i < r; ++i) {
        const double* row = x.data() + i * c + start;
        double* orow = n.value.data() + i * len;
        for (std::size_t j = 0; j < len; ++j) orow[j] = row[j];
    }
    return push(std::move(n));
}

Value Tape::time_diff(Value a, std::size_t channels, std::size_t length) {
    check_same_tape(a);
    const Tensor& x = nodes_[a.idx].value;
    if (length < 2) throw ShapeError("time_diff needs length >= 2");
    if (x.cols() != channels * length)
        throw ShapeError("time_diff: cols != channels*length");
    Node n;
    n.op = Op::TimeDiff;
    n.a = a.idx;
    n.i0 = channels;
    n.i1 = length;
    n.needs_grad = nodes_[a.idx].needs_grad;
    const std::size_t r = x.rows(), lo = length - 1;
    n.value = Tensor({r, channels * lo});
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t ch = 0; ch < channels; ++ch) {
            const double* src = x.data() + i * x.cols() + ch * length;
            double* dst = n.value.data() + i * channels * lo + ch * lo;
            for (std::size_t t = 0; t < lo; ++t) dst[t] = src[t + 1] - src[t];
        }
    return push(std::move(n));
}

Value Tape::reshape(Value a, std::vector<std::size_t> shape) {
    check_same_tape(a);
    const Tensor& x = nodes_[a.idx].value;
    std::size_t n_elems = 1;
    for (std::size_t d : shape) n_elems *= d;
    if (n_elems != x.size()) throw ShapeError("reshape changes element count");
    Node n;
    n.op = Op::Reshape;
    n.a = a.idx;
    n.needs_grad = nodes_[a.idx].needs_grad;
    n.value = Tensor::from(std::move(shape), std::vector<double>(x.values().begin(), x.values().end()));
    return push(std::move(n));
}

Value Tape::mean_all(Value a) {
    const std::size_t n = value(a).size();
    return scale(sum_all(a), 1.0 / static_cast<double>(n));
}

Value Tape::clamp01(Value a) { return sub(relu(a), relu(shift(a, -1.0))); }

const Tensor& Tape::value(Value v) const {
    check_same_tape(v);
    return nodes_[v.idx].value;
}

Tensor& Tape::grad_slot(int idx) {
    Tensor& g = grads_[idx];
    if (g.size() == 0) g = Tensor(nodes_[idx].value.shape());
    return g;
}

void Tape::backward(Value loss) {
    if (nodes_.empty()) throw ShapeError("backward on empty tape");
    check_same_tape(loss);
    const Tensor& lt = nodes_[loss.idx].value;
    if (lt.size() != 1)
        throw ShapeError("backward seed must be scalar, got " + lt.shape_str());

    grads_.assign(nodes_.size(), Tensor{});
    has_grads_ = true;
    grad_slot(loss.idx)[0] = 1.0;

    for (int i = loss.idx; i >= 0; --i) {
        const Node& n = nodes_[i];
        if (!n.needs_grad || grads_[i].size() == 0) continue;
        const Tensor& g = grads_[i];
        switch (n.op) {
        case Op::Leaf:
            break;
        case Op::Add: {
            if (nodes_[n.a].needs_grad) {
                Tensor& ga = grad_slot(n.a);
                for (std::size_t k = 0; k < g.size(); ++k) ga[k] += g[k];
            }
            if (nodes_[n.b].needs_grad) {
                Tensor& gb = grad_slot(n.b);
                for (std::size_t k = 0; k < g.size(); ++k) gb[k] += g[k];
            }
            break;
        }
        case Op::Sub: {
            if (nodes_[n.a].needs_grad) {
                Tensor& ga = grad_slot(n.a);
                for (std::size_t k = 0; k < g.size(); ++k) ga[k] += g[k];
            }
            if (nodes_[n.b].needs_grad) {
                Tensor& gb = grad_slot(n.b);
                for (std::size_t k = 0; k < g.size(); ++k) gb[k] -= g[k];
            }
            break;
        }
        case Op::Mul: {
            const Tensor& x = nodes_[n.a].value;
            const Tensor& y = nodes_[n.b].value;
            if (nodes_[n.a].needs_grad) {
                Tensor& ga = grad_slot(n.a);
                for (std::size_t k = 0; k < g.size(); ++k) ga[k] += g[k] * y[k];
            }
            if (nodes_[n.b].needs_grad) {
                Tensor& gb = grad_slot(n.b);
                for (std::size_t k = 0; k < g.size(); ++k) gb[k] += g[k] * x[k];
            }
            break;
        }
        case Op::Div: {
            const Tensor& y = nodes_[n.b].value;
            const Tensor& z = n.value;
            if (nodes_[n.a].needs_grad) {
                Tensor& ga = grad_slot(n.a);
                for (std::size_t k = 0; k < g.size(); ++k) ga[k] += g[k] / y[k];
            }
            if (nodes_[n.b].needs_grad) {
                Tensor& gb = grad_slot(n.b);
                for (std::size_t k = 0; k < g.size(); ++k) gb[k] -= g[k] * z[k] / y[k];
            }
            break;
        }
        case Op::MatMul: {
            const Tensor& x = nodes_[n.a].value;
            const Tensor& y = nodes_[n.b].value;
            if (nodes_[n.a].needs_grad) {
                Tensor da = matmul_nt(g, y);
                Tensor& ga = grad_slot(n.a);
                for (std::size_t k = 0; k < da.size(); ++k) ga[k] += da[k];
            }
            if (nodes_[n.b].needs_grad) {
                Tensor db = matmul_tn(x, g);
                Tensor& gb = grad_slot(n.b);
                for (std::size_t k = 0; k < db.size(); ++k) gb[k] += db[k];
            }
            break;
        }
        case Op::Sin: {
            const Tensor& x = nodes_[n.a].value;
            Tensor& ga = grad_slot(n.a);
            for (std::size_t k = 0; k < g.size(); ++k) ga[k] += g[k] * std::cos(x[k]);
            break;
        }
        case Op::Cos: {
            const Tensor& x = nodes_[n.a].value;
            Tensor& ga = grad_slot(n.a);
            for (std::size_t k = 0; k < g.size(); ++k) ga[k] -= g[k] * std::sin(x[k]);
            break;
        }
        case Op::Exp: {
            Tensor& ga = grad_slot(n.a);
            for (std::size_t k = 0; k < g.size(); ++k) ga[k] += g[k] * n.value[k];
            break;
        }
        case Op::Tanh: {
            Tensor& ga = grad_slot(n.a);
            for (std::size_t k = 0; k < g.size(); ++k)
                ga[k] += g[k] * (1.0 - n.value[k] * n.value[k]);
            break;
        }
        case Op::Sqrt: {
            Tensor& ga = grad_slot(n.a);
            for (std::size_t k = 0; k < g.size(); ++k) ga[k] += g[k] * 0.5 / n.value[k];
            break;
        }
        case Op::Relu: {
            const Tensor& x = nodes_[n.a].value;
            Tensor& ga = grad_slot(n.a);
            for (std::size_t k = 0; k < g.size(); ++k)
                if (x[k] > 0.0) ga[k] += g[k];
            break;
        }
        case Op::Scale: {
            Tensor& ga = grad_slot(n.a);
            for (std::size_t k = 0; k < g.size(); ++k) ga[k] += g[k] * n.c0;
            break;
        }
        case Op::Shift: {
            Tensor& ga = grad_slot(n.a);
            for (std::size_t k = 0; k < g.size(); ++k) ga[k] += g[k];
            break;
        }
        case Op::SumAll: {
            Tensor& ga = grad_slot(n.a);
            const double gv = g[0];
            for (std::size_t k = 0; k < ga.size(); ++k) ga[k] += gv;
            break;
        }
        case Op::RowSum: {
            const Tensor& x = nodes_[n.a].value;
            Tensor& ga = grad_slot(n.a);
            const std::size_t r = x.rows(), c = x.cols();
            for (std::size_t i = 0; i < r; ++i) {
                const double gv = g[i];
                double* garow = ga.data() + i * c;
                for (std::size_t j = 0; j < c; ++j) garow[j] += gv;
            }
            break;
        }
        case Op::RowMax: {
            const Tensor& x = nodes_[n.a].value;
            Tensor& ga = grad_slot(n.a);
            const std::size_t r = x.rows(), c = x.cols();
            for (std::size_t i = 0; i < r; ++i) {
                const double* row = x.data() + i * c;
                std::size_t best = 0;
                for (std::size_t j = 1; j < c; ++j)
                    if (row[j] > row[best]) best = j;
                ga(i, best) += g[i];
            }
            break;
        }
        case Op::BroadcastRow: {
            Tensor& ga = grad_slot(n.a);
            const std::size_t r = n.value.rows(), c = n.value.cols();
            for (std::size_t i = 0; i < r; ++i) {
                const double* grow = g.data() + i * c;
                for (std::size_t j = 0; j < c; ++j) ga[j] += grow[j];
            }
            break;
        }
        case Op::BroadcastCol: {
            Tensor& ga = grad_slot(n.a);
            const std::size_t r = n.value.rows(), c = n.value.cols();
            for (std::size_t i = 0; i < r; ++i) {
                const double* grow = g.data() + i * c;
                double acc = 0.0;
                for (std::size_t j = 0; j < c; ++j) acc += grow[j];
                ga[i] += acc;
            }
            break;
        }
        case Op::SliceCols: {
            const Tensor& x = nodes_[n.a].value;
            Tensor& ga = grad_slot(n.a);
            const std::size_t r = x.rows(), c = x.cols(), len = n.i1;
            for (std::size_t i = 0; i < r; ++i) {
                const double* grow = g.data() + i * len;
                double* garow = ga.data() + i * c + n.i0;
                for (std::size_t j = 0; j < len; ++j) garow[j] += grow[j];
            }
            break;
        }
        case Op::TimeDiff: {
            const Tensor& x = nodes_[n.a].value;
            Tensor& ga = grad_slot(n.a);
            const std::size_t r = x.rows(), L = n.i1, lo = L - 1, C = n.i0;
            for (std::size_t i = 0; i < r; ++i)
                for (std::size_t ch = 0; ch < C; ++ch) {
                    const double* grow = g.data() + i * C * lo + ch * lo;
                    double* garow = ga.data() + i * x.cols() + ch * L;
                    for (std::size_t t = 0; t < lo; ++t) {
                        garow[t + 1] += grow[t];
                        garow[t] -= grow[t];
                    }
                }
            break;
        }
        case Op::Reshape: {
            Tensor& ga = grad_slot(n.a);
            for (std::size_t k = 0; k < g.size(); ++k) ga[k] += g[k];
            break;
        }
        }
    }
}

const Tensor& Tape::grad(Value v) const {
    check_same_tape(v);
    if (!has_grads_) throw ShapeError("grad() before backward()");
    Tensor& g = const_cast<Tape*>(this)->grads_[v.idx];
    // nodes no gradient flowed into report zeros of their own shape
    if (g.size() == 0) g = Tensor(nodes_[v.idx].value.shape());
    return g;
}

} // namespace nsad::ad
