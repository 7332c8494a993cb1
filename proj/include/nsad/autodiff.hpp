#pragma once

#include <cstdint>
#include <vector>

#include "nsad/tensor.hpp"

namespace nsad::ad {

class Tape;

// Lightweight handle to a tape node.
struct Value {
    Tape* tape = nullptr;
    int idx = -1;

    bool valid() const { return tape != nullptr && idx >= 0; }
    const Tensor& tensor() const;
    double scalar() const;
};

enum class Op : std::uint8_t {
    Leaf,
    Add,
    Sub,
    Mul,
    Div,
    MatMul,
    Sin,
    Cos,
    Exp,
    Tanh,
    Sqrt,
    Relu,
    Scale,        // x * c0
    Shift,        // x + c0
    SumAll,       // -> 1x1
    RowSum,       // BxN -> Bx1
    RowMax,       // BxN -> Bx1, ties resolve to the first maximum
    BroadcastRow, // 1xN -> i0 x N
    BroadcastCol, // Bx1 -> B x i0
    SliceCols,    // columns [i0, i0+i1)
    TimeDiff,     // per-channel adjacent differences, aux (i0=channels, i1=length)
    Reshape,
};

// Record of primitive ops in topological order: parents always precede their
// children, so one reverse sweep visits every node exactly once.
class Tape {
public:
    // constant leaf: gradients do not flow into it
    Value input(Tensor t);
    // differentiable leaf (network parameter); the tensor is copied in
    Value param(const Tensor& t);
    Value constant(double v) { return input(Tensor::scalar(v)); }

    Value add(Value a, Value b);
    Value sub(Value a, Value b);
    Value mul(Value a, Value b);
    Value div(Value a, Value b);
    Value matmul(Value a, Value b);
    Value sin(Value a);
    Value cos(Value a);
    Value exp(Value a);
    Value tanh(Value a);
    Value sqrt(Value a);
    Value relu(Value a);
    Value scale(Value a, double c);
    Value shift(Value a, double c);
    Value sum_all(Value a);
    Value row_sum(Value a);
    Value row_max(Value a);
    Value broadcast_row(Value a, std::size_t rows);
    Value broadcast_col(Value a, std::size_t cols);
    Value slice_cols(Value a, std::size_t start, std::size_t len);
    Value time_diff(Value a, std::size_t channels, std::size_t length);
    Value reshape(Value a, std::vector<std::size_t> shape);

    // derived helpers built from primitives
    Value mean_all(Value a);
    Value clamp01(Value a); // relu(a) - relu(a - 1)

    const Tensor& value(Value v) const;
    std::size_t size() const { return nodes_.size(); }
    bool empty() const { return nodes_.empty(); }

    // Reverse sweep from a scalar loss. Gradients accumulate once per node;
    // query afterwards with grad().
    void backward(Value loss);
    const Tensor& grad(Value v) const;

private:
    struct Node {
        Op op = Op::Leaf;
        int a = -1;
        int b = -1;
        Tensor value;
        double c0 = 0.0;
        std::size_t i0 = 0;
        std::size_t i1 = 0;
        bool needs_grad = false;
    };

    Value push(Node n);
    Value unary(Op op, Value a, double c0 = 0.0);
    Value binary(Op op, Value a, Value b);
    void check_same_tape(Value v) const;
    Tensor& grad_slot(int idx);

    std::vector<Node> nodes_;
    std::vector<Tensor> grads_;
    bool has_grads_ = false;
};

} // namespace nsad::ad
