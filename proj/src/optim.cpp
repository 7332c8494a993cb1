#include "nsad/optim.hpp"

#include <cmath>

namespace nsad {

void Adam::step(const std::vector<Tensor*>& params, const std::vector<const Tensor*>& grads) {
    if (params.size() != grads.size())
        throw ShapeError("optimizer: parameter/gradient count mismatch");
    if (m_.empty()) {
        m_.reserve(params.size());
        v_.reserve(params.size());
        for (const Tensor* p : params) {
            m_.emplace_back(p->shape());
            v_.emplace_back(p->shape());
        }
    }
    if (m_.size() != params.size())
        throw ShapeError("optimizer: parameter count changed between steps");

    ++t_;
    const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
    const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));

    for (std::size_t p = 0; p < params.size(); ++p) {
        Tensor& w = *params[p];
        const Tensor& g = *grads[p];
        if (!w.same_shape(g) || !w.same_shape(m_[p]))
            throw ShapeError("optimizer: gradient shape mismatch for parameter " + std::to_string(p));
        if (!g.all_finite())
            throw NumericError("optimizer: non-finite gradient for parameter " + std::to_string(p));
        double* pw = w.data();
        double* pm = m_[p].data();
        double* pv = v_[p].data();
        const double* pg = g.data();
        const std::size_t n = w.size();
        for (std::size_t i = 0; i < n; ++i) {
            pm[i] = cfg_.beta1 * pm[i] + (1.0 - cfg_.beta1) * pg[i];
            pv[i] = cfg_.beta2 * pv[i] + (1.0 - cfg_.beta2) * pg[i] * pg[i];
            const double mhat = pm[i] / bc1;
            const double vhat = pv[i] / bc2;
            pw[i] -= cfg_.lr * mhat / (std::sqrt(vhat) + cfg_.eps);
        }
    }
}

} // namespace nsad
