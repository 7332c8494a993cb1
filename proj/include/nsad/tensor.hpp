#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include "nsad/errors.hpp"

namespace nsad {

// Dense row-major tensor of doubles. Rank 1 and 2 cover everything in this
// project; the shape vector stays general so checkpoints can carry any rank.
class Tensor {
public:
    Tensor() = default;

    explicit Tensor(std::vector<std::size_t> shape, double fill = 0.0);

    static Tensor scalar(double v);
    static Tensor from(std::vector<std::size_t> shape, std::vector<double> values);

    const std::vector<std::size_t>& shape() const { return shape_; }
    std::size_t rank() const { return shape_.size(); }
    std::size_t size() const { return data_.size(); }

    // rank-2 accessors; rank-1 tensors behave as 1 x N rows
    std::size_t rows() const;
    std::size_t cols() const;

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols() + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols() + j]; }
    double& operator[](std::size_t i) { return data_[i]; }
    double operator[](std::size_t i) const { return data_[i]; }

    std::span<double> values() { return data_; }
    std::span<const double> values() const { return data_; }
    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }

    bool same_shape(const Tensor& other) const { return shape_ == other.shape_; }
    bool all_finite() const;

    std::string shape_str() const;

private:
    std::vector<std::size_t> shape_;
    std::vector<double> data_;
};

// ---- kernels ------------------------------------------------------------
// out = a (m x k) * b (k x n); bt/at variants take the transposed operand,
// used by backward passes. All loops are cache-friendly ikj order.

Tensor matmul(const Tensor& a, const Tensor& b);
Tensor matmul_nt(const Tensor& a, const Tensor& b); // a (m x k) * b^T, b is (n x k)
Tensor matmul_tn(const Tensor& a, const Tensor& b); // a^T * b, a is (k x m)

void check_finite(const Tensor& t, const char* where);

} // namespace nsad
