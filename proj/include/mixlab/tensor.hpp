#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "mixlab/errors.hpp"

namespace mixlab {

// Dense row-major tensor of 64-bit floats. Just enough arithmetic for this
// repo: elementwise ops routed through the runtime-dispatched kernels, a
// matmul, transpose, and row helpers. No broadcasting, no autodiff.
class Tensor {
public:
    Tensor() = default;
    explicit Tensor(std::vector<size_t> shape);
    Tensor(std::vector<size_t> shape, std::vector<double> data);

    static Tensor zeros(std::vector<size_t> shape);

    const std::vector<size_t>& shape() const { return shape_; }
    size_t rank() const { return shape_.size(); }
    size_t size() const { return data_.size(); }
    size_t extent(size_t axis) const;

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }
    std::vector<double>& values() { return data_; }
    const std::vector<double>& values() const { return data_; }

    double& at(size_t i) { return data_[i]; }
    double at(size_t i) const { return data_[i]; }

    // Row view helpers for rank-2 tensors.
    double* row(size_t r);
    const double* row(size_t r) const;

    bool same_shape(const Tensor& other) const { return shape_ == other.shape_; }
    bool all_finite() const;
    void require_finite(const std::string& context) const;

    std::string shape_str() const;

private:
    std::vector<size_t> shape_;
    std::vector<double> data_;
};

// Elementwise lam * a + (1 - lam) * b. Shapes must match.
Tensor tensor_lerp(const Tensor& a, const Tensor& b, double lam);

// c = a(m x k) * b(k x n).
Tensor matmul(const Tensor& a, const Tensor& b);

// Rank-2 transpose.
Tensor transpose(const Tensor& a);

// Row-wise softmax of a rank-2 tensor (max-subtracted, numerically stable).
Tensor softmax_rows(const Tensor& logits);

// Row-wise argmax; ties broken by lowest index.
std::vector<size_t> argmax_rows(const Tensor& t);

size_t shape_product(const std::vector<size_t>& shape);

}  // namespace mixlab
