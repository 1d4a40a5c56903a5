#include "mixlab/tensor.hpp"

#include <cmath>
#include <sstream>

#include "mixlab/kernels.hpp"

namespace mixlab {

size_t shape_product(const std::vector<size_t>& shape) {
    size_t p = 1;
    for (size_t e : shape) p *= e;
    return p;
}

Tensor::Tensor(std::vector<size_t> shape)
    : shape_(std::move(shape)), data_(shape_product(shape_), 0.0) {
    for (size_t e : shape_) {
        if (e == 0) throw ShapeError("tensor extents must be positive");
    }
}

Tensor::Tensor(std::vector<size_t> shape, std::vector<double> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
    if (shape_product(shape_) != data_.size()) {
        throw ShapeError("tensor data length " + std::to_string(data_.size()) +
                         " does not match shape " + shape_str());
    }
}

Tensor Tensor::zeros(std::vector<size_t> shape) { return Tensor(std::move(shape)); }

size_t Tensor::extent(size_t axis) const {
    if (axis >= shape_.size()) throw ShapeError("axis out of range");
    return shape_[axis];
}

double* Tensor::row(size_t r) {
    if (rank() != 2) throw ShapeError("row() requires a rank-2 tensor");
    return data_.data() + r * shape_[1];
}

const double* Tensor::row(size_t r) const {
    if (rank() != 2) throw ShapeError("row() requires a rank-2 tensor");
    return data_.data() + r * shape_[1];
}

bool Tensor::all_finite() const {
    for (double v : data_) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

void Tensor::require_finite(const std::string& context) const {
    if (!all_finite()) throw ValidationError(context + ": tensor contains non-finite values");
}

std::string Tensor::shape_str() const {
    std::ostringstream os;
    os << "[";
    for (size_t i = 0; i < shape_.size(); ++i) {
        if (i) os << ", ";
        os << shape_[i];
    }
    os << "]";
    return os.str();
}

Tensor tensor_lerp(const Tensor& a, const Tensor& b, double lam) {
    if (!a.same_shape(b)) {
        throw ShapeError("tensor_lerp: shape mismatch " + a.shape_str() + " vs " +
                         b.shape_str());
    }
    Tensor out(a.shape());
    kernels::active().lerp(out.data(), a.data(), b.data(), lam, a.size());
    return out;
}

Tensor matmul(const Tensor& a, const Tensor& b) {
    if (a.rank() != 2 || b.rank() != 2 || a.extent(1) != b.extent(0)) {
        throw ShapeError("matmul: incompatible shapes " + a.shape_str() + " x " +
                         b.shape_str());
    }
    const size_t m = a.extent(0), k = a.extent(1), n = b.extent(1);
    Tensor c({m, n});
    kernels::active().matmul_accum(c.data(), a.data(), b.data(), m, k, n);
    return c;
}

Tensor transpose(const Tensor& a) {
    if (a.rank() != 2) throw ShapeError("transpose requires a rank-2 tensor");
    const size_t m = a.extent(0), n = a.extent(1);
    Tensor t({n, m});
    for (size_t i = 0; i < m; ++i) {
        for (size_t j = 0; j < n; ++j) {
            t.at(j * m + i) = a.at(i * n + j);
        }
    }
    return t;
}

Tensor softmax_rows(const Tensor& logits) {
    if (logits.rank() != 2) throw ShapeError("softmax_rows requires a rank-2 tensor");
    const size_t rows = logits.extent(0), cols = logits.extent(1);
    Tensor p({rows, cols});
    for (size_t i = 0; i < rows; ++i) {
        const double* z = logits.row(i);
        double zmax = z[0];
        for (size_t j = 1; j < cols; ++j) {
            if (z[j] > zmax) zmax = z[j];
        }
        double sum = 0.0;
        double* out = p.row(i);
        for (size_t j = 0; j < cols; ++j) {
            out[j] = std::exp(z[j] - zmax);
            sum += out[j];
        }
        for (size_t j = 0; j < cols; ++j) out[j] /= sum;
    }
    return p;
}

std::vector<size_t> argmax_rows(const Tensor& t) {
    if (t.rank() != 2) throw ShapeError("argmax_rows requires a rank-2 tensor");
    const size_t rows = t.extent(0), cols = t.extent(1);
    std::vector<size_t> out(rows);
    for (size_t i = 0; i < rows; ++i) {
        const double* r = t.row(i);
        size_t best = 0;
        for (size_t j = 1; j < cols; ++j) {
            if (r[j] > r[best]) best = j;  // strict: ties keep the lowest index
        }
        out[i] = best;
    }
    return out;
}

}  // namespace mixlab
