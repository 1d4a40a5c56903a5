#include "mixlab/kernels.hpp"

// Reference kernels. These define the project's numeric behavior; the SIMD
// variants must match them bit-for-bit.

namespace mixlab::kernels::detail {

void lerp_scalar(double* dst, const double* a, const double* b, double lam, size_t n) {
    const double comp = 1.0 - lam;
    for (size_t i = 0; i < n; ++i) {
        dst[i] = lam * a[i] + comp * b[i];
    }
}

void axpy_scalar(double* dst, double alpha, const double* x, size_t n) {
    for (size_t i = 0; i < n; ++i) {
        dst[i] += alpha * x[i];
    }
}

void scale_scalar(double* dst, double alpha, size_t n) {
    for (size_t i = 0; i < n; ++i) {
        dst[i] *= alpha;
    }
}

void matmul_accum_scalar(double* c, const double* a, const double* b,
                         size_t m, size_t k, size_t n) {
    // saxpy form: every c[i][j] accumulates in ascending-k order.
    for (size_t i = 0; i < m; ++i) {
        double* c_row = c + i * n;
        for (size_t kk = 0; kk < k; ++kk) {
            const double a_ik = a[i * k + kk];
            const double* b_row = b + kk * n;
            for (size_t j = 0; j < n; ++j) {
                c_row[j] += a_ik * b_row[j];
            }
        }
    }
}

void relu_scalar(double* dst, const double* x, size_t n) {
    for (size_t i = 0; i < n; ++i) {
        dst[i] = x[i] > 0.0 ? x[i] : 0.0;
    }
}

void relu_backward_scalar(double* dx, const double* pre, const double* dz, size_t n) {
    for (size_t i = 0; i < n; ++i) {
        dx[i] = pre[i] > 0.0 ? dz[i] : 0.0;
    }
}

void sgd_update_scalar(double* w, double* v, const double* g,
                       double lr, double momentum, double weight_decay, size_t n) {
    for (size_t i = 0; i < n; ++i) {
        v[i] = momentum * v[i] + (g[i] + weight_decay * w[i]);
        w[i] = w[i] - lr * v[i];
    }
}

extern const Ops kScalarOps;
const Ops kScalarOps = {
    lerp_scalar,   axpy_scalar,          scale_scalar,      matmul_accum_scalar,
    relu_scalar,   relu_backward_scalar, sgd_update_scalar,
};

}  // namespace mixlab::kernels::detail
