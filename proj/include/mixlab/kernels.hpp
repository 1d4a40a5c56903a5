#pragma once

#include <cstddef>
#include <string>

namespace mixlab::kernels {

// Hot inner loops for the tensor and trainer code paths, in two equivalent
// implementations: a scalar reference and an AVX2 variant selected at
// runtime. Both perform the identical sequence of IEEE mul/add per element
// (no FMA, no reduction reordering), so their outputs are bit-identical;
// the equivalence tests assert exact equality, and results never depend on
// which backend ran.

enum class Backend { kScalar, kAvx2 };

struct Ops {
    // dst[i] = lam * a[i] + (1 - lam) * b[i]
    void (*lerp)(double* dst, const double* a, const double* b, double lam, size_t n);
    // dst[i] += alpha * x[i]
    void (*axpy)(double* dst, double alpha, const double* x, size_t n);
    // dst[i] *= alpha
    void (*scale)(double* dst, double alpha, size_t n);
    // c += a(m x k) * b(k x n), row-major, accumulation strictly in k order.
    void (*matmul_accum)(double* c, const double* a, const double* b,
                         size_t m, size_t k, size_t n);
    // dst[i] = max(x[i], 0)
    void (*relu)(double* dst, const double* x, size_t n);
    // dx[i] = pre[i] > 0 ? dz[i] : 0
    void (*relu_backward)(double* dx, const double* pre, const double* dz, size_t n);
    // v = momentum * v + (g + weight_decay * w); w -= lr * v
    void (*sgd_update)(double* w, double* v, const double* g,
                       double lr, double momentum, double weight_decay, size_t n);
};

const Ops& table(Backend backend);

// Backend chosen at startup: AVX2 when the CPU supports it, unless the
// MIXLAB_KERNELS env var ("scalar" | "avx2") or set_backend() overrides.
const Ops& active();
Backend active_backend();
void set_backend(Backend backend);

bool avx2_supported();
std::string backend_name(Backend backend);

}  // namespace mixlab::kernels
