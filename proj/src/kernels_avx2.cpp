// AVX2 kernels. This TU is compiled with -mavx2 and only ever entered after a
// runtime cpuid check. Every loop body is the scalar body widened to 4 lanes
// with separate mul and add (no fmadd): one rounding per operation, in the
// same order as the reference, so results are bit-identical to scalar.

#include "mixlab/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)
#define MIXLAB_HAVE_AVX2_TU 1
#include <immintrin.h>
#else
#define MIXLAB_HAVE_AVX2_TU 0
#endif

namespace mixlab::kernels::detail {

#if MIXLAB_HAVE_AVX2_TU

namespace {

void lerp_avx2(double* dst, const double* a, const double* b, double lam, size_t n) {
    const double comp = 1.0 - lam;
    const __m256d vlam = _mm256_set1_pd(lam);
    const __m256d vcomp = _mm256_set1_pd(comp);
    size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d va = _mm256_loadu_pd(a + i);
        __m256d vb = _mm256_loadu_pd(b + i);
        __m256d r = _mm256_add_pd(_mm256_mul_pd(vlam, va), _mm256_mul_pd(vcomp, vb));
        _mm256_storeu_pd(dst + i, r);
    }
    for (; i < n; ++i) {
        dst[i] = lam * a[i] + comp * b[i];
    }
}

void axpy_avx2(double* dst, double alpha, const double* x, size_t n) {
    const __m256d va = _mm256_set1_pd(alpha);
    size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d vd = _mm256_loadu_pd(dst + i);
        __m256d vx = _mm256_loadu_pd(x + i);
        _mm256_storeu_pd(dst + i, _mm256_add_pd(vd, _mm256_mul_pd(va, vx)));
    }
    for (; i < n; ++i) {
        dst[i] += alpha * x[i];
    }
}

void scale_avx2(double* dst, double alpha, size_t n) {
    const __m256d va = _mm256_set1_pd(alpha);
    size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d vd = _mm256_loadu_pd(dst + i);
        _mm256_storeu_pd(dst + i, _mm256_mul_pd(vd, va));
    }
    for (; i < n; ++i) {
        dst[i] *= alpha;
    }
}

void matmul_accum_avx2(double* c, const double* a, const double* b,
                       size_t m, size_t k, size_t n) {
    // Vectorized over output columns; each c[i][j] still accumulates in
    // ascending-k order, matching the scalar reference lane for lane.
    for (size_t i = 0; i < m; ++i) {
        double* c_row = c + i * n;
        for (size_t kk = 0; kk < k; ++kk) {
            const double a_ik = a[i * k + kk];
            const __m256d va = _mm256_set1_pd(a_ik);
            const double* b_row = b + kk * n;
            size_t j = 0;
            for (; j + 4 <= n; j += 4) {
                __m256d vc = _mm256_loadu_pd(c_row + j);
                __m256d vb = _mm256_loadu_pd(b_row + j);
                _mm256_storeu_pd(c_row + j, _mm256_add_pd(vc, _mm256_mul_pd(va, vb)));
            }
            for (; j < n; ++j) {
                c_row[j] += a_ik * b_row[j];
            }
        }
    }
}

void relu_avx2(double* dst, const double* x, size_t n) {
    const __m256d zero = _mm256_setzero_pd();
    size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d vx = _mm256_loadu_pd(x + i);
        _mm256_storeu_pd(dst + i, _mm256_max_pd(vx, zero));
    }
    for (; i < n; ++i) {
        dst[i] = x[i] > 0.0 ? x[i] : 0.0;
    }
}

void relu_backward_avx2(double* dx, const double* pre, const double* dz, size_t n) {
    const __m256d zero = _mm256_setzero_pd();
    size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d vp = _mm256_loadu_pd(pre + i);
        __m256d vz = _mm256_loadu_pd(dz + i);
        __m256d mask = _mm256_cmp_pd(vp, zero, _CMP_GT_OQ);
        _mm256_storeu_pd(dx + i, _mm256_and_pd(vz, mask));
    }
    for (; i < n; ++i) {
        dx[i] = pre[i] > 0.0 ? dz[i] : 0.0;
    }
}

void sgd_update_avx2(double* w, double* v, const double* g,
                     double lr, double momentum, double weight_decay, size_t n) {
    const __m256d vmu = _mm256_set1_pd(momentum);
    const __m256d vwd = _mm256_set1_pd(weight_decay);
    const __m256d vlr = _mm256_set1_pd(lr);
    size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d vw = _mm256_loadu_pd(w + i);
        __m256d vv = _mm256_loadu_pd(v + i);
        __m256d vg = _mm256_loadu_pd(g + i);
        __m256d upd = _mm256_add_pd(_mm256_mul_pd(vmu, vv),
                                    _mm256_add_pd(vg, _mm256_mul_pd(vwd, vw)));
        _mm256_storeu_pd(v + i, upd);
        _mm256_storeu_pd(w + i, _mm256_sub_pd(vw, _mm256_mul_pd(vlr, upd)));
    }
    for (; i < n; ++i) {
        v[i] = momentum * v[i] + (g[i] + weight_decay * w[i]);
        w[i] = w[i] - lr * v[i];
    }
}

}  // namespace

extern const Ops kAvx2Ops;
const Ops kAvx2Ops = {
    lerp_avx2,   axpy_avx2,          scale_avx2,      matmul_accum_avx2,
    relu_avx2,   relu_backward_avx2, sgd_update_avx2,
};

#else  // non-x86 build: dispatch falls back to scalar, this table is unused.

extern const Ops kAvx2Ops;
const Ops kAvx2Ops = {nullptr, nullptr, nullptr, nullptr, nullptr, nullptr, nullptr};

#endif

}  // namespace mixlab::kernels::detail
