#include <doctest.h>

#include <array>
#include <cstring>
#include <vector>

#include "mixlab/kernels.hpp"
#include "mixlab/rng.hpp"

using namespace mixlab;

TEST_SUITE_BEGIN("kernels");

namespace {

std::vector<double> random_vec(size_t n, RngStream& s) {
    std::vector<double> v(n);
    for (double& x : v) x = s.next_gaussian();
    return v;
}

bool bit_equal(const std::vector<double>& a, const std::vector<double>& b) {
    return a.size() == b.size() &&
           std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

}  // namespace

// The AVX2 variants must match the scalar reference bit for bit: same
// operations, same order, one rounding each. Skipped (trivially true) when
// the host has no AVX2.
TEST_CASE("scalar and AVX2 backends agree exactly") {
    if (!kernels::avx2_supported()) {
        MESSAGE("AVX2 not available; equivalence check skipped");
        return;
    }
    const kernels::Ops& sc = kernels::table(kernels::Backend::kScalar);
    const kernels::Ops& vx = kernels::table(kernels::Backend::kAvx2);
    RngStream s(123, stream_key::kGeneric);

    // Odd sizes exercise the vector remainder paths.
    for (size_t n : {1u, 3u, 4u, 7u, 17u, 64u, 129u, 1000u}) {
        CAPTURE(n);
        const std::vector<double> a = random_vec(n, s);
        const std::vector<double> b = random_vec(n, s);
        const double lam = s.next_unit();

        std::vector<double> r1(n), r2(n);
        sc.lerp(r1.data(), a.data(), b.data(), lam, n);
        vx.lerp(r2.data(), a.data(), b.data(), lam, n);
        CHECK(bit_equal(r1, r2));

        r1 = a;
        r2 = a;
        sc.axpy(r1.data(), lam, b.data(), n);
        vx.axpy(r2.data(), lam, b.data(), n);
        CHECK(bit_equal(r1, r2));

        r1 = a;
        r2 = a;
        sc.scale(r1.data(), lam, n);
        vx.scale(r2.data(), lam, n);
        CHECK(bit_equal(r1, r2));

        sc.relu(r1.data(), a.data(), n);
        vx.relu(r2.data(), a.data(), n);
        CHECK(bit_equal(r1, r2));

        sc.relu_backward(r1.data(), a.data(), b.data(), n);
        vx.relu_backward(r2.data(), a.data(), b.data(), n);
        CHECK(bit_equal(r1, r2));

        std::vector<double> w1 = a, w2 = a, v1 = b, v2 = b;
        const std::vector<double> g = random_vec(n, s);
        sc.sgd_update(w1.data(), v1.data(), g.data(), 0.1, 0.9, 5e-4, n);
        vx.sgd_update(w2.data(), v2.data(), g.data(), 0.1, 0.9, 5e-4, n);
        CHECK(bit_equal(w1, w2));
        CHECK(bit_equal(v1, v2));
    }

    const std::vector<std::array<size_t, 3>> shapes = {
        {1, 1, 1}, {3, 5, 7}, {16, 64, 8}, {33, 17, 5}, {128, 64, 64}};
    for (const auto& [m, k, n] : shapes) {
        CAPTURE(m);
        CAPTURE(k);
        CAPTURE(n);
        const std::vector<double> a = random_vec(m * k, s);
        const std::vector<double> b = random_vec(k * n, s);
        std::vector<double> c1(m * n, 0.0), c2(m * n, 0.0);
        sc.matmul_accum(c1.data(), a.data(), b.data(), m, k, n);
        vx.matmul_accum(c2.data(), a.data(), b.data(), m, k, n);
        CHECK(bit_equal(c1, c2));
    }
}

TEST_CASE("scalar matmul matches a plain triple loop") {
    const kernels::Ops& sc = kernels::table(kernels::Backend::kScalar);
    RngStream s(5, stream_key::kGeneric);
    const size_t m = 7, k = 11, n = 5;
    const std::vector<double> a = random_vec(m * k, s);
    const std::vector<double> b = random_vec(k * n, s);
    std::vector<double> c(m * n, 0.0);
    sc.matmul_accum(c.data(), a.data(), b.data(), m, k, n);
    for (size_t i = 0; i < m; ++i) {
        for (size_t j = 0; j < n; ++j) {
            double want = 0.0;
            for (size_t kk = 0; kk < k; ++kk) want += a[i * k + kk] * b[kk * n + j];
            CHECK(c[i * n + j] == doctest::Approx(want).epsilon(1e-12));
        }
    }
}

TEST_CASE("lerp endpoints are exact copies") {
    const kernels::Ops& ops = kernels::active();
    RngStream s(6, stream_key::kGeneric);
    const std::vector<double> a = random_vec(33, s);
    const std::vector<double> b = random_vec(33, s);
    std::vector<double> r(33);
    ops.lerp(r.data(), a.data(), b.data(), 1.0, 33);
    CHECK(bit_equal(r, a));
    ops.lerp(r.data(), a.data(), b.data(), 0.0, 33);
    CHECK(bit_equal(r, b));
}

TEST_CASE("backend selection is reported and overridable") {
    const kernels::Backend before = kernels::active_backend();
    kernels::set_backend(kernels::Backend::kScalar);
    CHECK(kernels::backend_name(kernels::active_backend()) == "scalar");
    kernels::set_backend(before);
}

TEST_SUITE_END();
