#include <doctest.h>

#include <cmath>
#include <vector>

#include "mixlab/rng.hpp"
#include "support/oracles.hpp"

using namespace mixlab;

TEST_SUITE_BEGIN("rng");

TEST_CASE("same seed and key replay the identical sequence") {
    RngStream a(42, stream_key::kMix);
    RngStream b(42, stream_key::kMix);
    for (int i = 0; i < 1000; ++i) {
        CHECK(a.next_u64() == b.next_u64());
    }
    CHECK(a.counter() == b.counter());
}

TEST_CASE("different keys decorrelate (chi-square independence on 1e5 draws)") {
    RngStream a(42, stream_key::kMix);
    RngStream b(42, stream_key::kDrop);
    constexpr int kBins = 16;
    constexpr int kDraws = 100000;
    std::vector<int> counts(kBins * kBins, 0);
    for (int i = 0; i < kDraws; ++i) {
        const int ba = std::min(kBins - 1, static_cast<int>(a.next_unit() * kBins));
        const int bb = std::min(kBins - 1, static_cast<int>(b.next_unit() * kBins));
        ++counts[ba * kBins + bb];
    }
    const double expected = static_cast<double>(kDraws) / (kBins * kBins);
    double chi2 = 0.0;
    for (int c : counts) {
        const double d = c - expected;
        chi2 += d * d / expected;
    }
    // df = 255, z(0.99) = 2.3263; the approximation gives ~310.
    const double critical = oracle::chi2_critical(kBins * kBins - 1, 2.3263);
    CHECK(chi2 < critical);
}

TEST_CASE("next_unit stays in [0,1) and next_below is in range") {
    RngStream s(7, stream_key::kGeneric);
    for (int i = 0; i < 10000; ++i) {
        const double u = s.next_unit();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
        CHECK(s.next_below(13) < 13);
    }
}

TEST_CASE("beta(1,1) behaves as Uniform[0,1]") {
    RngStream s(1, stream_key::kGeneric);
    constexpr int kDraws = 100000;
    double sum = 0.0;
    for (int i = 0; i < kDraws; ++i) {
        const double x = beta_sample(s, 1.0);
        CHECK(x >= 0.0);
        CHECK(x <= 1.0);
        sum += x;
    }
    CHECK(std::fabs(sum / kDraws - 0.5) < 0.005);
}

TEST_CASE("beta(a,a) variance matches the closed form at small alpha") {
    // Var Beta(a,a) = a*a / ((2a)^2 (2a+1)) = 1 / (4 (2a+1)).
    const double alpha = 0.2;
    const double want = 1.0 / (4.0 * (2.0 * alpha + 1.0));
    RngStream s(2, stream_key::kGeneric);
    constexpr int kDraws = 100000;
    std::vector<double> xs(kDraws);
    double mean = 0.0;
    for (double& x : xs) {
        x = beta_sample(s, alpha);
        mean += x;
    }
    mean /= kDraws;
    double var = 0.0;
    for (double x : xs) var += (x - mean) * (x - mean);
    var /= kDraws;
    CHECK(std::fabs(var - want) < 0.005);
}

TEST_CASE("beta draws follow the Beta CDF (KS at the 1% level)") {
    for (double alpha : {0.2, 1.0, 2.0}) {
        CAPTURE(alpha);
        RngStream s(3, stream_key::kGeneric);
        constexpr int kDraws = 100000;
        std::vector<double> xs(kDraws);
        for (double& x : xs) x = beta_sample(s, alpha);
        const double d = oracle::ks_statistic(
            std::move(xs), [&](double x) { return oracle::beta_cdf_symmetric(alpha, x); });
        CHECK(d < 1.63 / std::sqrt(static_cast<double>(kDraws)));
    }
}

TEST_CASE("beta replay is deterministic") {
    RngStream a(11, stream_key::kGeneric);
    RngStream b(11, stream_key::kGeneric);
    for (int i = 0; i < 500; ++i) {
        CHECK(beta_sample(a, 0.3) == beta_sample(b, 0.3));
    }
}

TEST_CASE("non-positive alpha is rejected") {
    RngStream s(1, stream_key::kGeneric);
    CHECK_THROWS_AS(beta_sample(s, 0.0), ValidationError);
    CHECK_THROWS_AS(beta_sample(s, -1.0), ValidationError);
}

TEST_CASE("substreams are reproducible and distinct") {
    RngStream parent(9, stream_key::kMix);
    RngStream c1 = parent.substream(5);
    RngStream c2 = parent.substream(5);
    RngStream c3 = parent.substream(6);
    CHECK(c1.next_u64() == c2.next_u64());
    CHECK(c1.next_u64() != c3.next_u64());
}

TEST_SUITE_END();
