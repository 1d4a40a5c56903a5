#pragma once

// Test-only oracles, independent of the library code paths they check.

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace oracle {

// Regularized incomplete beta I_x(a, b) by continued fraction (modified
// Lentz), the standard numeric route; used as the Beta CDF reference for
// Kolmogorov-Smirnov checks.
inline double betacf(double a, double b, double x) {
    constexpr int kMaxIter = 300;
    constexpr double kEps = 3e-14;
    constexpr double kFpMin = 1e-300;
    const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < kFpMin) d = kFpMin;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kFpMin) d = kFpMin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kFpMin) d = kFpMin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kEps) break;
    }
    return h;
}

inline double ibeta(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                            a * std::log(x) + b * std::log(1.0 - x);
    const double front = std::exp(ln_front);
    if (x < (a + 1.0) / (a + b + 2.0)) {
        return front * betacf(a, b, x) / a;
    }
    return 1.0 - front * betacf(b, a, 1.0 - x) / b;
}

inline double beta_cdf_symmetric(double alpha, double x) {
    return ibeta(alpha, alpha, x);
}

// One-sample Kolmogorov-Smirnov statistic against a CDF.
template <typename Cdf>
double ks_statistic(std::vector<double> samples, const Cdf& cdf) {
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double worst = 0.0;
    for (size_t i = 0; i < samples.size(); ++i) {
        const double f = cdf(samples[i]);
        worst = std::max(worst, std::fabs((i + 1) / n - f));
        worst = std::max(worst, std::fabs(f - i / n));
    }
    return worst;
}

// Chi-square critical value via the Wilson-Hilferty cube approximation.
inline double chi2_critical(double df, double z_upper) {
    const double t = 1.0 - 2.0 / (9.0 * df) + z_upper * std::sqrt(2.0 / (9.0 * df));
    return df * t * t * t;
}

// Nearest centroid by squared Euclidean distance; ties to the lowest index.
inline size_t nearest_centroid(const std::vector<std::vector<double>>& centroids,
                               const double* x, size_t dim) {
    size_t best = 0;
    double best_d = 0.0;
    for (size_t m = 0; m < centroids.size(); ++m) {
        double d = 0.0;
        for (size_t j = 0; j < dim; ++j) {
            const double diff = x[j] - centroids[m][j];
            d += diff * diff;
        }
        if (m == 0 || d < best_d) {
            best = m;
            best_d = d;
        }
    }
    return best;
}

}  // namespace oracle
