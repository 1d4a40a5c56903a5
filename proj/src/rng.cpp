#include "mixlab/rng.hpp"

#include <cmath>

namespace mixlab {

namespace {

constexpr uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

// splitmix64 finalizer (Steele, Lea, Flood 2014).
uint64_t mix64(uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

}  // namespace

namespace stream_key {
uint64_t combine(uint64_t base, uint64_t index) {
    return mix64(base * kGolden + index + 1);
}
}  // namespace stream_key

RngStream::RngStream(uint64_t master_seed, uint64_t key)
    : master_seed_(master_seed), key_(key) {
    base_ = mix64(master_seed + mix64(key + kGolden));
}

uint64_t RngStream::next_u64() {
    uint64_t state = base_ + (++counter_) * kGolden;
    return mix64(state);
}

double RngStream::next_unit() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::next_unit_open() {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
}

uint64_t RngStream::next_below(uint64_t n) {
    if (n == 0) throw ValidationError("next_below: n must be positive");
    // Rejection above the largest multiple of n keeps the draw unbiased.
    uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    uint64_t x;
    do {
        x = next_u64();
    } while (x >= limit);
    return x % n;
}

double RngStream::next_gaussian() {
    // Box-Muller, cosine branch only: two uniforms per normal, no rejection.
    double u1 = next_unit_open();
    double u2 = next_unit();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

RngStream RngStream::substream(uint64_t index) const {
    return RngStream(master_seed_, stream_key::combine(key_, index));
}

double gamma_sample(RngStream& stream, double shape) {
    if (!(shape > 0.0)) throw ValidationError("gamma_sample: shape must be positive");
    if (shape < 1.0) {
        // Gamma(a) = Gamma(a+1) * U^(1/a); keeps Marsaglia-Tsang in its
        // valid range and stays accurate for tiny shapes.
        double boost = std::pow(stream.next_unit_open(), 1.0 / shape);
        return gamma_sample(stream, shape + 1.0) * boost;
    }
    double d = shape - 1.0 / 3.0;
    double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x = stream.next_gaussian();
        double v = 1.0 + c * x;
        if (v <= 0.0) continue;
        v = v * v * v;
        double u = stream.next_unit_open();
        double x2 = x * x;
        if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
        if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
    }
}

double beta_sample(RngStream& stream, double alpha) {
    if (!(alpha > 0.0)) throw ValidationError("beta_sample: alpha must be positive");
    double g1 = gamma_sample(stream, alpha);
    double g2 = gamma_sample(stream, alpha);
    double denom = g1 + g2;
    if (denom == 0.0) return 0.5;  // both underflowed; the symmetric midpoint
    return g1 / denom;
}

}  // namespace mixlab
