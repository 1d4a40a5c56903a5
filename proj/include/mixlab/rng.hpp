#pragma once

#include <cstdint>

#include "mixlab/errors.hpp"

namespace mixlab {

// Well-known stream purposes. Streams for the same master seed but different
// keys are statistically independent, so each source of randomness in a run
// gets its own key and toggling one knob never shifts another knob's draws.
namespace stream_key {
constexpr uint64_t kInit = 0x01;        // weight initialization
constexpr uint64_t kShuffle = 0x02;     // per-epoch batch shuffling (combined with epoch)
constexpr uint64_t kMix = 0x03;         // per-step kernel randomness (combined with step)
constexpr uint64_t kDrop = 0x04;        // DropMix drop decisions
constexpr uint64_t kDataTrain = 0x05;   // synthetic train split
constexpr uint64_t kDataEval = 0x06;    // synthetic eval split
constexpr uint64_t kGeneric = 0x07;     // standalone sampling utilities

// Derives a fresh key from a base key and an index (epoch, step, ...).
uint64_t combine(uint64_t base, uint64_t index);
}  // namespace stream_key

// Counter-based deterministic random stream. A stream is a pure function of
// (master_seed, stream_key, counter): the state for draw i is
// base + i * golden-gamma, pushed through the splitmix64 finalizer. Replay is
// reconstruction with the same seed and key; any counter is reachable in O(1).
class RngStream {
public:
    RngStream(uint64_t master_seed, uint64_t key);

    uint64_t master_seed() const { return master_seed_; }
    uint64_t key() const { return key_; }
    uint64_t counter() const { return counter_; }

    uint64_t next_u64();

    // Uniform on [0, 1) with 53 random bits.
    double next_unit();
    // Uniform on (0, 1]; used where a log must not see zero.
    double next_unit_open();

    // Unbiased integer in [0, n). n must be positive.
    uint64_t next_below(uint64_t n);

    double next_gaussian();

    // Independent child stream; same (master, key, index) always yields the
    // same child.
    RngStream substream(uint64_t index) const;

private:
    uint64_t master_seed_;
    uint64_t key_;
    uint64_t base_;
    uint64_t counter_ = 0;
};

// One draw from Beta(alpha, alpha) via the two-Gamma construction,
// gamma(a)/(gamma(a)+gamma(a)). Correct down to very small alpha.
double beta_sample(RngStream& stream, double alpha);

// One draw from Gamma(shape, 1) (Marsaglia-Tsang, with the U^(1/a) boost for
// shape < 1).
double gamma_sample(RngStream& stream, double shape);

}  // namespace mixlab
