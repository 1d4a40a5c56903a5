#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "mixlab/msda.hpp"

namespace mixlab {

enum class DropGranularity { kBatch, kSample };

struct DropMixConfig {
    double rate = 0.0;  // r: probability a step (or sample) keeps its originals
    DropGranularity granularity = DropGranularity::kBatch;
    MixMethod method = MixMethod::kMixup;
    double alpha = 1.0;
    size_t grid = 4;  // saliency-grid cells per side

    void validate() const;
};

// One scheduler step. Draws Rand ~ U[0,1) from drop_stream and applies the
// inner kernel (driven by mix_stream) iff r < Rand, so mixing happens with
// probability exactly 1 - r; otherwise the batch passes through unmodified
// with MixPlan.method == none. r = 0 reproduces the bare kernel bit-exactly
// and r = 1 never mixes. Sample granularity instead draws one uniform per
// sample and restores originals where r >= u.
//
// The two streams are deliberately separate: toggling r changes only the
// drop draws, never the kernel randomness, so runs with different rates stay
// pairable step by step.
std::pair<LabeledBatch, MixPlan> dropmix_step(const LabeledBatch& batch,
                                              const DropMixConfig& cfg,
                                              RngStream& drop_stream,
                                              RngStream& mix_stream,
                                              const SaliencyFn& saliency = {});

// Samples the label weight actually applied per step: 1 with probability r,
// otherwise the inner kernel's effective lambda (Beta(alpha,alpha) for mixup;
// area- or cell-adjusted for the box/grid methods, which need geometry).
std::vector<double> effective_lambda_distribution(
    const DropMixConfig& cfg, size_t n_draws, RngStream& stream,
    std::optional<ImageShape> geometry = std::nullopt);

// Plain Mixup with the given alpha and no drop path: the comparison baseline
// whose strength axis aligns with the DropMix rate via 1 - alpha.
std::pair<LabeledBatch, MixPlan> alpha_controlled_step(const LabeledBatch& batch,
                                                       double alpha,
                                                       RngStream& stream);

}  // namespace mixlab
