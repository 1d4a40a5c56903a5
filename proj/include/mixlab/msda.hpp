#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mixlab/batch.hpp"
#include "mixlab/rng.hpp"

namespace mixlab {

class Model;

enum class MixMethod { kNone, kMixup, kCutMix, kSaliencyGrid };

std::string mix_method_name(MixMethod m);
MixMethod mix_method_from_name(const std::string& name);

// Pixel rectangle [x0, x0+w) x [y0, y0+h) taken from the paired image.
struct CutBox {
    size_t x0 = 0, y0 = 0, w = 0, h = 0;
    size_t area() const { return w * h; }
};

// Complete, replayable description of one batch's augmentation. Applying a
// plan is randomness-free: apply_plan(batch, plan) reproduces the kernel
// output bit-exactly.
struct MixPlan {
    MixMethod method = MixMethod::kNone;
    double lambda_raw = 1.0;
    double lambda_effective = 1.0;  // label weight actually applied
    std::vector<uint32_t> pairing;  // permutation of batch indices
    std::optional<CutBox> box;      // cutmix geometry
    size_t grid = 0;                // cells per side (saliency grid)
    // Saliency grid: row-major [B x grid^2] flags, 1 = cell kept from the
    // primary image.
    std::vector<uint8_t> cell_assignment;
    // Sample-granularity drop decisions: 1 = sample keeps its original
    // features and label. Empty for batch-level plans.
    std::vector<uint8_t> kept;

    static MixPlan identity(size_t batch_size);

    // One line of JSON for experiment logs.
    std::string to_json() const;
    static MixPlan from_json(const std::string& line);
};

// Deterministic replay: rebuilds the mixed batch that the plan describes.
LabeledBatch apply_plan(const LabeledBatch& batch, const MixPlan& plan);

// x_tilde = lam*x + (1-lam)*x_perm, labels alike; lam ~ Beta(alpha, alpha),
// pairing a uniform random permutation.
std::pair<LabeledBatch, MixPlan> mixup(const LabeledBatch& batch, double alpha,
                                       RngStream& stream);

// Pastes a random box of the paired image; the label weight is the surviving
// area fraction (original CutMix geometry: ratio sqrt(1-lam), uniform center,
// clipped to bounds).
std::pair<LabeledBatch, MixPlan> cutmix(const LabeledBatch& batch, double alpha,
                                        RngStream& stream);

// Per-image saliency map provider: flat H*W map, non-negative.
using SaliencyFn = std::function<std::vector<double>(size_t sample_index)>;

// Keeps the round(lam*g^2) cells with the highest primary-minus-partner
// saliency margin from the primary image (ties to the lowest cell index);
// remaining cells come from the partner.
std::pair<LabeledBatch, MixPlan> saliency_grid_mix(const LabeledBatch& batch,
                                                   double alpha, size_t grid,
                                                   const SaliencyFn& saliency,
                                                   RngStream& stream);

// Geometry helpers, shared by the kernels and the effective-lambda sampler.
CutBox draw_cut_box(double lambda_raw, size_t h, size_t w, RngStream& stream);
double cutmix_lambda_effective(const CutBox& box, size_t h, size_t w);
size_t saliency_grid_keep_count(double lambda_raw, size_t grid);

// Top-k cell selection by margin, ties to the lowest index. Exposed for the
// brute-force oracle tests.
std::vector<uint8_t> top_k_cells(const std::vector<double>& margins, size_t k);

// Per-pixel L2 norm over channels of d(loss)/d(input) at the given label.
std::vector<double> gradient_saliency(const Model& model,
                                      const std::vector<double>& image,
                                      size_t true_class, const ImageShape& shape);

// SaliencyFn backed by the current model state (used while training with the
// saliency-grid method).
SaliencyFn model_saliency(const Model& model, const LabeledBatch& batch);

}  // namespace mixlab
