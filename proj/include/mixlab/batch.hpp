#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "mixlab/tensor.hpp"

namespace mixlab {

// Spatial interpretation of a flat feature vector, for the kernels that cut
// or tile regions. pixels() must equal the feature width.
struct ImageShape {
    size_t c = 1;
    size_t h = 0;
    size_t w = 0;
    size_t pixels() const { return c * h * w; }
};

// A batch of feature rows with one soft label distribution per row.
struct LabeledBatch {
    Tensor features;                 // [B, F]
    Tensor labels;                   // [B, M], each row a distribution
    std::optional<ImageShape> image; // set when F is viewable as C*H*W

    size_t batch_size() const { return features.extent(0); }
    size_t n_features() const { return features.extent(1); }
    size_t n_classes() const { return labels.extent(1); }

    // Rows sum to 1 within 1e-9 with non-negative entries; shapes agree.
    void validate() const;
};

void validate_soft_labels(const Tensor& labels);

// One-hot labels from class indices.
Tensor one_hot(const std::vector<uint32_t>& labels, size_t n_classes);

LabeledBatch make_batch(Tensor features, const std::vector<uint32_t>& labels,
                        size_t n_classes,
                        std::optional<ImageShape> image = std::nullopt);

}  // namespace mixlab
