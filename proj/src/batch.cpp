#include "mixlab/batch.hpp"

#include <cmath>

namespace mixlab {

void validate_soft_labels(const Tensor& labels) {
    if (labels.rank() != 2) throw ShapeError("soft labels must be rank-2");
    const size_t rows = labels.extent(0), cols = labels.extent(1);
    for (size_t i = 0; i < rows; ++i) {
        const double* r = labels.row(i);
        double sum = 0.0;
        for (size_t j = 0; j < cols; ++j) {
            if (r[j] < 0.0) {
                throw ValidationError("label row " + std::to_string(i) +
                                      " has a negative entry");
            }
            sum += r[j];
        }
        if (std::abs(sum - 1.0) > 1e-9) {
            throw ValidationError("label row " + std::to_string(i) +
                                  " sums to " + std::to_string(sum) + ", not 1");
        }
    }
}

void LabeledBatch::validate() const {
    if (features.rank() != 2) throw ShapeError("batch features must be rank-2");
    if (labels.extent(0) != features.extent(0)) {
        throw ShapeError("batch has " + std::to_string(features.extent(0)) +
                         " feature rows but " + std::to_string(labels.extent(0)) +
                         " label rows");
    }
    if (image && image->pixels() != n_features()) {
        throw ShapeError("image shape does not cover the feature width");
    }
    validate_soft_labels(labels);
}

Tensor one_hot(const std::vector<uint32_t>& labels, size_t n_classes) {
    Tensor out({labels.size(), n_classes});
    for (size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] >= n_classes) {
            throw ValidationError("label " + std::to_string(labels[i]) +
                                  " out of range for " + std::to_string(n_classes) +
                                  " classes");
        }
        out.at(i * n_classes + labels[i]) = 1.0;
    }
    return out;
}

LabeledBatch make_batch(Tensor features, const std::vector<uint32_t>& labels,
                        size_t n_classes, std::optional<ImageShape> image) {
    LabeledBatch b{std::move(features), one_hot(labels, n_classes), image};
    b.validate();
    return b;
}

}  // namespace mixlab
