#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mixlab/batch.hpp"
#include "mixlab/rng.hpp"
#include "mixlab/tensor.hpp"

namespace mixlab {

enum class Split : uint32_t { kTrain = 0, kEval = 1 };

struct Dataset {
    Tensor features;               // [n_samples x n_features]
    std::vector<uint32_t> labels;  // class indices in [0, n_classes)
    size_t n_classes = 0;
    Split split = Split::kTrain;

    size_t n_samples() const { return features.extent(0); }
    size_t n_features() const { return features.extent(1); }
    void validate() const;
    std::vector<size_t> per_class_counts() const;

    bool operator==(const Dataset& other) const;
};

// Synthetic class geometry. Robust classes are Gaussian clusters pulled onto
// the unit sphere around random directions. With magnitude_coding on, each
// fragile class reuses a robust class's direction and is distinguished only
// by vector scale, so convex mixing drains its label evidence quickly: the
// desk-scale stand-in for classes that degrade under MSDA.
struct FragilitySpec {
    size_t n_classes = 8;
    size_t n_fragile = 2;
    double overlap = 0.35;       // cluster spread before projection
    bool magnitude_coding = true;
    size_t n_features = 64;

    void validate() const;
    // Fragile classes occupy the highest indices.
    bool is_fragile(size_t class_index) const {
        return class_index >= n_classes - n_fragile;
    }
};

// Scale separating fragile clusters from their unit-norm partners.
constexpr double kFragileScale = 2.0;

// Class-balanced synthetic dataset: n_per_class samples per class, feature
// values quantized to float32 so .mxds roundtrips are bit-exact.
Dataset make_blobs(const FragilitySpec& spec, size_t n_per_class, RngStream& stream,
                   Split split = Split::kTrain);

// .mxds container: 24-byte header (magic "MXDS", version, n_samples,
// n_features, n_classes, split tag), then little-endian float32 features and
// uint32 labels.
void write_dataset(const Dataset& d, const std::string& path);
Dataset read_dataset(const std::string& path);

struct CifarIngest {
    Dataset dataset;
    std::array<double, 3> channel_mean{};
    std::array<double, 3> channel_std{};
};

// Reads the public CIFAR binary row layout (1 label byte for 10 classes,
// coarse+fine label bytes for 100, then 3072 pixel bytes). Pixels are scaled
// to [0,1] and normalized per channel; the constants used are returned so
// they can be recorded alongside the dataset.
CifarIngest ingest_cifar_binary(const std::string& path, size_t n_classes,
                                Split split = Split::kTrain);

uint64_t dataset_hash(const Dataset& d);

}  // namespace mixlab
