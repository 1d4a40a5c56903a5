#pragma once

#include <string>
#include <utility>
#include <vector>

#include "mixlab/batch.hpp"
#include "mixlab/rng.hpp"
#include "mixlab/tensor.hpp"

namespace mixlab {

// Dense ReLU network with a softmax head. Widths run
// [n_features, h1, ..., n_classes]; weights are [in x out] row-major.
class Model {
public:
    Model() = default;
    explicit Model(std::vector<size_t> widths);  // zero-initialized

    // He-style fan-in scaled uniform init, biases zero. All draws come from
    // the given stream so seed averaging isolates init randomness.
    static Model random_init(std::vector<size_t> widths, RngStream& stream);

    const std::vector<size_t>& widths() const { return widths_; }
    size_t n_layers() const { return weights_.size(); }
    size_t input_width() const;
    size_t n_classes() const;
    bool supports_input_gradients() const { return !weights_.empty(); }

    std::vector<Tensor>& weights() { return weights_; }
    std::vector<Tensor>& biases() { return biases_; }
    const std::vector<Tensor>& weights() const { return weights_; }
    const std::vector<Tensor>& biases() const { return biases_; }

    Tensor logits(const Tensor& features) const;
    // Softmax probabilities per sample; each row is a valid distribution.
    Tensor forward(const Tensor& features) const;

    // d(sum of per-sample cross-entropies)/d(input), [B x n_features]. The
    // sum reduction keeps per-row gradients exactly per-sample.
    Tensor input_gradients(const Tensor& features, const Tensor& labels) const;

private:
    std::vector<size_t> widths_;
    std::vector<Tensor> weights_;
    std::vector<Tensor> biases_;
};

struct Gradients {
    std::vector<Tensor> weights;
    std::vector<Tensor> biases;
};

// Mean soft-label cross-entropy over the batch and exact gradients for every
// parameter. Labels must be valid distributions.
std::pair<double, Gradients> loss_and_grads(const Model& model, const LabeledBatch& batch);

// Loss alone, for finite-difference oracles.
double loss_only(const Model& model, const LabeledBatch& batch);

// Checkpoint format: "MXMD" magic, version, layer widths, then little-endian
// 64-bit parameters (W then b per layer). Byte-stable for identical models.
void save_model(const Model& model, const std::string& path);
Model load_model(const std::string& path);

}  // namespace mixlab
