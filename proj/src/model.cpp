#include "mixlab/model.hpp"

#include <cmath>
#include <cstring>
#include <fstream>

#include "mixlab/kernels.hpp"

namespace mixlab {

namespace {

struct ForwardTrace {
    std::vector<Tensor> pre;  // z_l per layer, pre[L-1] are the logits
    std::vector<Tensor> act;  // act[0] = input, act[l] = relu(z_l) for hidden
};

ForwardTrace run_forward(const Model& model, const Tensor& x) {
    ForwardTrace t;
    t.act.push_back(x);
    for (size_t l = 0; l < model.n_layers(); ++l) {
        const Tensor& w = model.weights()[l];
        const Tensor& b = model.biases()[l];
        Tensor z = matmul(t.act.back(), w);
        const size_t rows = z.extent(0), cols = z.extent(1);
        for (size_t i = 0; i < rows; ++i) {
            kernels::active().axpy(z.row(i), 1.0, b.data(), cols);
        }
        if (l + 1 < model.n_layers()) {
            Tensor h({rows, cols});
            kernels::active().relu(h.data(), z.data(), z.size());
            t.act.push_back(std::move(h));
        }
        t.pre.push_back(std::move(z));
    }
    return t;
}

// Row-wise cross-entropy against soft labels from raw logits, via
// log-sum-exp: CE_i = lse(z_i) - sum_j y_ij * z_ij.
double cross_entropy_sum(const Tensor& logits, const Tensor& labels) {
    const size_t rows = logits.extent(0), cols = logits.extent(1);
    double total = 0.0;
    for (size_t i = 0; i < rows; ++i) {
        const double* z = logits.row(i);
        const double* y = labels.row(i);
        double zmax = z[0];
        for (size_t j = 1; j < cols; ++j) {
            if (z[j] > zmax) zmax = z[j];
        }
        double sum = 0.0, dot = 0.0;
        for (size_t j = 0; j < cols; ++j) {
            sum += std::exp(z[j] - zmax);
            dot += y[j] * z[j];
        }
        total += zmax + std::log(sum) - dot;
    }
    return total;
}

}  // namespace

Model::Model(std::vector<size_t> widths) : widths_(std::move(widths)) {
    if (widths_.size() < 2) throw ValidationError("model needs at least input and output widths");
    for (size_t w : widths_) {
        if (w == 0) throw ValidationError("model widths must be positive");
    }
    for (size_t l = 0; l + 1 < widths_.size(); ++l) {
        weights_.emplace_back(std::vector<size_t>{widths_[l], widths_[l + 1]});
        biases_.emplace_back(std::vector<size_t>{widths_[l + 1]});
    }
}

Model Model::random_init(std::vector<size_t> widths, RngStream& stream) {
    Model m(std::move(widths));
    for (Tensor& w : m.weights_) {
        const double limit = std::sqrt(6.0 / static_cast<double>(w.extent(0)));
        for (double& v : w.values()) {
            v = (2.0 * stream.next_unit() - 1.0) * limit;
        }
    }
    return m;
}

size_t Model::input_width() const {
    if (widths_.empty()) throw CapabilityError("model is uninitialized");
    return widths_.front();
}

size_t Model::n_classes() const {
    if (widths_.empty()) throw CapabilityError("model is uninitialized");
    return widths_.back();
}

Tensor Model::logits(const Tensor& features) const {
    if (widths_.empty()) throw CapabilityError("model is uninitialized");
    if (features.rank() != 2 || features.extent(1) != input_width()) {
        throw ShapeError("model expects [batch x " + std::to_string(input_width()) +
                         "] features, got " + features.shape_str());
    }
    return run_forward(*this, features).pre.back();
}

Tensor Model::forward(const Tensor& features) const {
    return softmax_rows(logits(features));
}

Tensor Model::input_gradients(const Tensor& features, const Tensor& labels) const {
    if (!supports_input_gradients()) {
        throw CapabilityError("model provides no input gradients");
    }
    validate_soft_labels(labels);
    ForwardTrace t = run_forward(*this, features);
    Tensor p = softmax_rows(t.pre.back());
    // dZ for the summed loss: p - y.
    Tensor dz = std::move(p);
    kernels::active().axpy(dz.data(), -1.0, labels.data(), dz.size());
    for (size_t l = n_layers(); l-- > 0;) {
        Tensor da = matmul(dz, transpose(weights_[l]));
        if (l == 0) return da;
        Tensor next({da.extent(0), da.extent(1)});
        kernels::active().relu_backward(next.data(), t.pre[l - 1].data(), da.data(),
                                        da.size());
        dz = std::move(next);
    }
    throw ShapeError("unreachable");
}

std::pair<double, Gradients> loss_and_grads(const Model& model, const LabeledBatch& batch) {
    batch.validate();
    if (batch.n_classes() != model.n_classes()) {
        throw ShapeError("batch classes do not match model output width");
    }
    const double inv_b = 1.0 / static_cast<double>(batch.batch_size());
    ForwardTrace t = run_forward(model, batch.features);
    const Tensor& logits = t.pre.back();
    const double loss = cross_entropy_sum(logits, batch.labels) * inv_b;

    Gradients g;
    g.weights.resize(model.n_layers());
    g.biases.resize(model.n_layers());

    // dZ_L = (p - y) / B, then standard backprop through the ReLU stack.
    Tensor dz = softmax_rows(logits);
    kernels::active().axpy(dz.data(), -1.0, batch.labels.data(), dz.size());
    kernels::active().scale(dz.data(), inv_b, dz.size());

    for (size_t l = model.n_layers(); l-- > 0;) {
        g.weights[l] = matmul(transpose(t.act[l]), dz);
        Tensor db({dz.extent(1)});
        for (size_t i = 0; i < dz.extent(0); ++i) {
            kernels::active().axpy(db.data(), 1.0, dz.row(i), dz.extent(1));
        }
        g.biases[l] = std::move(db);
        if (l == 0) break;
        Tensor da = matmul(dz, transpose(model.weights()[l]));
        Tensor next({da.extent(0), da.extent(1)});
        kernels::active().relu_backward(next.data(), t.pre[l - 1].data(), da.data(),
                                        da.size());
        dz = std::move(next);
    }
    return {loss, std::move(g)};
}

double loss_only(const Model& model, const LabeledBatch& batch) {
    batch.validate();
    Tensor z = model.logits(batch.features);
    return cross_entropy_sum(z, batch.labels) / static_cast<double>(batch.batch_size());
}

namespace {

constexpr char kMagic[4] = {'M', 'X', 'M', 'D'};
constexpr uint32_t kVersion = 1;

void put_u32(std::string& out, uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

uint32_t get_u32(const std::string& s, size_t off) {
    uint32_t v = 0;
    for (int i = 0; i < 4; ++i) {
        v |= static_cast<uint32_t>(static_cast<unsigned char>(s[off + i])) << (8 * i);
    }
    return v;
}

void put_f64(std::string& out, double v) {
    uint64_t bits;
    std::memcpy(&bits, &v, 8);
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((bits >> (8 * i)) & 0xFF));
}

double get_f64(const std::string& s, size_t off) {
    uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) {
        bits |= static_cast<uint64_t>(static_cast<unsigned char>(s[off + i])) << (8 * i);
    }
    double v;
    std::memcpy(&v, &bits, 8);
    return v;
}

}  // namespace

void save_model(const Model& model, const std::string& path) {
    if (model.widths().empty()) throw CapabilityError("cannot save an uninitialized model");
    std::string out;
    out.append(kMagic, 4);
    put_u32(out, kVersion);
    put_u32(out, static_cast<uint32_t>(model.widths().size()));
    for (size_t w : model.widths()) put_u32(out, static_cast<uint32_t>(w));
    for (size_t l = 0; l < model.n_layers(); ++l) {
        for (double v : model.weights()[l].values()) put_f64(out, v);
        for (double v : model.biases()[l].values()) put_f64(out, v);
    }
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw ValidationError("cannot open checkpoint for writing: " + path);
    f.write(out.data(), static_cast<std::streamsize>(out.size()));
    if (!f) throw ValidationError("checkpoint write failed: " + path);
}

Model load_model(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw FormatError("cannot open checkpoint: " + path);
    std::string data((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    if (data.size() < 12) {
        throw FormatError("checkpoint truncated at offset 0: only " +
                          std::to_string(data.size()) + " bytes");
    }
    if (std::memcmp(data.data(), kMagic, 4) != 0) {
        throw FormatError("bad checkpoint magic at offset 0");
    }
    if (get_u32(data, 4) != kVersion) {
        throw FormatError("unsupported checkpoint version at offset 4");
    }
    const size_t n_widths = get_u32(data, 8);
    if (n_widths < 2) throw FormatError("checkpoint declares fewer than 2 widths at offset 8");
    size_t off = 12;
    if (data.size() < off + 4 * n_widths) {
        throw FormatError("checkpoint truncated in width table at offset " +
                          std::to_string(data.size()));
    }
    std::vector<size_t> widths(n_widths);
    for (size_t i = 0; i < n_widths; ++i, off += 4) widths[i] = get_u32(data, off);

    Model m(widths);
    size_t n_params = 0;
    for (size_t l = 0; l + 1 < n_widths; ++l) n_params += widths[l] * widths[l + 1] + widths[l + 1];
    if (data.size() != off + 8 * n_params) {
        throw FormatError("checkpoint payload size mismatch at offset " + std::to_string(off) +
                          ": expected " + std::to_string(off + 8 * n_params) + " bytes, have " +
                          std::to_string(data.size()));
    }
    for (size_t l = 0; l + 1 < n_widths; ++l) {
        for (double& v : m.weights()[l].values()) {
            v = get_f64(data, off);
            off += 8;
        }
        for (double& v : m.biases()[l].values()) {
            v = get_f64(data, off);
            off += 8;
        }
    }
    return m;
}

}  // namespace mixlab
