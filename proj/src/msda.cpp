#include "mixlab/msda.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>

#include <json.hpp>

#include "mixlab/kernels.hpp"
#include "mixlab/model.hpp"

namespace mixlab {

using nlohmann::json;

std::string mix_method_name(MixMethod m) {
    switch (m) {
        case MixMethod::kNone: return "none";
        case MixMethod::kMixup: return "mixup";
        case MixMethod::kCutMix: return "cutmix";
        case MixMethod::kSaliencyGrid: return "saliency_grid";
    }
    throw ValidationError("unknown mix method");
}

MixMethod mix_method_from_name(const std::string& name) {
    if (name == "none") return MixMethod::kNone;
    if (name == "mixup") return MixMethod::kMixup;
    if (name == "cutmix") return MixMethod::kCutMix;
    if (name == "saliency_grid") return MixMethod::kSaliencyGrid;
    throw ValidationError("unknown mix method: " + name);
}

MixPlan MixPlan::identity(size_t batch_size) {
    MixPlan plan;
    plan.pairing.resize(batch_size);
    std::iota(plan.pairing.begin(), plan.pairing.end(), 0u);
    return plan;
}

std::string MixPlan::to_json() const {
    json j;
    j["method"] = mix_method_name(method);
    j["lambda_raw"] = lambda_raw;
    j["lambda_effective"] = lambda_effective;
    j["pairing"] = pairing;
    if (box) j["box"] = {box->x0, box->y0, box->w, box->h};
    if (grid > 0) j["grid"] = grid;
    if (!cell_assignment.empty()) j["cell_assignment"] = cell_assignment;
    if (!kept.empty()) j["kept"] = kept;
    return j.dump();
}

MixPlan MixPlan::from_json(const std::string& line) {
    json j = json::parse(line);
    MixPlan plan;
    plan.method = mix_method_from_name(j.at("method").get<std::string>());
    plan.lambda_raw = j.at("lambda_raw").get<double>();
    plan.lambda_effective = j.at("lambda_effective").get<double>();
    plan.pairing = j.at("pairing").get<std::vector<uint32_t>>();
    if (j.contains("box")) {
        auto b = j["box"].get<std::vector<size_t>>();
        plan.box = CutBox{b.at(0), b.at(1), b.at(2), b.at(3)};
    }
    if (j.contains("grid")) plan.grid = j["grid"].get<size_t>();
    if (j.contains("cell_assignment"))
        plan.cell_assignment = j["cell_assignment"].get<std::vector<uint8_t>>();
    if (j.contains("kept")) plan.kept = j["kept"].get<std::vector<uint8_t>>();
    return plan;
}

namespace {

void check_plan(const LabeledBatch& batch, const MixPlan& plan) {
    const size_t b = batch.batch_size();
    if (plan.pairing.size() != b) throw ShapeError("plan pairing size != batch size");
    std::vector<uint8_t> seen(b, 0);
    for (uint32_t p : plan.pairing) {
        if (p >= b || seen[p]) throw ValidationError("plan pairing is not a permutation");
        seen[p] = 1;
    }
    if (plan.lambda_effective < 0.0 || plan.lambda_effective > 1.0) {
        throw ValidationError("plan lambda_effective outside [0,1]");
    }
    if (!plan.kept.empty() && plan.kept.size() != b) {
        throw ShapeError("plan kept flags size != batch size");
    }
}

std::vector<uint32_t> draw_permutation(size_t n, RngStream& stream) {
    std::vector<uint32_t> p(n);
    std::iota(p.begin(), p.end(), 0u);
    for (size_t i = n - 1; i > 0; --i) {
        size_t j = stream.next_below(i + 1);
        std::swap(p[i], p[j]);
    }
    return p;
}

Tensor gather_rows(const Tensor& t, const std::vector<uint32_t>& idx) {
    const size_t cols = t.extent(1);
    Tensor out({idx.size(), cols});
    for (size_t i = 0; i < idx.size(); ++i) {
        std::memcpy(out.row(i), t.row(idx[i]), cols * sizeof(double));
    }
    return out;
}

ImageShape require_image(const LabeledBatch& batch, const char* op) {
    if (!batch.image) {
        throw ShapeError(std::string(op) + ": batch carries no image geometry");
    }
    if (batch.image->pixels() != batch.n_features()) {
        throw ShapeError(std::string(op) + ": image shape does not match feature width");
    }
    return *batch.image;
}

}  // namespace

LabeledBatch apply_plan(const LabeledBatch& batch, const MixPlan& plan) {
    batch.validate();
    check_plan(batch, plan);
    LabeledBatch out = batch;
    if (plan.method != MixMethod::kNone) {
        const Tensor partner_x = gather_rows(batch.features, plan.pairing);
        const Tensor partner_y = gather_rows(batch.labels, plan.pairing);
        switch (plan.method) {
            case MixMethod::kMixup: {
                kernels::active().lerp(out.features.data(), batch.features.data(),
                                       partner_x.data(), plan.lambda_raw,
                                       batch.features.size());
                break;
            }
            case MixMethod::kCutMix: {
                const ImageShape img = require_image(batch, "cutmix");
                if (!plan.box) throw ValidationError("cutmix plan has no box");
                const CutBox bx = *plan.box;
                for (size_t i = 0; i < batch.batch_size(); ++i) {
                    double* dst = out.features.row(i);
                    const double* src = partner_x.row(i);
                    for (size_t c = 0; c < img.c; ++c) {
                        for (size_t y = bx.y0; y < bx.y0 + bx.h; ++y) {
                            const size_t off = (c * img.h + y) * img.w + bx.x0;
                            std::memcpy(dst + off, src + off, bx.w * sizeof(double));
                        }
                    }
                }
                break;
            }
            case MixMethod::kSaliencyGrid: {
                const ImageShape img = require_image(batch, "saliency_grid_mix");
                const size_t g = plan.grid;
                if (g == 0 || plan.cell_assignment.size() != batch.batch_size() * g * g) {
                    throw ValidationError("saliency grid plan has no cell assignment");
                }
                const size_t ch = img.h / g, cw = img.w / g;
                for (size_t i = 0; i < batch.batch_size(); ++i) {
                    double* dst = out.features.row(i);
                    const double* src = partner_x.row(i);
                    const uint8_t* cells = plan.cell_assignment.data() + i * g * g;
                    for (size_t cell = 0; cell < g * g; ++cell) {
                        if (cells[cell]) continue;  // primary pixels already in place
                        const size_t cy = (cell / g) * ch, cx = (cell % g) * cw;
                        for (size_t c = 0; c < img.c; ++c) {
                            for (size_t y = cy; y < cy + ch; ++y) {
                                const size_t off = (c * img.h + y) * img.w + cx;
                                std::memcpy(dst + off, src + off, cw * sizeof(double));
                            }
                        }
                    }
                }
                break;
            }
            case MixMethod::kNone:
                break;
        }
        kernels::active().lerp(out.labels.data(), batch.labels.data(), partner_y.data(),
                               plan.lambda_effective, batch.labels.size());
    }
    if (!plan.kept.empty()) {
        const size_t fcols = batch.n_features(), lcols = batch.n_classes();
        for (size_t i = 0; i < batch.batch_size(); ++i) {
            if (!plan.kept[i]) continue;
            std::memcpy(out.features.row(i), batch.features.row(i), fcols * sizeof(double));
            std::memcpy(out.labels.row(i), batch.labels.row(i), lcols * sizeof(double));
        }
    }
    return out;
}

std::pair<LabeledBatch, MixPlan> mixup(const LabeledBatch& batch, double alpha,
                                       RngStream& stream) {
    batch.validate();
    if (batch.batch_size() < 2) throw ValidationError("mixup needs a batch of at least 2");
    MixPlan plan;
    plan.method = MixMethod::kMixup;
    plan.lambda_raw = beta_sample(stream, alpha);
    plan.lambda_effective = plan.lambda_raw;
    plan.pairing = draw_permutation(batch.batch_size(), stream);
    return {apply_plan(batch, plan), std::move(plan)};
}

CutBox draw_cut_box(double lambda_raw, size_t h, size_t w, RngStream& stream) {
    const double ratio = std::sqrt(1.0 - lambda_raw);
    const size_t cut_w = static_cast<size_t>(static_cast<double>(w) * ratio);
    const size_t cut_h = static_cast<size_t>(static_cast<double>(h) * ratio);
    const size_t cx = stream.next_below(w);
    const size_t cy = stream.next_below(h);
    const size_t x0 = cx > cut_w / 2 ? cx - cut_w / 2 : 0;
    const size_t y0 = cy > cut_h / 2 ? cy - cut_h / 2 : 0;
    const size_t x1 = std::min(cx + cut_w / 2, w);
    const size_t y1 = std::min(cy + cut_h / 2, h);
    return CutBox{x0, y0, x1 - x0, y1 - y0};
}

double cutmix_lambda_effective(const CutBox& box, size_t h, size_t w) {
    return 1.0 - static_cast<double>(box.area()) / static_cast<double>(h * w);
}

std::pair<LabeledBatch, MixPlan> cutmix(const LabeledBatch& batch, double alpha,
                                        RngStream& stream) {
    batch.validate();
    if (batch.batch_size() < 2) throw ValidationError("cutmix needs a batch of at least 2");
    const ImageShape img = require_image(batch, "cutmix");
    if (img.h < 2 || img.w < 2) throw ShapeError("cutmix needs images of at least 2x2");
    MixPlan plan;
    plan.method = MixMethod::kCutMix;
    plan.lambda_raw = beta_sample(stream, alpha);
    plan.pairing = draw_permutation(batch.batch_size(), stream);
    plan.box = draw_cut_box(plan.lambda_raw, img.h, img.w, stream);
    plan.lambda_effective = cutmix_lambda_effective(*plan.box, img.h, img.w);
    return {apply_plan(batch, plan), std::move(plan)};
}

size_t saliency_grid_keep_count(double lambda_raw, size_t grid) {
    const auto cells = static_cast<double>(grid * grid);
    auto k = static_cast<long>(std::lround(lambda_raw * cells));
    k = std::max(0l, std::min(k, static_cast<long>(grid * grid)));
    return static_cast<size_t>(k);
}

std::vector<uint8_t> top_k_cells(const std::vector<double>& margins, size_t k) {
    std::vector<size_t> order(margins.size());
    std::iota(order.begin(), order.end(), 0u);
    std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
        return margins[a] > margins[b];  // stable: ties keep the lowest index
    });
    std::vector<uint8_t> keep(margins.size(), 0);
    for (size_t i = 0; i < k && i < order.size(); ++i) keep[order[i]] = 1;
    return keep;
}

std::pair<LabeledBatch, MixPlan> saliency_grid_mix(const LabeledBatch& batch,
                                                   double alpha, size_t grid,
                                                   const SaliencyFn& saliency,
                                                   RngStream& stream) {
    batch.validate();
    if (batch.batch_size() < 2)
        throw ValidationError("saliency_grid_mix needs a batch of at least 2");
    const ImageShape img = require_image(batch, "saliency_grid_mix");
    if (grid == 0 || img.h % grid != 0 || img.w % grid != 0) {
        throw ValidationError("grid " + std::to_string(grid) +
                              " does not divide image " + std::to_string(img.h) + "x" +
                              std::to_string(img.w));
    }
    const size_t b = batch.batch_size();
    const size_t npix = img.h * img.w;

    std::vector<std::vector<double>> maps(b);
    for (size_t i = 0; i < b; ++i) {
        maps[i] = saliency(i);
        if (maps[i].size() != npix) {
            throw ShapeError("saliency map has wrong size for sample " + std::to_string(i));
        }
        for (double v : maps[i]) {
            if (v < 0.0) throw ValidationError("saliency map has a negative value");
        }
    }

    MixPlan plan;
    plan.method = MixMethod::kSaliencyGrid;
    plan.grid = grid;
    plan.lambda_raw = beta_sample(stream, alpha);
    plan.pairing = draw_permutation(b, stream);
    const size_t k = saliency_grid_keep_count(plan.lambda_raw, grid);
    plan.lambda_effective =
        static_cast<double>(k) / static_cast<double>(grid * grid);

    const size_t ch = img.h / grid, cw = img.w / grid;
    plan.cell_assignment.resize(b * grid * grid);
    std::vector<double> margins(grid * grid);
    for (size_t i = 0; i < b; ++i) {
        const std::vector<double>& mine = maps[i];
        const std::vector<double>& theirs = maps[plan.pairing[i]];
        for (size_t cell = 0; cell < grid * grid; ++cell) {
            const size_t cy = (cell / grid) * ch, cx = (cell % grid) * cw;
            double margin = 0.0;
            for (size_t y = cy; y < cy + ch; ++y) {
                for (size_t x = cx; x < cx + cw; ++x) {
                    margin += mine[y * img.w + x] - theirs[y * img.w + x];
                }
            }
            margins[cell] = margin;
        }
        std::vector<uint8_t> keep = top_k_cells(margins, k);
        std::copy(keep.begin(), keep.end(), plan.cell_assignment.begin() + i * grid * grid);
    }
    return {apply_plan(batch, plan), std::move(plan)};
}

std::vector<double> gradient_saliency(const Model& model,
                                      const std::vector<double>& image,
                                      size_t true_class, const ImageShape& shape) {
    if (!model.supports_input_gradients()) {
        throw CapabilityError("gradient_saliency: model provides no input gradients");
    }
    if (image.size() != shape.pixels()) {
        throw ShapeError("gradient_saliency: image size does not match shape");
    }
    Tensor x({1, image.size()}, image);
    Tensor y = one_hot({static_cast<uint32_t>(true_class)}, model.n_classes());
    Tensor grad = model.input_gradients(x, y);  // [1, C*H*W]
    std::vector<double> map(shape.h * shape.w, 0.0);
    for (size_t c = 0; c < shape.c; ++c) {
        for (size_t p = 0; p < shape.h * shape.w; ++p) {
            const double g = grad.at(c * shape.h * shape.w + p);
            map[p] += g * g;
        }
    }
    for (double& v : map) v = std::sqrt(v);
    return map;
}

SaliencyFn model_saliency(const Model& model, const LabeledBatch& batch) {
    const ImageShape img = require_image(batch, "model_saliency");
    // One backward pass for the whole batch; per-sample input gradients are
    // exact because the summed loss splits by sample.
    Tensor grads = model.input_gradients(batch.features, batch.labels);
    auto maps = std::make_shared<std::vector<std::vector<double>>>();
    maps->resize(batch.batch_size());
    for (size_t i = 0; i < batch.batch_size(); ++i) {
        std::vector<double> map(img.h * img.w, 0.0);
        const double* g = grads.row(i);
        for (size_t c = 0; c < img.c; ++c) {
            for (size_t p = 0; p < img.h * img.w; ++p) {
                map[p] += g[c * img.h * img.w + p] * g[c * img.h * img.w + p];
            }
        }
        for (double& v : map) v = std::sqrt(v);
        (*maps)[i] = std::move(map);
    }
    return [maps](size_t index) { return maps->at(index); };
}

}  // namespace mixlab
