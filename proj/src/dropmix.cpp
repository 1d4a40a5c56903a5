#include "mixlab/dropmix.hpp"

namespace mixlab {

void DropMixConfig::validate() const {
    if (!(rate >= 0.0 && rate <= 1.0)) {
        throw ValidationError("DropMix rate must be in [0,1], got " + std::to_string(rate));
    }
    if (!(alpha > 0.0)) throw ValidationError("alpha must be positive");
    if (method == MixMethod::kNone) {
        throw ValidationError("DropMix needs an inner MSDA method");
    }
    if (method == MixMethod::kSaliencyGrid && grid == 0) {
        throw ValidationError("saliency grid needs a positive cell count");
    }
}

namespace {

std::pair<LabeledBatch, MixPlan> run_kernel(const LabeledBatch& batch,
                                            const DropMixConfig& cfg,
                                            RngStream& mix_stream,
                                            const SaliencyFn& saliency) {
    switch (cfg.method) {
        case MixMethod::kMixup:
            return mixup(batch, cfg.alpha, mix_stream);
        case MixMethod::kCutMix:
            return cutmix(batch, cfg.alpha, mix_stream);
        case MixMethod::kSaliencyGrid:
            if (!saliency) {
                throw ValidationError("saliency_grid method needs a saliency provider");
            }
            return saliency_grid_mix(batch, cfg.alpha, cfg.grid, saliency, mix_stream);
        case MixMethod::kNone:
            break;
    }
    throw ValidationError("DropMix has no inner kernel");
}

}  // namespace

std::pair<LabeledBatch, MixPlan> dropmix_step(const LabeledBatch& batch,
                                              const DropMixConfig& cfg,
                                              RngStream& drop_stream,
                                              RngStream& mix_stream,
                                              const SaliencyFn& saliency) {
    cfg.validate();
    if (cfg.granularity == DropGranularity::kBatch) {
        const double rand = drop_stream.next_unit();
        if (cfg.rate < rand) {
            return run_kernel(batch, cfg, mix_stream, saliency);
        }
        return {batch, MixPlan::identity(batch.batch_size())};
    }

    // Sample granularity: mix the whole batch, then each sample independently
    // keeps its original pair with probability r.
    std::vector<uint8_t> kept(batch.batch_size());
    for (size_t i = 0; i < batch.batch_size(); ++i) {
        kept[i] = !(cfg.rate < drop_stream.next_unit());
    }
    auto [mixed, plan] = run_kernel(batch, cfg, mix_stream, saliency);
    plan.kept = std::move(kept);
    return {apply_plan(batch, plan), std::move(plan)};
}

std::vector<double> effective_lambda_distribution(const DropMixConfig& cfg,
                                                  size_t n_draws, RngStream& stream,
                                                  std::optional<ImageShape> geometry) {
    cfg.validate();
    if (n_draws < 1) throw ValidationError("n_draws must be at least 1");
    if (cfg.method == MixMethod::kCutMix && !geometry) {
        throw ValidationError("cutmix effective lambda needs image geometry");
    }
    RngStream drop = stream.substream(0);
    RngStream mix = stream.substream(1);
    std::vector<double> out;
    out.reserve(n_draws);
    for (size_t i = 0; i < n_draws; ++i) {
        const double rand = drop.next_unit();
        if (!(cfg.rate < rand)) {
            out.push_back(1.0);
            continue;
        }
        const double lam = beta_sample(mix, cfg.alpha);
        switch (cfg.method) {
            case MixMethod::kMixup:
                out.push_back(lam);
                break;
            case MixMethod::kCutMix: {
                CutBox box = draw_cut_box(lam, geometry->h, geometry->w, mix);
                out.push_back(cutmix_lambda_effective(box, geometry->h, geometry->w));
                break;
            }
            case MixMethod::kSaliencyGrid: {
                const size_t k = saliency_grid_keep_count(lam, cfg.grid);
                out.push_back(static_cast<double>(k) /
                              static_cast<double>(cfg.grid * cfg.grid));
                break;
            }
            case MixMethod::kNone:
                break;
        }
    }
    return out;
}

std::pair<LabeledBatch, MixPlan> alpha_controlled_step(const LabeledBatch& batch,
                                                       double alpha,
                                                       RngStream& stream) {
    return mixup(batch, alpha, stream);
}

}  // namespace mixlab
