#include "mixlab/train.hpp"

#include <cmath>
#include <cstring>
#include <memory>
#include <numeric>
#include <sstream>

#include "mixlab/kernels.hpp"
#include "mixlab/util.hpp"

namespace mixlab {

void TrainSchedule::validate() const {
    if (!(base_lr > 0.0)) throw ValidationError("learning rate must be positive");
    if (!(decay_factor > 0.0)) throw ValidationError("decay factor must be positive");
    if (!(momentum >= 0.0 && momentum < 1.0)) {
        throw ValidationError("momentum must lie in [0,1)");
    }
    if (weight_decay < 0.0) throw ValidationError("weight decay must be non-negative");
    if (batch_size < 2) throw ValidationError("batch size must be at least 2");
    for (size_t i = 0; i < decay_epochs.size(); ++i) {
        if (decay_epochs[i] >= epochs) {
            throw ValidationError("decay epoch " + std::to_string(decay_epochs[i]) +
                                  " is not before the last epoch");
        }
        if (i > 0 && decay_epochs[i] <= decay_epochs[i - 1]) {
            throw ValidationError("decay epochs must be strictly increasing");
        }
    }
}

AugPipeline vanilla_pipeline() {
    return [](const LabeledBatch& batch, const Model&, uint64_t, size_t) {
        return std::make_pair(batch, MixPlan::identity(batch.batch_size()));
    };
}

namespace {

// Lazy per-batch saliency provider: the maps are computed on first use, so a
// step that skips mixing never pays for a backward pass. Valid only for the
// duration of the pipeline call.
SaliencyFn lazy_model_saliency(const Model& model, const LabeledBatch& batch) {
    auto cache = std::make_shared<SaliencyFn>();
    const Model* mp = &model;
    const LabeledBatch* bp = &batch;
    return [cache, mp, bp](size_t index) {
        if (!*cache) *cache = model_saliency(*mp, *bp);
        return (*cache)(index);
    };
}

std::pair<LabeledBatch, MixPlan> run_method(const LabeledBatch& batch, const Model& model,
                                            MixMethod method, double alpha, size_t grid,
                                            RngStream& mix_stream) {
    switch (method) {
        case MixMethod::kMixup:
            return mixup(batch, alpha, mix_stream);
        case MixMethod::kCutMix:
            return cutmix(batch, alpha, mix_stream);
        case MixMethod::kSaliencyGrid:
            return saliency_grid_mix(batch, alpha, grid,
                                     lazy_model_saliency(model, batch), mix_stream);
        case MixMethod::kNone:
            return {batch, MixPlan::identity(batch.batch_size())};
    }
    throw ValidationError("unknown mix method");
}

}  // namespace

AugPipeline kernel_pipeline(MixMethod method, double alpha, size_t grid) {
    return [method, alpha, grid](const LabeledBatch& batch, const Model& model,
                                 uint64_t seed, size_t step) {
        RngStream mix(seed, stream_key::combine(stream_key::kMix, step));
        return run_method(batch, model, method, alpha, grid, mix);
    };
}

AugPipeline dropmix_pipeline(DropMixConfig cfg) {
    cfg.validate();
    return [cfg](const LabeledBatch& batch, const Model& model, uint64_t seed,
                 size_t step) {
        RngStream drop(seed, stream_key::combine(stream_key::kDrop, step));
        RngStream mix(seed, stream_key::combine(stream_key::kMix, step));
        return dropmix_step(batch, cfg, drop, mix, lazy_model_saliency(model, batch));
    };
}

AugPipeline alpha_controlled_pipeline(double alpha) {
    return [alpha](const LabeledBatch& batch, const Model&, uint64_t seed, size_t step) {
        RngStream mix(seed, stream_key::combine(stream_key::kMix, step));
        return alpha_controlled_step(batch, alpha, mix);
    };
}

double evaluate_accuracy(const Model& model, const Dataset& eval_set) {
    eval_set.validate();
    const Tensor probs = model.forward(eval_set.features);
    const std::vector<size_t> pred = argmax_rows(probs);
    size_t correct = 0;
    for (size_t i = 0; i < pred.size(); ++i) {
        if (pred[i] == eval_set.labels[i]) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(pred.size());
}

TrainResult train(Model model, const Dataset& train_set, const Dataset& eval_set,
                  const TrainSchedule& schedule, const AugPipeline& aug,
                  uint64_t master_seed, std::optional<ImageShape> image,
                  bool log_plans) {
    schedule.validate();
    train_set.validate();
    eval_set.validate();
    if (train_set.n_features() != model.input_width() ||
        train_set.n_classes != model.n_classes()) {
        throw ShapeError("train set does not match the model's widths");
    }

    TrainResult result;
    const size_t n = train_set.n_samples();
    const size_t n_classes = train_set.n_classes;
    const size_t fdim = train_set.n_features();

    std::vector<Tensor> velocity_w, velocity_b;
    for (size_t l = 0; l < model.n_layers(); ++l) {
        velocity_w.push_back(Tensor::zeros(model.weights()[l].shape()));
        velocity_b.push_back(Tensor::zeros(model.biases()[l].shape()));
    }

    double lr = schedule.base_lr;
    size_t step = 0;
    std::vector<size_t> order(n);
    std::iota(order.begin(), order.end(), 0u);

    for (size_t epoch = 0; epoch < schedule.epochs; ++epoch) {
        for (size_t de : schedule.decay_epochs) {
            if (de == epoch) lr *= schedule.decay_factor;
        }

        RngStream shuffle(master_seed, stream_key::combine(stream_key::kShuffle, epoch));
        std::iota(order.begin(), order.end(), 0u);
        for (size_t i = n - 1; i > 0; --i) {
            size_t j = shuffle.next_below(i + 1);
            std::swap(order[i], order[j]);
        }

        double loss_sum = 0.0;
        size_t steps_this_epoch = 0;
        for (size_t start = 0; start < n; start += schedule.batch_size) {
            const size_t bsz = std::min(schedule.batch_size, n - start);
            if (bsz < 2) break;  // a single leftover sample cannot be mixed

            Tensor feats({bsz, fdim});
            std::vector<uint32_t> labels(bsz);
            for (size_t i = 0; i < bsz; ++i) {
                const size_t src = order[start + i];
                std::memcpy(feats.row(i), train_set.features.row(src),
                            fdim * sizeof(double));
                labels[i] = train_set.labels[src];
            }
            LabeledBatch batch = make_batch(std::move(feats), labels, n_classes, image);

            auto [mixed, plan] = aug(batch, model, master_seed, step);
            if (log_plans) result.plans.push_back(plan);

            auto [loss, grads] = loss_and_grads(model, mixed);
            if (!std::isfinite(loss)) {
                throw DivergenceError("training loss became non-finite at step " +
                                          std::to_string(step),
                                      static_cast<long>(step));
            }
            loss_sum += loss;

            const kernels::Ops& ops = kernels::active();
            for (size_t l = 0; l < model.n_layers(); ++l) {
                ops.sgd_update(model.weights()[l].data(), velocity_w[l].data(),
                               grads.weights[l].data(), lr, schedule.momentum,
                               schedule.weight_decay, model.weights()[l].size());
                ops.sgd_update(model.biases()[l].data(), velocity_b[l].data(),
                               grads.biases[l].data(), lr, schedule.momentum,
                               schedule.weight_decay, model.biases()[l].size());
            }
            ++step;
            ++steps_this_epoch;
        }

        result.log.push_back({epoch, lr,
                              steps_this_epoch ? loss_sum / steps_this_epoch : 0.0,
                              evaluate_accuracy(model, eval_set)});
    }

    result.model = std::move(model);
    return result;
}

std::string epoch_log_csv(const std::vector<EpochLog>& log) {
    std::ostringstream os;
    os << "epoch,lr,train_loss,eval_acc\n";
    for (const EpochLog& e : log) {
        os << e.epoch << ',' << fmt_double(e.lr) << ',' << fmt_double(e.train_loss)
           << ',' << fmt_double(e.eval_acc) << '\n';
    }
    return os.str();
}

}  // namespace mixlab
