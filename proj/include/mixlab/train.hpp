#pragma once

#include <functional>
#include <string>
#include <vector>

#include "mixlab/dataset.hpp"
#include "mixlab/dropmix.hpp"
#include "mixlab/model.hpp"

namespace mixlab {

struct TrainSchedule {
    size_t epochs = 60;
    double base_lr = 0.1;
    double decay_factor = 0.1;
    std::vector<size_t> decay_epochs = {30, 45};
    double momentum = 0.9;
    double weight_decay = 5e-4;
    size_t batch_size = 128;

    void validate() const;
};

struct EpochLog {
    size_t epoch;
    double lr;
    double train_loss;  // mean over the epoch's steps
    double eval_acc;
};

// Batch augmentation hook, invoked once per step. Implementations derive
// their randomness from (master_seed, step) so that per-step draws never
// depend on how earlier steps branched.
using AugPipeline = std::function<std::pair<LabeledBatch, MixPlan>(
    const LabeledBatch& batch, const Model& model, uint64_t master_seed, size_t step)>;

AugPipeline vanilla_pipeline();
// The bare kernel on every step (DropMix rate 0 must match this bit-exactly).
AugPipeline kernel_pipeline(MixMethod method, double alpha, size_t grid);
AugPipeline dropmix_pipeline(DropMixConfig cfg);
AugPipeline alpha_controlled_pipeline(double alpha);

struct TrainResult {
    Model model;
    std::vector<EpochLog> log;
    std::vector<MixPlan> plans;  // populated only when log_plans is set
};

// SGD with momentum and L2 weight decay folded into the gradient, with the
// step-decay learning-rate schedule. Batches come from a seeded shuffle each
// epoch; the pipeline runs once per batch. Deterministic: identical
// (inputs, schedule, seed) produce bit-identical weights. Throws
// DivergenceError naming the step if the loss goes non-finite.
TrainResult train(Model model, const Dataset& train_set, const Dataset& eval_set,
                  const TrainSchedule& schedule, const AugPipeline& aug,
                  uint64_t master_seed, std::optional<ImageShape> image = std::nullopt,
                  bool log_plans = false);

double evaluate_accuracy(const Model& model, const Dataset& eval_set);

std::string epoch_log_csv(const std::vector<EpochLog>& log);

}  // namespace mixlab
