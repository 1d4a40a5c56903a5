#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mixlab/config.hpp"
#include "mixlab/dataset.hpp"
#include "mixlab/dropmix.hpp"
#include "mixlab/metrics.hpp"
#include "mixlab/train.hpp"

namespace mixlab {

// One experiment: dataset (generated or loaded), model, schedule, method,
// DropMix settings, and the seed list to average over.
struct RunConfig {
    std::optional<std::string> dataset_path;
    std::optional<std::string> dataset_eval_path;
    FragilitySpec frag;
    size_t train_per_class = 200;
    size_t eval_per_class = 100;
    uint64_t dataset_seed = 7;
    std::optional<ImageShape> image;
    std::vector<size_t> hidden = {64, 64};
    TrainSchedule schedule;
    MixMethod method = MixMethod::kNone;  // kNone trains vanilla
    DropMixConfig dropmix;                // alpha/rate/granularity/grid
    std::vector<uint64_t> seeds = {1, 2, 3, 4, 5};
    bool log_plans = false;
    int jobs = 1;

    static RunConfig from_config(const Config& cfg);
    Config to_config() const;
    void validate() const;
    std::string condition() const;  // vanilla | msda | msda+dropmix
    std::vector<size_t> model_widths() const;
};

struct DatasetPair {
    Dataset train;
    Dataset eval;
};

DatasetPair prepare_dataset(const RunConfig& cfg);

AugPipeline build_pipeline(const RunConfig& cfg);

// Trains every seed, evaluates, and writes the run directory: per-seed
// checkpoints, epoch CSVs and reports, the seed-averaged report, and a
// manifest hashing each artifact. A diverged seed is recorded as failed and
// the remaining seeds still run.
struct RunOutput {
    std::vector<uint64_t> ok_seeds;
    std::vector<uint64_t> failed_seeds;
    std::optional<ClassReport> averaged;  // absent when every seed failed
};

RunOutput run(const RunConfig& cfg, const std::string& out_dir);

// Dependency metrics and plots for a treated run against a vanilla run over
// the same dataset (hash-checked).
DependencyReport compare(const std::string& vanilla_dir, const std::string& treated_dir,
                         const std::string& out_dir);

struct SweepConfig {
    RunConfig base;
    enum class Axis { kDropMixRate, kAlpha } axis = Axis::kDropMixRate;
    std::vector<double> grid;

    static SweepConfig from_config(const Config& cfg);
    void validate() const;
};

struct SweepOutput {
    std::vector<double> grid;
    std::vector<DependencyReport> reports;  // one per grid value
    double selected = 0.0;
    std::string selection_rule;  // best_accuracy | dependency_fallback
};

// Runs the whole grid against one shared vanilla baseline, emits sweep.csv
// and the three-panel chart, and names the selected rate: the best average
// accuracy when DropMix beats the rate-0 accuracy anywhere, otherwise the
// rate with the best dependency-metric improvement. Ties go to the smallest
// rate and are recorded in the manifest.
SweepOutput sweep(const SweepConfig& cfg, const std::string& out_dir);

// Label-information curves for every class of the run's eval set, one file
// per seed checkpoint, plus a crossing-strength summary.
void analyze_label_info(const std::string& run_dir, const std::vector<double>& lambda_grid,
                        const std::string& out_dir);

// Re-renders every SVG in a directory from its adjacent CSV.
void replot_directory(const std::string& dir);

}  // namespace mixlab
