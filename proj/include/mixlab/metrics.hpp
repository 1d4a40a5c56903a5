#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mixlab/dataset.hpp"
#include "mixlab/model.hpp"

namespace mixlab {

// Per-class evaluation of one trained model (or the seed average of several).
// confidence is the mean predicted-class softmax probability over a class's
// eval samples; true_class_prob is the probability-of-true-class alternative,
// always computed alongside since either reading of "confidence" is
// defensible.
struct ClassReport {
    std::vector<double> recall;
    std::vector<double> confidence;
    std::vector<double> true_class_prob;
    std::vector<size_t> correct_per_class;
    std::vector<size_t> n_eval_per_class;
    std::string condition;  // vanilla | msda | msda+dropmix
    uint64_t seed = 0;

    // Seed-aggregation extras; a single report is its own aggregate of one.
    size_t n_seeds = 1;
    std::vector<double> recall_min;
    std::vector<double> recall_max;
    std::vector<double> per_seed_accuracy;

    size_t n_classes() const { return recall.size(); }
    double accuracy() const;  // total correct / total evaluated

    std::string to_json() const;
    static ClassReport from_json(const std::string& text);
};

// Argmax-based per-class recall and confidence on a balanced eval set. Ties
// in the argmax go to the lowest class index; an empty class is an error.
ClassReport class_recall(const Model& model, const Dataset& eval_set,
                         const std::string& condition, uint64_t seed);

// Per-class arithmetic mean of recall/confidence over same-condition reports,
// retaining the per-class min/max across seeds for band plots.
ClassReport seed_average(const std::vector<ClassReport>& reports);

// The class-dependency metric suite: per-class recall change in percentage
// points, the degraded set (strictly negative change), its size and mean/std,
// the improved-class analogs, and seed-averaged accuracies.
struct DependencyReport {
    std::vector<double> delta_recall_pp;
    std::vector<size_t> degraded_classes;
    std::vector<size_t> improved_classes;
    size_t n_dc = 0;
    size_t n_ic = 0;
    std::optional<double> mean_delta_dc;  // absent when no class degraded
    std::optional<double> std_delta_dc;
    std::optional<double> mean_delta_ic;
    std::optional<double> std_delta_ic;
    double acc_vanilla_mean = 0.0;
    double acc_vanilla_std = 0.0;
    double acc_treated_mean = 0.0;
    double acc_treated_std = 0.0;

    std::string to_json() const;
    static DependencyReport from_json(const std::string& text);
};

DependencyReport dependency_report(const ClassReport& vanilla_avg,
                                   const ClassReport& treated_avg);

// Mean confidence change over the degraded and improved sets, plus the
// per-class pairs behind the confidence-recall scatter.
struct ConfidenceAnalysis {
    std::optional<double> mean_dconf_degraded;
    std::optional<double> mean_dconf_improved;
    std::vector<double> dconf_per_class;
};

ConfidenceAnalysis confidence_analysis(const ClassReport& vanilla_avg,
                                       const ClassReport& treated_avg,
                                       const DependencyReport& report);

// Mean model probability of class a on lam*x_a + (1-lam)*x_b over every
// (x_a, x_b) eval pair, for each lam in the grid. partner_class empty means
// x_b ranges over all other classes (class-vs-pool).
std::vector<double> label_information_curve(const Model& model, const Dataset& eval_set,
                                            size_t class_a,
                                            std::optional<size_t> partner_class,
                                            const std::vector<double>& lambda_grid);

// Mix strength (1 - lambda) at which a curve first drops below the threshold,
// scanning from lambda = 1; linear interpolation between grid points, 0 when
// the curve starts below the threshold.
double crossing_strength(const std::vector<double>& lambda_grid,
                         const std::vector<double>& curve, double threshold = 0.5);

// Per-class comparison table feeding the compare plots:
// class_index, recall_vanilla, recall_treated, delta_pp, confidence_delta, group.
std::string per_class_csv(const ClassReport& vanilla_avg, const ClassReport& treated_avg,
                          const DependencyReport& report,
                          const ConfidenceAnalysis& conf);

}  // namespace mixlab
