#include "mixlab/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <json.hpp>

#include "mixlab/util.hpp"

namespace mixlab {

using nlohmann::json;

double ClassReport::accuracy() const {
    size_t correct = 0, total = 0;
    for (size_t m = 0; m < n_classes(); ++m) {
        correct += correct_per_class[m];
        total += n_eval_per_class[m];
    }
    if (total == 0) throw ValidationError("report covers no eval samples");
    return static_cast<double>(correct) / static_cast<double>(total);
}

std::string ClassReport::to_json() const {
    json j;
    j["recall"] = recall;
    j["confidence"] = confidence;
    j["true_class_prob"] = true_class_prob;
    j["correct_per_class"] = correct_per_class;
    j["n_eval_per_class"] = n_eval_per_class;
    j["condition"] = condition;
    j["seed"] = seed;
    j["n_seeds"] = n_seeds;
    j["recall_min"] = recall_min;
    j["recall_max"] = recall_max;
    j["per_seed_accuracy"] = per_seed_accuracy;
    return j.dump(2);
}

ClassReport ClassReport::from_json(const std::string& text) {
    json j = json::parse(text);
    ClassReport r;
    r.recall = j.at("recall").get<std::vector<double>>();
    r.confidence = j.at("confidence").get<std::vector<double>>();
    r.true_class_prob = j.at("true_class_prob").get<std::vector<double>>();
    r.correct_per_class = j.at("correct_per_class").get<std::vector<size_t>>();
    r.n_eval_per_class = j.at("n_eval_per_class").get<std::vector<size_t>>();
    r.condition = j.at("condition").get<std::string>();
    r.seed = j.at("seed").get<uint64_t>();
    r.n_seeds = j.at("n_seeds").get<size_t>();
    r.recall_min = j.at("recall_min").get<std::vector<double>>();
    r.recall_max = j.at("recall_max").get<std::vector<double>>();
    r.per_seed_accuracy = j.at("per_seed_accuracy").get<std::vector<double>>();
    return r;
}

ClassReport class_recall(const Model& model, const Dataset& eval_set,
                         const std::string& condition, uint64_t seed) {
    eval_set.validate();
    if (model.n_classes() != eval_set.n_classes) {
        throw ShapeError("model output width does not match the eval class count");
    }
    const size_t M = eval_set.n_classes;
    const std::vector<size_t> counts = eval_set.per_class_counts();
    for (size_t m = 0; m < M; ++m) {
        if (counts[m] == 0) {
            throw ValidationError("class " + std::to_string(m) +
                                  " has no eval samples; balanced splits required");
        }
    }

    const Tensor probs = model.forward(eval_set.features);
    const std::vector<size_t> pred = argmax_rows(probs);

    ClassReport r;
    r.condition = condition;
    r.seed = seed;
    r.correct_per_class.assign(M, 0);
    r.n_eval_per_class = counts;
    std::vector<double> conf_sum(M, 0.0), true_sum(M, 0.0);
    for (size_t i = 0; i < eval_set.n_samples(); ++i) {
        const size_t cls = eval_set.labels[i];
        if (pred[i] == cls) ++r.correct_per_class[cls];
        conf_sum[cls] += probs.row(i)[pred[i]];
        true_sum[cls] += probs.row(i)[cls];
    }
    r.recall.resize(M);
    r.confidence.resize(M);
    r.true_class_prob.resize(M);
    for (size_t m = 0; m < M; ++m) {
        r.recall[m] = static_cast<double>(r.correct_per_class[m]) /
                      static_cast<double>(counts[m]);
        r.confidence[m] = conf_sum[m] / static_cast<double>(counts[m]);
        r.true_class_prob[m] = true_sum[m] / static_cast<double>(counts[m]);
    }
    r.recall_min = r.recall;
    r.recall_max = r.recall;
    r.per_seed_accuracy = {r.accuracy()};
    return r;
}

ClassReport seed_average(const std::vector<ClassReport>& reports) {
    if (reports.empty()) throw ValidationError("seed_average needs at least one report");
    const ClassReport& first = reports.front();
    const size_t M = first.n_classes();
    for (const ClassReport& r : reports) {
        if (r.condition != first.condition) {
            throw ValidationError("cannot average reports with mixed conditions: '" +
                                  first.condition + "' vs '" + r.condition + "'");
        }
        if (r.n_classes() != M || r.n_eval_per_class != first.n_eval_per_class) {
            throw ValidationError("cannot average reports with mismatched shapes");
        }
    }
    if (reports.size() == 1) return first;

    ClassReport avg;
    avg.condition = first.condition;
    avg.seed = 0;
    avg.n_seeds = reports.size();
    avg.n_eval_per_class = first.n_eval_per_class;
    avg.correct_per_class.assign(M, 0);  // totals across seeds, for accuracy()
    avg.recall.assign(M, 0.0);
    avg.confidence.assign(M, 0.0);
    avg.true_class_prob.assign(M, 0.0);
    avg.recall_min.assign(M, 1.0);
    avg.recall_max.assign(M, 0.0);
    const double inv = 1.0 / static_cast<double>(reports.size());
    for (const ClassReport& r : reports) {
        for (size_t m = 0; m < M; ++m) {
            avg.recall[m] += r.recall[m] * inv;
            avg.confidence[m] += r.confidence[m] * inv;
            avg.true_class_prob[m] += r.true_class_prob[m] * inv;
            avg.recall_min[m] = std::min(avg.recall_min[m], r.recall[m]);
            avg.recall_max[m] = std::max(avg.recall_max[m], r.recall[m]);
            avg.correct_per_class[m] += r.correct_per_class[m];
        }
        avg.per_seed_accuracy.push_back(r.accuracy());
    }
    // Keep n_eval consistent with the pooled correct counts.
    for (size_t m = 0; m < M; ++m) avg.n_eval_per_class[m] *= reports.size();
    return avg;
}

std::string DependencyReport::to_json() const {
    json j;
    j["delta_recall_pp"] = delta_recall_pp;
    j["degraded_classes"] = degraded_classes;
    j["improved_classes"] = improved_classes;
    j["n_dc"] = n_dc;
    j["n_ic"] = n_ic;
    if (mean_delta_dc) j["mean_delta_dc"] = *mean_delta_dc;
    if (std_delta_dc) j["std_delta_dc"] = *std_delta_dc;
    if (mean_delta_ic) j["mean_delta_ic"] = *mean_delta_ic;
    if (std_delta_ic) j["std_delta_ic"] = *std_delta_ic;
    j["acc_vanilla_mean"] = acc_vanilla_mean;
    j["acc_vanilla_std"] = acc_vanilla_std;
    j["acc_treated_mean"] = acc_treated_mean;
    j["acc_treated_std"] = acc_treated_std;
    return j.dump(2);
}

DependencyReport DependencyReport::from_json(const std::string& text) {
    json j = json::parse(text);
    DependencyReport r;
    r.delta_recall_pp = j.at("delta_recall_pp").get<std::vector<double>>();
    r.degraded_classes = j.at("degraded_classes").get<std::vector<size_t>>();
    r.improved_classes = j.at("improved_classes").get<std::vector<size_t>>();
    r.n_dc = j.at("n_dc").get<size_t>();
    r.n_ic = j.at("n_ic").get<size_t>();
    if (j.contains("mean_delta_dc")) r.mean_delta_dc = j["mean_delta_dc"].get<double>();
    if (j.contains("std_delta_dc")) r.std_delta_dc = j["std_delta_dc"].get<double>();
    if (j.contains("mean_delta_ic")) r.mean_delta_ic = j["mean_delta_ic"].get<double>();
    if (j.contains("std_delta_ic")) r.std_delta_ic = j["std_delta_ic"].get<double>();
    r.acc_vanilla_mean = j.at("acc_vanilla_mean").get<double>();
    r.acc_vanilla_std = j.at("acc_vanilla_std").get<double>();
    r.acc_treated_mean = j.at("acc_treated_mean").get<double>();
    r.acc_treated_std = j.at("acc_treated_std").get<double>();
    return r;
}

DependencyReport dependency_report(const ClassReport& vanilla_avg,
                                   const ClassReport& treated_avg) {
    const size_t M = vanilla_avg.n_classes();
    if (treated_avg.n_classes() != M) {
        throw ValidationError("class-count mismatch: " + std::to_string(M) + " vs " +
                              std::to_string(treated_avg.n_classes()));
    }
    DependencyReport rep;
    rep.delta_recall_pp.resize(M);
    std::vector<double> dc_values, ic_values;
    for (size_t m = 0; m < M; ++m) {
        rep.delta_recall_pp[m] = (treated_avg.recall[m] - vanilla_avg.recall[m]) * 100.0;
        if (rep.delta_recall_pp[m] < 0.0) {
            rep.degraded_classes.push_back(m);
            dc_values.push_back(rep.delta_recall_pp[m]);
        } else if (rep.delta_recall_pp[m] > 0.0) {
            rep.improved_classes.push_back(m);
            ic_values.push_back(rep.delta_recall_pp[m]);
        }
    }
    rep.n_dc = rep.degraded_classes.size();
    rep.n_ic = rep.improved_classes.size();
    if (!dc_values.empty()) {
        rep.mean_delta_dc = mean(dc_values);
        rep.std_delta_dc = stddev_pop(dc_values);
    }
    if (!ic_values.empty()) {
        rep.mean_delta_ic = mean(ic_values);
        rep.std_delta_ic = stddev_pop(ic_values);
    }
    rep.acc_vanilla_mean = mean(vanilla_avg.per_seed_accuracy);
    rep.acc_vanilla_std = stddev_pop(vanilla_avg.per_seed_accuracy);
    rep.acc_treated_mean = mean(treated_avg.per_seed_accuracy);
    rep.acc_treated_std = stddev_pop(treated_avg.per_seed_accuracy);
    return rep;
}

ConfidenceAnalysis confidence_analysis(const ClassReport& vanilla_avg,
                                       const ClassReport& treated_avg,
                                       const DependencyReport& report) {
    const size_t M = vanilla_avg.n_classes();
    if (treated_avg.n_classes() != M || report.delta_recall_pp.size() != M) {
        throw ValidationError("confidence_analysis inputs are inconsistent");
    }
    ConfidenceAnalysis out;
    out.dconf_per_class.resize(M);
    for (size_t m = 0; m < M; ++m) {
        out.dconf_per_class[m] = treated_avg.confidence[m] - vanilla_avg.confidence[m];
    }
    auto group_mean = [&](const std::vector<size_t>& classes) -> std::optional<double> {
        if (classes.empty()) return std::nullopt;
        double s = 0.0;
        for (size_t m : classes) s += out.dconf_per_class[m];
        return s / static_cast<double>(classes.size());
    };
    out.mean_dconf_degraded = group_mean(report.degraded_classes);
    out.mean_dconf_improved = group_mean(report.improved_classes);
    return out;
}

std::vector<double> label_information_curve(const Model& model, const Dataset& eval_set,
                                            size_t class_a,
                                            std::optional<size_t> partner_class,
                                            const std::vector<double>& lambda_grid) {
    eval_set.validate();
    if (class_a >= eval_set.n_classes) throw ValidationError("class index out of range");
    if (partner_class && *partner_class >= eval_set.n_classes) {
        throw ValidationError("partner class index out of range");
    }
    for (double lam : lambda_grid) {
        if (lam < 0.0 || lam > 1.0) throw ValidationError("lambda grid must lie in [0,1]");
    }

    std::vector<size_t> a_rows, b_rows;
    for (size_t i = 0; i < eval_set.n_samples(); ++i) {
        if (eval_set.labels[i] == class_a) {
            a_rows.push_back(i);
        } else if (!partner_class || eval_set.labels[i] == *partner_class) {
            b_rows.push_back(i);
        }
    }
    if (a_rows.empty()) {
        throw ValidationError("class " + std::to_string(class_a) + " has no eval samples");
    }
    if (b_rows.empty()) throw ValidationError("partner pool has no eval samples");

    // Deterministic pairing: every a-sample against every b-sample would be
    // quadratic, so each a-row meets a fixed stride of b-rows instead.
    const size_t partners = std::min<size_t>(b_rows.size(), 32);
    const size_t fdim = eval_set.n_features();
    std::vector<std::pair<size_t, size_t>> pairs;
    for (size_t ai = 0; ai < a_rows.size(); ++ai) {
        for (size_t k = 0; k < partners; ++k) {
            pairs.emplace_back(a_rows[ai], b_rows[(ai * partners + k) % b_rows.size()]);
        }
    }

    std::vector<double> curve(lambda_grid.size(), 0.0);
    Tensor mixed({pairs.size(), fdim});
    for (size_t g = 0; g < lambda_grid.size(); ++g) {
        const double lam = lambda_grid[g];
        for (size_t p = 0; p < pairs.size(); ++p) {
            const double* xa = eval_set.features.row(pairs[p].first);
            const double* xb = eval_set.features.row(pairs[p].second);
            double* dst = mixed.row(p);
            for (size_t j = 0; j < fdim; ++j) {
                dst[j] = lam * xa[j] + (1.0 - lam) * xb[j];
            }
        }
        const Tensor probs = model.forward(mixed);
        double sum = 0.0;
        for (size_t p = 0; p < pairs.size(); ++p) sum += probs.row(p)[class_a];
        curve[g] = sum / static_cast<double>(pairs.size());
    }
    return curve;
}

double crossing_strength(const std::vector<double>& lambda_grid,
                         const std::vector<double>& curve, double threshold) {
    if (lambda_grid.size() != curve.size() || lambda_grid.size() < 2) {
        throw ValidationError("crossing_strength needs matching grids of >= 2 points");
    }
    // Walk from lambda = 1 (strength 0) toward lambda = 0.
    std::vector<size_t> order(lambda_grid.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](size_t a, size_t b) { return lambda_grid[a] > lambda_grid[b]; });

    double prev_strength = 1.0 - lambda_grid[order[0]];
    double prev_value = curve[order[0]];
    if (prev_value < threshold) return prev_strength;
    for (size_t i = 1; i < order.size(); ++i) {
        const double strength = 1.0 - lambda_grid[order[i]];
        const double value = curve[order[i]];
        if (value < threshold) {
            const double t = (prev_value - threshold) / (prev_value - value);
            return prev_strength + t * (strength - prev_strength);
        }
        prev_strength = strength;
        prev_value = value;
    }
    return 1.0;  // never crosses within the grid
}

std::string per_class_csv(const ClassReport& vanilla_avg, const ClassReport& treated_avg,
                          const DependencyReport& report,
                          const ConfidenceAnalysis& conf) {
    std::ostringstream os;
    os << "class_index,recall_vanilla,recall_treated,delta_pp,confidence_delta,group\n";
    for (size_t m = 0; m < report.delta_recall_pp.size(); ++m) {
        const char* group = report.delta_recall_pp[m] < 0.0
                                ? "degraded"
                                : (report.delta_recall_pp[m] > 0.0 ? "improved" : "unchanged");
        os << m << ',' << fmt_double(vanilla_avg.recall[m]) << ','
           << fmt_double(treated_avg.recall[m]) << ','
           << fmt_double(report.delta_recall_pp[m]) << ','
           << fmt_double(conf.dconf_per_class[m]) << ',' << group << '\n';
    }
    return os.str();
}

}  // namespace mixlab
