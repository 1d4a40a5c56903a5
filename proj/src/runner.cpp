#include "mixlab/runner.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <future>
#include <sstream>

#include "mixlab/manifest.hpp"
#include "mixlab/plots.hpp"
#include "mixlab/util.hpp"

namespace mixlab {

namespace fs = std::filesystem;

namespace {

std::string join_u64(const std::vector<uint64_t>& v) {
    std::ostringstream os;
    for (size_t i = 0; i < v.size(); ++i) {
        if (i) os << ',';
        os << v[i];
    }
    return os.str();
}

std::string join_sizes(const std::vector<size_t>& v) {
    std::ostringstream os;
    for (size_t i = 0; i < v.size(); ++i) {
        if (i) os << ',';
        os << v[i];
    }
    return os.str();
}

std::map<std::string, uint64_t> named_stream_keys() {
    return {{"init", stream_key::kInit},     {"shuffle", stream_key::kShuffle},
            {"mix", stream_key::kMix},       {"drop", stream_key::kDrop},
            {"data_train", stream_key::kDataTrain},
            {"data_eval", stream_key::kDataEval}};
}

}  // namespace

RunConfig RunConfig::from_config(const Config& cfg) {
    RunConfig rc;
    if (cfg.has("dataset.path")) {
        rc.dataset_path = cfg.get_string("dataset.path");
        if (!cfg.has("dataset.eval_path")) {
            throw ValidationError("dataset.path needs a matching dataset.eval_path");
        }
        rc.dataset_eval_path = cfg.get_string("dataset.eval_path");
    }
    rc.frag.n_classes = static_cast<size_t>(cfg.get_int("dataset.classes", 8));
    rc.frag.n_fragile = static_cast<size_t>(cfg.get_int("dataset.fragile", 2));
    rc.frag.overlap = cfg.get_real("dataset.overlap", 0.35);
    rc.frag.magnitude_coding = cfg.get_bool("dataset.magnitude_coding", true);
    rc.frag.n_features = static_cast<size_t>(cfg.get_int("dataset.features", 64));
    rc.train_per_class = static_cast<size_t>(cfg.get_int("dataset.train_per_class", 200));
    rc.eval_per_class = static_cast<size_t>(cfg.get_int("dataset.eval_per_class", 100));
    rc.dataset_seed = static_cast<uint64_t>(cfg.get_int("dataset.seed", 7));

    if (cfg.has("image.h") || cfg.has("image.w") || cfg.has("image.c")) {
        ImageShape img;
        img.c = static_cast<size_t>(cfg.get_int("image.c", 1));
        img.h = static_cast<size_t>(cfg.get_int("image.h"));
        img.w = static_cast<size_t>(cfg.get_int("image.w"));
        rc.image = img;
    }

    rc.hidden.clear();
    for (long h : cfg.get_int_list("model.hidden", {64, 64})) {
        if (h < 1) throw ValidationError("hidden widths must be positive");
        rc.hidden.push_back(static_cast<size_t>(h));
    }

    rc.schedule.epochs = static_cast<size_t>(cfg.get_int("train.epochs", 60));
    rc.schedule.base_lr = cfg.get_real("train.lr", 0.1);
    rc.schedule.decay_factor = cfg.get_real("train.decay_factor", 0.1);
    rc.schedule.decay_epochs.clear();
    for (long e : cfg.get_int_list("train.decay_epochs", {30, 45})) {
        rc.schedule.decay_epochs.push_back(static_cast<size_t>(e));
    }
    rc.schedule.momentum = cfg.get_real("train.momentum", 0.9);
    rc.schedule.weight_decay = cfg.get_real("train.weight_decay", 5e-4);
    rc.schedule.batch_size = static_cast<size_t>(cfg.get_int("train.batch_size", 128));

    const std::string method = cfg.get_string("method", "vanilla");
    rc.method = method == "vanilla" ? MixMethod::kNone : mix_method_from_name(method);
    rc.dropmix.method = rc.method == MixMethod::kNone ? MixMethod::kMixup : rc.method;
    rc.dropmix.alpha = cfg.get_real("msda.alpha", 1.0);
    rc.dropmix.grid = static_cast<size_t>(cfg.get_int("msda.grid", 4));
    rc.dropmix.rate = cfg.get_real("dropmix.rate", 0.0);
    const std::string gran = cfg.get_string("dropmix.granularity", "batch");
    if (gran == "batch") {
        rc.dropmix.granularity = DropGranularity::kBatch;
    } else if (gran == "sample") {
        rc.dropmix.granularity = DropGranularity::kSample;
    } else {
        throw ValidationError("dropmix.granularity must be batch or sample");
    }

    rc.seeds.clear();
    for (long s : cfg.get_int_list("seeds", {1, 2, 3, 4, 5})) {
        rc.seeds.push_back(static_cast<uint64_t>(s));
    }
    rc.log_plans = cfg.get_bool("log_plans", false);
    rc.jobs = static_cast<int>(cfg.get_int("jobs", 1));
    rc.validate();
    return rc;
}

Config RunConfig::to_config() const {
    Config cfg;
    if (dataset_path) {
        cfg.set("dataset.path", *dataset_path);
        cfg.set("dataset.eval_path", *dataset_eval_path);
    }
    cfg.set("dataset.classes", std::to_string(frag.n_classes));
    cfg.set("dataset.fragile", std::to_string(frag.n_fragile));
    cfg.set("dataset.overlap", fmt_double(frag.overlap));
    cfg.set("dataset.magnitude_coding", frag.magnitude_coding ? "true" : "false");
    cfg.set("dataset.features", std::to_string(frag.n_features));
    cfg.set("dataset.train_per_class", std::to_string(train_per_class));
    cfg.set("dataset.eval_per_class", std::to_string(eval_per_class));
    cfg.set("dataset.seed", std::to_string(dataset_seed));
    if (image) {
        cfg.set("image.c", std::to_string(image->c));
        cfg.set("image.h", std::to_string(image->h));
        cfg.set("image.w", std::to_string(image->w));
    }
    cfg.set("model.hidden", join_sizes(hidden));
    cfg.set("train.epochs", std::to_string(schedule.epochs));
    cfg.set("train.lr", fmt_double(schedule.base_lr));
    cfg.set("train.decay_factor", fmt_double(schedule.decay_factor));
    cfg.set("train.decay_epochs", join_sizes(schedule.decay_epochs));
    cfg.set("train.momentum", fmt_double(schedule.momentum));
    cfg.set("train.weight_decay", fmt_double(schedule.weight_decay));
    cfg.set("train.batch_size", std::to_string(schedule.batch_size));
    cfg.set("method", method == MixMethod::kNone ? "vanilla" : mix_method_name(method));
    cfg.set("msda.alpha", fmt_double(dropmix.alpha));
    cfg.set("msda.grid", std::to_string(dropmix.grid));
    cfg.set("dropmix.rate", fmt_double(dropmix.rate));
    cfg.set("dropmix.granularity",
            dropmix.granularity == DropGranularity::kBatch ? "batch" : "sample");
    cfg.set("seeds", join_u64(seeds));
    cfg.set("log_plans", log_plans ? "true" : "false");
    cfg.set("jobs", std::to_string(jobs));
    return cfg;
}

void RunConfig::validate() const {
    frag.validate();
    schedule.validate();
    dropmix.validate();
    if (seeds.empty()) throw ValidationError("seed list is empty");
    std::vector<uint64_t> sorted = seeds;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
        throw ValidationError("seed list contains duplicates");
    }
    if (train_per_class < 1 || eval_per_class < 1) {
        throw ValidationError("per-class sample counts must be positive");
    }
    if (jobs < 1) throw ValidationError("jobs must be at least 1");
}

std::string RunConfig::condition() const {
    if (method == MixMethod::kNone) return "vanilla";
    return dropmix.rate > 0.0 ? "msda+dropmix" : "msda";
}

std::vector<size_t> RunConfig::model_widths() const {
    std::vector<size_t> widths;
    widths.push_back(frag.n_features);
    widths.insert(widths.end(), hidden.begin(), hidden.end());
    widths.push_back(frag.n_classes);
    return widths;
}

DatasetPair prepare_dataset(const RunConfig& cfg) {
    if (cfg.dataset_path) {
        DatasetPair pair{read_dataset(*cfg.dataset_path),
                         read_dataset(*cfg.dataset_eval_path)};
        if (pair.train.n_classes != pair.eval.n_classes ||
            pair.train.n_features() != pair.eval.n_features()) {
            throw ValidationError("train and eval datasets do not match");
        }
        return pair;
    }
    RngStream train_stream(cfg.dataset_seed, stream_key::kDataTrain);
    RngStream eval_stream(cfg.dataset_seed, stream_key::kDataEval);
    return {make_blobs(cfg.frag, cfg.train_per_class, train_stream, Split::kTrain),
            make_blobs(cfg.frag, cfg.eval_per_class, eval_stream, Split::kEval)};
}

AugPipeline build_pipeline(const RunConfig& cfg) {
    if (cfg.method == MixMethod::kNone) return vanilla_pipeline();
    DropMixConfig dm = cfg.dropmix;
    dm.method = cfg.method;
    return dropmix_pipeline(dm);
}

namespace {

struct SeedResult {
    uint64_t seed = 0;
    bool ok = false;
    std::string error;
    ClassReport report;
};

ImageShape effective_image(const RunConfig& cfg, size_t n_features) {
    if (cfg.image) {
        if (cfg.image->pixels() != n_features) {
            throw ValidationError("image geometry does not cover the feature width");
        }
        return *cfg.image;
    }
    const auto side = static_cast<size_t>(std::lround(std::sqrt(
        static_cast<double>(n_features))));
    if (side * side == n_features) return ImageShape{1, side, side};
    throw ValidationError("method needs image geometry; set image.h/image.w");
}

SeedResult run_one_seed(const RunConfig& cfg, const DatasetPair& data,
                        std::optional<ImageShape> image, const AugPipeline& aug,
                        uint64_t seed, const fs::path& seed_dir) {
    SeedResult out;
    out.seed = seed;
    try {
        fs::create_directories(seed_dir);
        RngStream init(seed, stream_key::kInit);
        Model model = Model::random_init(RunConfig(cfg).model_widths(), init);
        TrainResult tr = train(std::move(model), data.train, data.eval, cfg.schedule,
                               aug, seed, image, cfg.log_plans);
        save_model(tr.model, (seed_dir / "checkpoint.mxmd").string());
        write_text_file((seed_dir / "epochs.csv").string(), epoch_log_csv(tr.log));
        if (cfg.log_plans) {
            std::string lines;
            for (const MixPlan& p : tr.plans) lines += p.to_json() + "\n";
            write_text_file((seed_dir / "plans.jsonl").string(), lines);
        }
        out.report = class_recall(tr.model, data.eval, cfg.condition(), seed);
        write_text_file((seed_dir / "report.json").string(), out.report.to_json() + "\n");
        out.ok = true;
    } catch (const DivergenceError& e) {
        out.error = e.what();
    }
    return out;
}

}  // namespace

RunOutput run(const RunConfig& cfg, const std::string& out_dir) {
    cfg.validate();
    fs::create_directories(out_dir);
    const fs::path base(out_dir);

    const Config echo = cfg.to_config();
    write_text_file((base / "config.cfg").string(), echo.canonical_text());

    DatasetPair data = prepare_dataset(cfg);
    write_dataset(data.train, (base / "dataset_train.mxds").string());
    write_dataset(data.eval, (base / "dataset_eval.mxds").string());

    std::optional<ImageShape> image;
    if (cfg.method == MixMethod::kCutMix || cfg.method == MixMethod::kSaliencyGrid ||
        cfg.image) {
        image = effective_image(cfg, data.train.n_features());
    }
    const AugPipeline aug = build_pipeline(cfg);

    std::vector<SeedResult> results(cfg.seeds.size());
    if (cfg.jobs > 1) {
        std::vector<std::future<SeedResult>> futures;
        for (uint64_t seed : cfg.seeds) {
            const fs::path seed_dir = base / ("seed_" + std::to_string(seed));
            futures.push_back(std::async(std::launch::async, run_one_seed, std::cref(cfg),
                                         std::cref(data), image, std::cref(aug), seed,
                                         seed_dir));
        }
        for (size_t i = 0; i < futures.size(); ++i) results[i] = futures[i].get();
    } else {
        for (size_t i = 0; i < cfg.seeds.size(); ++i) {
            const fs::path seed_dir = base / ("seed_" + std::to_string(cfg.seeds[i]));
            results[i] = run_one_seed(cfg, data, image, aug, cfg.seeds[i], seed_dir);
        }
    }

    RunOutput out;
    std::vector<ClassReport> reports;
    for (const SeedResult& r : results) {
        if (r.ok) {
            out.ok_seeds.push_back(r.seed);
            reports.push_back(r.report);
        } else {
            out.failed_seeds.push_back(r.seed);
        }
    }

    Manifest manifest;
    manifest.config_hash = hex64(echo.hash());
    manifest.dataset_hash = hex64(dataset_hash(data.train) ^ (dataset_hash(data.eval) << 1));
    manifest.stream_keys = named_stream_keys();
    manifest.failed_seeds = out.failed_seeds;
    manifest.notes["condition"] = cfg.condition();

    if (!reports.empty()) {
        ClassReport avg = seed_average(reports);
        write_text_file((base / "report_avg.json").string(), avg.to_json() + "\n");
        out.averaged = std::move(avg);
    }

    manifest_add(manifest, out_dir, "config.cfg");
    manifest_add(manifest, out_dir, "dataset_train.mxds");
    manifest_add(manifest, out_dir, "dataset_eval.mxds");
    for (const SeedResult& r : results) {
        if (!r.ok) continue;
        const std::string sd = "seed_" + std::to_string(r.seed);
        manifest_add(manifest, out_dir, sd + "/checkpoint.mxmd");
        manifest_add(manifest, out_dir, sd + "/epochs.csv");
        manifest_add(manifest, out_dir, sd + "/report.json");
        if (cfg.log_plans) manifest_add(manifest, out_dir, sd + "/plans.jsonl");
    }
    if (out.averaged) manifest_add(manifest, out_dir, "report_avg.json");
    save_manifest(manifest, out_dir);
    return out;
}

namespace {

ClassReport load_report(const fs::path& path) {
    return ClassReport::from_json(read_text_file(path.string()));
}

std::vector<ClassReport> load_seed_reports(const std::string& run_dir) {
    const Manifest m = load_manifest(run_dir);
    std::vector<ClassReport> reports;
    for (const Manifest::Artifact& a : m.artifacts) {
        if (a.path.size() > 12 && a.path.substr(0, 5) == "seed_" &&
            a.path.substr(a.path.size() - 11) == "report.json") {
            reports.push_back(load_report(fs::path(run_dir) / a.path));
        }
    }
    if (reports.empty()) throw ValidationError("no seed reports in " + run_dir);
    return reports;
}

std::string band_csv(const ClassReport& vanilla_avg,
                     const std::vector<ClassReport>& treated_seeds) {
    const size_t M = vanilla_avg.n_classes();
    std::vector<double> mean_d(M, 0.0), min_d(M, 1e300), max_d(M, -1e300);
    for (const ClassReport& r : treated_seeds) {
        for (size_t m = 0; m < M; ++m) {
            const double d = (r.recall[m] - vanilla_avg.recall[m]) * 100.0;
            mean_d[m] += d / static_cast<double>(treated_seeds.size());
            min_d[m] = std::min(min_d[m], d);
            max_d[m] = std::max(max_d[m], d);
        }
    }
    std::vector<size_t> order(M);
    for (size_t i = 0; i < M; ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](size_t a, size_t b) { return mean_d[a] > mean_d[b]; });
    std::ostringstream os;
    os << "rank,class_index,delta_mean,delta_min,delta_max\n";
    for (size_t rank = 0; rank < M; ++rank) {
        const size_t m = order[rank];
        os << rank << ',' << m << ',' << fmt_double(mean_d[m]) << ','
           << fmt_double(min_d[m]) << ',' << fmt_double(max_d[m]) << '\n';
    }
    return os.str();
}

}  // namespace

DependencyReport compare(const std::string& vanilla_dir, const std::string& treated_dir,
                         const std::string& out_dir) {
    const Manifest mv = load_manifest(vanilla_dir);
    const Manifest mt = load_manifest(treated_dir);
    if (mv.dataset_hash != mt.dataset_hash) {
        throw ValidationError("dataset hash mismatch (" + mv.dataset_hash + " vs " +
                              mt.dataset_hash + "); runs are not comparable");
    }
    const ClassReport vanilla_avg = load_report(fs::path(vanilla_dir) / "report_avg.json");
    const ClassReport treated_avg = load_report(fs::path(treated_dir) / "report_avg.json");

    const DependencyReport rep = dependency_report(vanilla_avg, treated_avg);
    const ConfidenceAnalysis conf = confidence_analysis(vanilla_avg, treated_avg, rep);

    fs::create_directories(out_dir);
    const fs::path base(out_dir);
    write_text_file((base / "dependency_report.json").string(), rep.to_json() + "\n");

    const std::string per_class = per_class_csv(vanilla_avg, treated_avg, rep, conf);
    write_text_file((base / "per_class.csv").string(), per_class);
    const CsvTable pc = CsvTable::parse(per_class);
    write_text_file((base / "delta_bar.svg").string(),
                    render_delta_bar_chart(pc, "class recall change vs vanilla"));
    write_text_file((base / "confidence_scatter.svg").string(),
                    render_confidence_scatter(pc, "confidence change vs recall change"));

    const std::string band = band_csv(vanilla_avg, load_seed_reports(treated_dir));
    write_text_file((base / "recall_band.csv").string(), band);
    write_text_file((base / "recall_band.svg").string(),
                    render_recall_band(CsvTable::parse(band),
                                       "recall change range across seeds"));

    Manifest manifest;
    manifest.config_hash = hex64(fnv1a64(mv.config_hash + mt.config_hash));
    manifest.dataset_hash = mv.dataset_hash;
    manifest.stream_keys = named_stream_keys();
    manifest.notes["vanilla_condition"] = mv.notes.count("condition")
                                              ? mv.notes.at("condition")
                                              : "vanilla";
    manifest.notes["treated_condition"] = mt.notes.count("condition")
                                              ? mt.notes.at("condition")
                                              : "treated";
    for (const char* f : {"dependency_report.json", "per_class.csv", "delta_bar.svg",
                          "confidence_scatter.svg", "recall_band.csv", "recall_band.svg"}) {
        manifest_add(manifest, out_dir, f);
    }
    save_manifest(manifest, out_dir);
    return rep;
}

SweepConfig SweepConfig::from_config(const Config& cfg) {
    SweepConfig sc;
    sc.base = RunConfig::from_config(cfg);
    const std::string axis = cfg.get_string("sweep.axis", "dropmix_rate");
    if (axis == "dropmix_rate") {
        sc.axis = Axis::kDropMixRate;
    } else if (axis == "alpha") {
        sc.axis = Axis::kAlpha;
    } else {
        throw ValidationError("sweep.axis must be dropmix_rate or alpha");
    }
    sc.grid = cfg.get_real_list("sweep.grid", {0.0, 0.2, 0.4, 0.6, 0.8, 1.0});
    sc.validate();
    return sc;
}

void SweepConfig::validate() const {
    base.validate();
    if (grid.empty()) throw ValidationError("sweep grid is empty");
    for (size_t i = 0; i < grid.size(); ++i) {
        if (axis == Axis::kDropMixRate && (grid[i] < 0.0 || grid[i] > 1.0)) {
            throw ValidationError("DropMix rates must lie in [0,1]");
        }
        if (axis == Axis::kAlpha && !(grid[i] > 0.0)) {
            throw ValidationError("alpha grid values must be positive");
        }
        if (i > 0 && !(grid[i] > grid[i - 1])) {
            throw ValidationError("sweep grid must be sorted and distinct");
        }
    }
    if (base.method == MixMethod::kNone && axis == Axis::kDropMixRate) {
        throw ValidationError("a DropMix sweep needs an MSDA method");
    }
}

SweepOutput sweep(const SweepConfig& cfg, const std::string& out_dir) {
    cfg.validate();
    fs::create_directories(out_dir);
    const fs::path base(out_dir);

    // Shared vanilla baseline: Eq. 1 needs one common R_vanilla per seed set.
    RunConfig vanilla_cfg = cfg.base;
    vanilla_cfg.method = MixMethod::kNone;
    vanilla_cfg.dropmix.rate = 0.0;
    const std::string vanilla_dir = (base / "vanilla").string();
    RunOutput vanilla_out = run(vanilla_cfg, vanilla_dir);
    if (!vanilla_out.averaged) throw ValidationError("vanilla baseline failed entirely");

    const bool rate_axis = cfg.axis == SweepConfig::Axis::kDropMixRate;

    // The selection rule references the rate-0 (pure MSDA) accuracy; train it
    // as a reference when the grid skips it.
    std::optional<DependencyReport> ref_report;
    if (rate_axis &&
        std::find(cfg.grid.begin(), cfg.grid.end(), 0.0) == cfg.grid.end()) {
        RunConfig ref_cfg = cfg.base;
        ref_cfg.method = cfg.base.method;
        ref_cfg.dropmix.rate = 0.0;
        RunOutput ref_out = run(ref_cfg, (base / "ref_rate_0").string());
        if (ref_out.averaged) {
            ref_report = dependency_report(*vanilla_out.averaged, *ref_out.averaged);
        }
    }

    SweepOutput out;
    out.grid = cfg.grid;
    std::ostringstream csv;
    csv << "rate,acc_mean,acc_std,n_dc,mean_delta_dc,std_delta_dc\n";

    for (double v : cfg.grid) {
        RunConfig point = cfg.base;
        std::string dir_name;
        double x = v;
        if (rate_axis) {
            point.dropmix.rate = v;
            dir_name = "rate_" + fmt_double(v);
        } else {
            point.method = MixMethod::kMixup;
            point.dropmix.rate = 0.0;
            point.dropmix.alpha = v;
            dir_name = "alpha_" + fmt_double(v);
            x = 1.0 - v;  // aligns the strength axis with the DropMix rate
        }
        RunOutput point_out = run(point, (base / dir_name).string());
        if (!point_out.averaged) {
            throw ValidationError("sweep point " + dir_name + " failed entirely");
        }
        DependencyReport rep = dependency_report(*vanilla_out.averaged,
                                                 *point_out.averaged);
        csv << fmt_double(x) << ',' << fmt_double(rep.acc_treated_mean) << ','
            << fmt_double(rep.acc_treated_std) << ',' << rep.n_dc << ','
            << fmt_double(rep.mean_delta_dc.value_or(0.0)) << ','
            << fmt_double(rep.std_delta_dc.value_or(0.0)) << '\n';
        out.reports.push_back(std::move(rep));
    }

    // Reference point for "did DropMix gain accuracy anywhere": rate 0 when
    // present in the grid, the implicit reference run otherwise.
    const DependencyReport* ref = nullptr;
    if (rate_axis) {
        for (size_t i = 0; i < cfg.grid.size(); ++i) {
            if (cfg.grid[i] == 0.0) ref = &out.reports[i];
        }
        if (!ref && ref_report) ref = &*ref_report;
    }

    size_t best = 0;
    bool tie = false;
    for (size_t i = 1; i < out.reports.size(); ++i) {
        if (out.reports[i].acc_treated_mean > out.reports[best].acc_treated_mean) {
            best = i;
            tie = false;
        } else if (out.reports[i].acc_treated_mean == out.reports[best].acc_treated_mean) {
            tie = true;  // keep the smaller rate
        }
    }

    if (!ref || out.reports[best].acc_treated_mean > ref->acc_treated_mean) {
        out.selected = cfg.grid[best];
        out.selection_rule = "best_accuracy";
    } else {
        // No accuracy gain over pure MSDA: fall back to the point with the
        // best dependency mitigation (fewest degraded classes, then mean
        // recall change closest to zero, then the smallest rate).
        out.selection_rule = "dependency_fallback";
        size_t pick = 0;
        bool found = false;
        for (size_t i = 0; i < out.reports.size(); ++i) {
            if (rate_axis && cfg.grid[i] == 0.0) continue;
            const DependencyReport& r = out.reports[i];
            const bool improves =
                r.n_dc < ref->n_dc ||
                (r.mean_delta_dc && ref->mean_delta_dc &&
                 *r.mean_delta_dc > *ref->mean_delta_dc);
            if (!improves) continue;
            if (!found) {
                pick = i;
                found = true;
                continue;
            }
            const DependencyReport& b = out.reports[pick];
            if (r.n_dc != b.n_dc ? r.n_dc < b.n_dc
                                 : r.mean_delta_dc.value_or(0.0) >
                                       b.mean_delta_dc.value_or(0.0)) {
                pick = i;
            }
        }
        out.selected = found ? cfg.grid[pick] : cfg.grid[best];
        if (!found) out.selection_rule = "none_improved";
    }

    const std::string sweep_table = csv.str();
    write_text_file((base / "sweep.csv").string(), sweep_table);
    write_text_file((base / "sweep_panels.svg").string(),
                    render_sweep_panels(CsvTable::parse(sweep_table),
                                        rate_axis ? "metrics vs DropMix rate"
                                                  : "metrics vs 1 - alpha"));
    std::string reports_json = "[\n";
    for (size_t i = 0; i < out.reports.size(); ++i) {
        reports_json += out.reports[i].to_json();
        if (i + 1 < out.reports.size()) reports_json += ",";
        reports_json += "\n";
    }
    reports_json += "]\n";
    write_text_file((base / "sweep_report.json").string(), reports_json);

    Manifest manifest = load_manifest(vanilla_dir);
    manifest.artifacts.clear();
    manifest.notes.clear();
    manifest.notes["selected"] = fmt_double(out.selected);
    manifest.notes["selection_rule"] = out.selection_rule;
    if (tie) manifest.notes["accuracy_tie"] = "smallest rate kept";
    manifest_add(manifest, out_dir, "sweep.csv");
    manifest_add(manifest, out_dir, "sweep_panels.svg");
    manifest_add(manifest, out_dir, "sweep_report.json");
    save_manifest(manifest, out_dir);
    return out;
}

void analyze_label_info(const std::string& run_dir, const std::vector<double>& lambda_grid,
                        const std::string& out_dir) {
    if (lambda_grid.size() < 2) throw ValidationError("lambda grid needs >= 2 points");
    const fs::path run_base(run_dir);
    const Config run_cfg = Config::load((run_base / "config.cfg").string());
    const RunConfig rc = RunConfig::from_config(run_cfg);
    const Dataset eval_set = read_dataset((run_base / "dataset_eval.mxds").string());

    fs::create_directories(out_dir);
    const fs::path base(out_dir);

    std::vector<double> grid = lambda_grid;
    std::sort(grid.begin(), grid.end());

    std::ostringstream crossings;
    crossings << "seed,class_index,group,crossing_strength\n";

    const Manifest m = load_manifest(run_dir);
    Manifest out_manifest;
    out_manifest.config_hash = m.config_hash;
    out_manifest.dataset_hash = m.dataset_hash;
    out_manifest.stream_keys = m.stream_keys;

    size_t n_seeds_done = 0;
    for (const Manifest::Artifact& a : m.artifacts) {
        if (a.path.substr(0, 5) != "seed_" ||
            a.path.find("checkpoint.mxmd") == std::string::npos) {
            continue;
        }
        const std::string seed_token = a.path.substr(5, a.path.find('/') - 5);
        const Model model = load_model((run_base / a.path).string());

        std::ostringstream csv;
        csv << "strength";
        std::vector<std::vector<double>> curves(eval_set.n_classes);
        for (size_t cls = 0; cls < eval_set.n_classes; ++cls) {
            const bool fragile = rc.frag.magnitude_coding && rc.frag.is_fragile(cls);
            csv << ",class" << cls << '_' << (fragile ? "fragile" : "robust");
            curves[cls] = label_information_curve(model, eval_set, cls, std::nullopt, grid);
            crossings << seed_token << ',' << cls << ','
                      << (fragile ? "fragile" : "robust") << ','
                      << fmt_double(crossing_strength(grid, curves[cls])) << '\n';
        }
        csv << '\n';
        for (size_t g = grid.size(); g-- > 0;) {  // ascending strength order
            csv << fmt_double(1.0 - grid[g]);
            for (size_t cls = 0; cls < eval_set.n_classes; ++cls) {
                csv << ',' << fmt_double(curves[cls][g]);
            }
            csv << '\n';
        }
        const std::string csv_name = "labelinfo_seed_" + seed_token + ".csv";
        const std::string svg_name = "labelinfo_seed_" + seed_token + ".svg";
        write_text_file((base / csv_name).string(), csv.str());
        write_text_file((base / svg_name).string(),
                        render_label_info(CsvTable::parse(csv.str()),
                                          "label information vs mix strength"));
        manifest_add(out_manifest, out_dir, csv_name);
        manifest_add(out_manifest, out_dir, svg_name);
        ++n_seeds_done;
    }
    if (n_seeds_done == 0) throw ValidationError("run has no checkpoints: " + run_dir);

    write_text_file((base / "crossings.csv").string(), crossings.str());
    manifest_add(out_manifest, out_dir, "crossings.csv");
    save_manifest(out_manifest, out_dir);
}

void replot_directory(const std::string& dir) {
    bool any = false;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        const std::string name = entry.path().filename().string();
        const std::string full = entry.path().string();
        if (name == "per_class.csv") {
            const CsvTable pc = CsvTable::load(full);
            write_text_file((fs::path(dir) / "delta_bar.svg").string(),
                            render_delta_bar_chart(pc, "class recall change vs vanilla"));
            write_text_file((fs::path(dir) / "confidence_scatter.svg").string(),
                            render_confidence_scatter(
                                pc, "confidence change vs recall change"));
            any = true;
        } else if (name == "recall_band.csv") {
            write_text_file((fs::path(dir) / "recall_band.svg").string(),
                            render_recall_band(CsvTable::load(full),
                                               "recall change range across seeds"));
            any = true;
        } else if (name == "sweep.csv") {
            write_text_file((fs::path(dir) / "sweep_panels.svg").string(),
                            render_sweep_panels(CsvTable::load(full),
                                                "metrics vs DropMix rate"));
            any = true;
        } else if (name.rfind("labelinfo_", 0) == 0 &&
                   name.size() > 4 && name.substr(name.size() - 4) == ".csv") {
            const std::string svg = name.substr(0, name.size() - 4) + ".svg";
            write_text_file((fs::path(dir) / svg).string(),
                            render_label_info(CsvTable::load(full),
                                              "label information vs mix strength"));
            any = true;
        }
    }
    if (!any) throw ValidationError("no plottable CSV files in " + dir);
}

}  // namespace mixlab
