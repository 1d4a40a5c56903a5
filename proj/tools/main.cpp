// mixlab command line: dataset generation, training runs, comparisons,
// DropMix-rate and alpha sweeps, label-information analysis, plotting, and
// manifest verification. Exit codes: 0 success, 2 validation/format error,
// 3 failed run.

#include <filesystem>
#include <iostream>

#include <CLI11.hpp>

#include "mixlab/kernels.hpp"
#include "mixlab/manifest.hpp"
#include "mixlab/runner.hpp"
#include "mixlab/util.hpp"

namespace fs = std::filesystem;
using namespace mixlab;

namespace {

Config load_config_or_default(const std::string& path) {
    return path.empty() ? Config() : Config::load(path);
}

int cmd_gen_data(const std::string& config_path, const std::string& out_dir,
                 const std::string& cifar_path, long cifar_classes,
                 const std::string& split_name) {
    fs::create_directories(out_dir);
    if (!cifar_path.empty()) {
        const Split split = split_name == "eval" ? Split::kEval : Split::kTrain;
        CifarIngest ingest =
            ingest_cifar_binary(cifar_path, static_cast<size_t>(cifar_classes), split);
        const std::string name = split == Split::kEval ? "dataset_eval" : "dataset_train";
        write_dataset(ingest.dataset, (fs::path(out_dir) / (name + ".mxds")).string());
        std::string meta = "{\n  \"channel_mean\": [";
        for (int c = 0; c < 3; ++c) {
            meta += fmt_double(ingest.channel_mean[c]);
            if (c < 2) meta += ", ";
        }
        meta += "],\n  \"channel_std\": [";
        for (int c = 0; c < 3; ++c) {
            meta += fmt_double(ingest.channel_std[c]);
            if (c < 2) meta += ", ";
        }
        meta += "]\n}\n";
        write_text_file((fs::path(out_dir) / (name + ".norm.json")).string(), meta);
        std::cout << "wrote " << name << ".mxds (" << ingest.dataset.n_samples()
                  << " samples) and normalization constants\n";
        return 0;
    }
    const RunConfig rc = RunConfig::from_config(load_config_or_default(config_path));
    const DatasetPair pair = prepare_dataset(rc);
    write_dataset(pair.train, (fs::path(out_dir) / "dataset_train.mxds").string());
    write_dataset(pair.eval, (fs::path(out_dir) / "dataset_eval.mxds").string());
    std::cout << "wrote dataset_train.mxds (" << pair.train.n_samples()
              << " samples) and dataset_eval.mxds (" << pair.eval.n_samples()
              << " samples)\n";
    return 0;
}

int cmd_train(const std::string& config_path, const std::string& out_dir) {
    const RunConfig rc = RunConfig::from_config(load_config_or_default(config_path));
    const RunOutput out = run(rc, out_dir);
    for (uint64_t s : out.ok_seeds) std::cout << "seed " << s << ": ok\n";
    for (uint64_t s : out.failed_seeds) std::cout << "seed " << s << ": FAILED\n";
    if (out.averaged) {
        std::cout << "averaged accuracy: " << fmt_double(out.averaged->accuracy())
                  << " over " << out.ok_seeds.size() << " seeds\n";
    }
    return out.failed_seeds.empty() ? 0 : 3;
}

int cmd_evaluate(const std::string& checkpoint, const std::string& data,
                 const std::string& out_dir, const std::string& condition, long seed) {
    const Model model = load_model(checkpoint);
    const Dataset eval_set = read_dataset(data);
    const ClassReport report =
        class_recall(model, eval_set, condition, static_cast<uint64_t>(seed));
    fs::create_directories(out_dir);
    write_text_file((fs::path(out_dir) / "report.json").string(),
                    report.to_json() + "\n");
    std::cout << "accuracy: " << fmt_double(report.accuracy()) << "\n";
    return 0;
}

int cmd_compare(const std::string& vanilla_dir, const std::string& treated_dir,
                const std::string& out_dir) {
    const DependencyReport rep = compare(vanilla_dir, treated_dir, out_dir);
    std::cout << "N_DC = " << rep.n_dc;
    if (rep.mean_delta_dc) {
        std::cout << ", mean dR_DC = " << fmt_double(*rep.mean_delta_dc) << " pp";
    }
    std::cout << ", N_IC = " << rep.n_ic << "\n"
              << "accuracy: vanilla " << fmt_double(rep.acc_vanilla_mean) << " -> treated "
              << fmt_double(rep.acc_treated_mean) << "\n";
    return 0;
}

int cmd_sweep(const std::string& config_path, const std::string& out_dir) {
    const SweepConfig sc = SweepConfig::from_config(load_config_or_default(config_path));
    const SweepOutput out = sweep(sc, out_dir);
    std::cout << "selected " << fmt_double(out.selected) << " (" << out.selection_rule
              << ")\n";
    return 0;
}

int cmd_labelinfo(const std::string& run_dir, const std::string& config_path,
                  const std::string& out_dir) {
    const Config cfg = load_config_or_default(config_path);
    std::vector<double> grid =
        cfg.get_real_list("labelinfo.grid", {0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7,
                                             0.8, 0.9, 1.0});
    analyze_label_info(run_dir, grid, out_dir);
    std::cout << "wrote label-information curves to " << out_dir << "\n";
    return 0;
}

int cmd_plot(const std::string& in_dir) {
    replot_directory(in_dir);
    std::cout << "re-rendered plots in " << in_dir << "\n";
    return 0;
}

int cmd_verify(const std::string& in_dir) {
    const std::vector<std::string> problems = verify_manifest(in_dir);
    if (problems.empty()) {
        std::cout << "manifest verified: all artifacts match\n";
        return 0;
    }
    for (const std::string& p : problems) std::cerr << "mismatch: " << p << "\n";
    return 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"mixlab: class-dependency laboratory for mixed sample data augmentation"};
    app.require_subcommand(1);

    std::string config_path, out_dir = "out";
    std::string cifar_path, split_name = "train";
    long cifar_classes = 10;
    std::string checkpoint, data, condition = "vanilla";
    long seed = 0;
    std::string vanilla_dir, treated_dir, run_dir, in_dir;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "config file (flat key = value)");
        sub->add_option("--out", out_dir, "output directory");
    };

    CLI::App* gen = app.add_subcommand("gen-data", "generate or ingest a dataset");
    add_common(gen);
    gen->add_option("--cifar", cifar_path, "ingest a CIFAR binary file instead");
    gen->add_option("--cifar-classes", cifar_classes, "10 or 100")
        ->check(CLI::IsMember({10, 100}));
    gen->add_option("--split", split_name, "train or eval")
        ->check(CLI::IsMember({"train", "eval"}));

    CLI::App* tr = app.add_subcommand("train", "train one configuration across seeds");
    add_common(tr);

    CLI::App* ev = app.add_subcommand("evaluate", "evaluate a checkpoint on a dataset");
    add_common(ev);
    ev->add_option("--checkpoint", checkpoint, "MXMD checkpoint")->required();
    ev->add_option("--data", data, ".mxds eval set")->required();
    ev->add_option("--condition", condition, "condition tag for the report");
    ev->add_option("--seed", seed, "seed tag for the report");

    CLI::App* cp = app.add_subcommand("compare", "dependency report for two runs");
    add_common(cp);
    cp->add_option("--vanilla", vanilla_dir, "vanilla run directory")->required();
    cp->add_option("--treated", treated_dir, "treated run directory")->required();

    CLI::App* sw = app.add_subcommand("sweep", "DropMix-rate or alpha sweep");
    add_common(sw);

    CLI::App* li = app.add_subcommand("analyze-labelinfo",
                                      "label-information curves for a finished run");
    add_common(li);
    li->add_option("--run", run_dir, "run directory")->required();

    CLI::App* pl = app.add_subcommand("plot", "re-render SVGs from adjacent CSVs");
    add_common(pl);
    pl->add_option("--in", in_dir, "directory with CSV tables")->required();

    CLI::App* vm = app.add_subcommand("verify-manifest", "recompute artifact hashes");
    add_common(vm);
    vm->add_option("--in", in_dir, "run directory")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) {
            return cmd_gen_data(config_path, out_dir, cifar_path, cifar_classes,
                                split_name);
        }
        if (tr->parsed()) return cmd_train(config_path, out_dir);
        if (ev->parsed()) return cmd_evaluate(checkpoint, data, out_dir, condition, seed);
        if (cp->parsed()) return cmd_compare(vanilla_dir, treated_dir, out_dir);
        if (sw->parsed()) return cmd_sweep(config_path, out_dir);
        if (li->parsed()) return cmd_labelinfo(run_dir, config_path, out_dir);
        if (pl->parsed()) return cmd_plot(in_dir);
        if (vm->parsed()) return cmd_verify(in_dir);
    } catch (const DivergenceError& e) {
        std::cerr << "run failed: " << e.what() << "\n";
        return 3;
    } catch (const FormatError& e) {
        std::cerr << "format error: " << e.what() << "\n";
        return 2;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const CapabilityError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "unexpected error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
