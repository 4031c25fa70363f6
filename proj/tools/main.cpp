// stackreg: redundancy-aware regularized stacking from the command line.
//
//   stackreg run    PREDICTIONS.csv [--test TEST.csv] [--config cfg.json] [--out DIR] [flags]
//   stackreg ablate PREDICTIONS.csv [--config cfg.json] [--out DIR] [flags]
//   stackreg dedup  PREDICTIONS.csv [--config cfg.json] [--out DIR] [flags]
//   stackreg synth  --out FILE.csv [--n-samples N] [--clusters C] [--models-per-cluster M] ...
//
// Exit codes: 0 success, 1 usage or configuration, 2 data, 3 numeric.

#include <iostream>

#include "CLI11.hpp"
#include "stackreg/commands.hpp"

namespace {

using namespace stackreg;

void add_pipeline_flags(CLI::App* sub, CommandOptions& opts, bool with_test) {
    sub->add_option("predictions", opts.predictions_csv, "Training predictions CSV (id,target,models...)")
        ->required();
    if (with_test) {
        sub->add_option_function<std::string>(
            "--test", [&opts](const std::string& v) { opts.test_csv = v; },
            "Test predictions CSV (id,models...)");
    }
    sub->add_option_function<std::string>(
        "--config", [&opts](const std::string& v) { opts.config_file = v; }, "JSON config file");
    sub->add_option("--out", opts.out_dir, "Output directory")->capture_default_str();

    auto& o = opts.overrides;
    sub->add_option_function<int>("--folds", [&o](int v) { o.folds = v; }, "Outer CV folds (10)");
    sub->add_option_function<std::uint64_t>("--seed", [&o](std::uint64_t v) { o.seed = v; },
                                            "Random seed (42)");
    sub->add_option_function<double>("--tau-corr", [&o](double v) { o.tau_corr = v; },
                                      "Correlation threshold (0.95)");
    sub->add_option_function<double>("--tau-mse", [&o](double v) { o.tau_mse = v; },
                                     "MSE-between threshold (default 0.05 * Var(target))");
    sub->add_option_function<double>("--tau-var", [&o](double v) { o.tau_var = v; },
                                     "Variance pruning threshold (0.01)");
    sub->add_option_function<std::vector<std::string>>(
           "--meta", [&o](const std::vector<std::string>& v) { o.meta = v; },
           "Meta-learners: ridge lasso elasticnet")
        ->delimiter(',');
    sub->add_option_function<std::vector<std::string>>(
           "--baselines", [&o](const std::vector<std::string>& v) { o.baselines = v; },
           "Baselines: uniform_average weighted_average best_single hill_climbing ridge_stack")
        ->delimiter(',');
    sub->add_option_function<int>("--inner-folds", [&o](int v) { o.inner_folds = v; },
                                  "Inner CV folds (3)");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Redundancy-aware regularized stacking"};
    app.require_subcommand(1);

    CommandOptions run_opts, ablate_opts, dedup_opts;
    auto* run_cmd = app.add_subcommand("run", "Full pipeline with baselines and reports");
    add_pipeline_flags(run_cmd, run_opts, true);
    auto* ablate_cmd = app.add_subcommand("ablate", "Cumulative component ablation");
    add_pipeline_flags(ablate_cmd, ablate_opts, false);
    auto* dedup_cmd = app.add_subcommand("dedup", "Variance pruning and redundancy projection only");
    add_pipeline_flags(dedup_cmd, dedup_opts, false);

    SynthConfig synth;
    std::string synth_out;
    bool benchmark = false;
    auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic clustered prediction pool");
    synth_cmd->add_option("--out", synth_out, "Output CSV")->required();
    synth_cmd->add_flag("--benchmark", benchmark,
                        "Start from the end-to-end benchmark preset (5000 x 4 clusters x 5 models)");
    synth_cmd->add_option("--n-samples", synth.n_samples)->capture_default_str();
    synth_cmd->add_option("--clusters", synth.n_clusters)->capture_default_str();
    synth_cmd->add_option("--models-per-cluster", synth.models_per_cluster)->capture_default_str();
    synth_cmd->add_option("--noise", synth.noise, "Cluster-shared error sd")->capture_default_str();
    synth_cmd->add_option("--rho-within", synth.rho_within, "Within-cluster error correlation")
        ->capture_default_str();
    synth_cmd->add_option("--seed", synth.seed)->capture_default_str();
    synth_cmd->add_option("--spread", synth.cluster_noise_spread, "Cluster quality spread");
    synth_cmd->add_option("--heteroscedasticity", synth.heteroscedasticity);
    synth_cmd->add_option("--tail-shrinkage", synth.tail_shrinkage);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    if (*run_cmd) return cmd_run(run_opts, std::cout, std::cerr);
    if (*ablate_cmd) return cmd_ablate(ablate_opts, std::cout, std::cerr);
    if (*dedup_cmd) return cmd_dedup(dedup_opts, std::cout, std::cerr);
    if (benchmark) {
        // Explicit flags still win over the preset.
        SynthConfig preset = SynthConfig::benchmark(synth.seed);
        auto pick = [&](const char* flag, auto& field, auto preset_value) {
            if (synth_cmd->count(flag) == 0) field = preset_value;
        };
        pick("--n-samples", synth.n_samples, preset.n_samples);
        pick("--clusters", synth.n_clusters, preset.n_clusters);
        pick("--models-per-cluster", synth.models_per_cluster, preset.models_per_cluster);
        pick("--noise", synth.noise, preset.noise);
        pick("--rho-within", synth.rho_within, preset.rho_within);
        pick("--spread", synth.cluster_noise_spread, preset.cluster_noise_spread);
        pick("--heteroscedasticity", synth.heteroscedasticity, preset.heteroscedasticity);
        pick("--tail-shrinkage", synth.tail_shrinkage, preset.tail_shrinkage);
    }
    return cmd_synth(synth, synth_out, std::cout, std::cerr);
}
