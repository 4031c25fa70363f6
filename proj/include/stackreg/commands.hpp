#pragma once
// Subcommand implementations behind the command-line front end. Each returns
// a process exit code and writes at most one diagnostic line to `err`.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "stackreg/core.hpp"
#include "stackreg/pipeline.hpp"
#include "stackreg/synth.hpp"

namespace stackreg {

enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitData = 2, kExitNumeric = 3 };

int exit_code_for(ErrorKind kind) noexcept;

/// Command-line flags that override the config file.
struct Overrides {
    std::optional<int> folds;
    std::optional<std::uint64_t> seed;
    std::optional<double> tau_corr;
    std::optional<double> tau_mse;
    std::optional<double> tau_var;
    std::optional<std::vector<std::string>> meta;
    std::optional<std::vector<std::string>> baselines;
    std::optional<int> inner_folds;
};

struct CommandOptions {
    std::string predictions_csv;
    std::optional<std::string> test_csv;
    std::optional<std::string> config_file;
    std::string out_dir = "stackreg_out";
    Overrides overrides;
};

/// Defaults, then the config file, then flag overrides; validated.
PipelineConfig effective_config(const CommandOptions& opts);

/// Writes report.json, report.txt, selection_log.csv, fold_traces.csv,
/// blend_weights.csv, regularization_path.csv, prediction_error_bins.csv,
/// timings.json and, with a test file, test_predictions.csv.
int cmd_run(const CommandOptions& opts, std::ostream& out, std::ostream& err);

/// Writes ablation.json, ablation.txt and ablation.csv.
int cmd_ablate(const CommandOptions& opts, std::ostream& out, std::ostream& err);

/// Variance pruning and redundancy projection only: dedup.json, selection_log.csv.
int cmd_dedup(const CommandOptions& opts, std::ostream& out, std::ostream& err);

/// Writes a prediction CSV with ids 0..n-1, the target and the model columns.
int cmd_synth(const SynthConfig& cfg, const std::string& out_csv, std::ostream& out,
              std::ostream& err);

}  // namespace stackreg
