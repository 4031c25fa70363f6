#pragma once
// End-to-end orchestration: variance pruning, redundancy projection,
// meta-feature augmentation, nested-CV meta-learners and inverse-RMSE
// blending, plus the baselines, significance tests and diagnostics.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "stackreg/core.hpp"
#include "stackreg/ensemble.hpp"
#include "stackreg/folds.hpp"
#include "stackreg/metafeatures.hpp"
#include "stackreg/redundancy.hpp"
#include "stackreg/solvers.hpp"
#include "stackreg/stats.hpp"

namespace stackreg {

struct BaselineSet {
    bool uniform_average = true;
    bool weighted_average = true;
    bool best_single = true;
    bool hill_climbing = true;
    bool ridge_stack = true;

    /// Names as accepted on the command line, in report order.
    static const std::vector<std::string>& all_names();
    /// Enables exactly the listed names; throws Config for unknown ones.
    static BaselineSet from_names(const std::vector<std::string>& names);
    std::vector<std::string> enabled_names() const;
    bool any() const;
};

struct PipelineConfig {
    int folds = 10;
    std::uint64_t seed = 42;
    int n_bins = 0;  // stratification bins for the outer folds; 0 means = folds
    int inner_folds = 3;
    RedundancyConfig redundancy;
    Grid grid = Grid::defaults();
    std::vector<PenaltyKind> meta_learners{PenaltyKind::Ridge, PenaltyKind::Lasso,
                                           PenaltyKind::ElasticNet};
    BaselineSet baselines;
    HillClimbOptions hill_climb;
    CdOptions cd;
    std::string reference_method = "hill_climbing";
    double alpha = 0.05;
    int bootstrap_resamples = 1000;
    double ci_level = 0.95;
    int error_bins = 10;
    bool regularization_paths = false;

    // Stage switches; all on for the proposed pipeline. ablate() walks them.
    bool variance_pruning = true;
    bool dedup = true;
    MetaFeatureSet features;
    bool blending = true;

    /// Throws Config for invalid values.
    void validate() const;
    int effective_bins() const { return n_bins > 0 ? n_bins : folds; }
};

/// Metrics and significance for one method of the comparison table.
struct MethodResult {
    std::string name;
    std::string family;  // "baseline", "meta" or "blend"
    std::string detail;  // chosen model / penalty summary
    MetricReport metrics;
    BootstrapCI ci;
    std::vector<double> per_fold_rmse;
    FoldConsistency consistency;
    std::size_t n_models = 0;  // models entering the method
    std::optional<double> sparsity;
    std::optional<ComparisonReport> comparison;  // vs the reference method
    std::vector<double> oof_pred;
    std::optional<std::vector<double>> test_pred;
};

struct WeightRow {
    std::string feature;
    std::string type;  // "base", "statistical" or "interaction"
    double mean_weight = 0.0;
};

struct WeightReport {
    std::vector<WeightRow> rows;  // sorted by |mean_weight| descending, ties by name
    double mean_abs_base = 0.0;
    double mean_abs_statistical = 0.0;
    double mean_abs_interaction = 0.0;
    double gini = 0.0;
    /// Pearson(|weight|, OOF RMSE) over base columns; absent when undefined.
    std::optional<double> weight_rmse_corr;
};

/// Gini = sum_ij |x_i - x_j| / (2 n^2 mean(x)) over x = |weights|; 0 if all zero.
double gini_coefficient(std::span<const double> values);

/// Ranks design columns by |mean fold weight| (standardized space) and
/// summarizes them by feature type. base_rmse holds the OOF RMSE of the
/// first n_base columns.
WeightReport weight_report(const FitResult& fit, const MetaDesign& design,
                           std::span<const double> base_rmse);

struct MetaLearnerResult {
    std::string name;  // "meta_ridge", ...
    FitResult fit;
    WeightReport weights;
    std::vector<PathPoint> path;  // filled when cfg.regularization_paths
};

struct ErrorBin {
    int bin = 0;
    double target_lo = 0.0;
    double target_hi = 0.0;
    std::size_t count = 0;
    double mean_target = 0.0;
    double mean_prediction = 0.0;
    double mean_error = 0.0;  // prediction - target
    double rmse = 0.0;
};

/// Rows split into equal-count bins by target quantile (stable sort).
std::vector<ErrorBin> prediction_error_bins(std::span<const double> pred,
                                            std::span<const double> target, int n_bins);

struct RunReport {
    PipelineConfig config;
    std::size_t n_samples = 0;
    std::size_t n_models = 0;
    std::vector<std::string> variance_pruned;
    SelectionResult selection;
    std::vector<std::string> design_columns;
    std::vector<MetaLearnerResult> meta;
    std::optional<BlendResult> blend;
    std::vector<MethodResult> methods;  // baselines, meta-learners, then the blend
    std::string final_method;
    std::vector<ErrorBin> error_bins;
    std::size_t total_fit_calls = 0;
    FoldAssignment folds;
    std::vector<std::pair<std::string, double>> timings;  // stage, seconds

    const MethodResult& method(const std::string& name) const;
    const MethodResult& final_result() const { return method(final_method); }
};

/// Full pipeline. `test` (optional) must hold the same model columns as `oof`.
RunReport run(const PredictionMatrix& oof, const TargetVector& target, const PipelineConfig& cfg,
              const PredictionMatrix* test = nullptr);

struct AblationRow {
    std::string configuration;
    MetricReport metrics;
    double delta_rmse = 0.0;  // vs the previous row; 0 for the first
    std::size_t n_models = 0;
    std::size_t n_features = 0;
};

/// Cumulative ablation: ridge stack on the raw pool, then +dedup,
/// +variance pruning, +statistics, +interactions, +blending.
std::vector<AblationRow> ablate(const PredictionMatrix& oof, const TargetVector& target,
                                const PipelineConfig& cfg);

}  // namespace stackreg
