#pragma once
// Inverse-RMSE blending of meta-learners and the combination baselines.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "stackreg/core.hpp"
#include "stackreg/folds.hpp"
#include "stackreg/solvers.hpp"

namespace stackreg {

struct BlendMember {
    std::string name;
    std::vector<double> oof_pred;
    std::optional<std::vector<double>> test_pred;
};

struct BlendResult {
    std::vector<std::string> member_names;
    std::vector<double> risks;    // OOF RMSE per member
    std::vector<double> weights;  // (1/r_m) / sum(1/r)
    std::vector<double> final_pred;
    std::optional<std::vector<double>> final_test_pred;
    /// Set when a member had zero OOF error and took the whole weight.
    std::optional<std::string> perfect_member;
};

/// Inverse-RMSE weights. If some member has RMSE exactly 0 the first such
/// member receives weight 1 and the rest 0.
std::vector<double> inverse_risk_weights(std::span<const double> risks);

BlendResult blend(const std::vector<BlendMember>& members, std::span<const double> target);

/// Model with the lowest OOF RMSE (ties: lexicographically smallest name).
std::pair<std::string, MetricReport> best_single(const PredictionMatrix& oof,
                                                 std::span<const double> target);

/// Row-wise mean of all columns.
std::vector<double> uniform_average(const PredictionMatrix& oof);

struct WeightedAverage {
    std::vector<double> weights;
    std::vector<double> prediction;
};

/// Columns combined with inverse-RMSE weights (same zero-RMSE rule as blend).
WeightedAverage weighted_average(const PredictionMatrix& oof, std::span<const double> target);

/// Stacking on the raw pool (no de-duplication, no engineered features)
/// under the given folds with a fixed ridge lambda; lambda = 0 is OLS stacking.
FitResult linear_stack(const PredictionMatrix& oof, std::span<const double> target,
                       const FoldAssignment& folds, double lambda);

/// As above, with lambda chosen per outer fold by nested CV over the ridge grid.
FitResult linear_stack(const PredictionMatrix& oof, std::span<const double> target,
                       const FoldAssignment& folds, const Grid& grid,
                       const NestedCvOptions& opts = {});

struct HillClimbStep {
    std::size_t step = 0;
    std::string chosen;
    double rmse = 0.0;
};

struct HillClimbState {
    std::vector<std::size_t> counts;  // selection multiplicity per model
    std::vector<double> current_pred;
    double current_rmse = 0.0;
    std::vector<HillClimbStep> history;

    std::vector<double> weights() const;  // counts / total
};

struct HillClimbOptions {
    std::size_t max_steps = 100;
    std::size_t patience = 10;
};

/// Greedy forward selection with replacement. Starts from the best single
/// model (step 1). Each later step adds the model whose inclusion gives the
/// lowest RMSE of the count-weighted average (ties: smallest name). A step is
/// taken only if it does not increase RMSE; steps that fail to strictly
/// decrease it count toward `patience`. The search also stops when RMSE is
/// zero, or when the best addition is the sole model already in the ensemble
/// (the average would not change).
HillClimbState hill_climb(const PredictionMatrix& oof, std::span<const double> target,
                          const HillClimbOptions& opts = {});

}  // namespace stackreg
