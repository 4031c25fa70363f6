#pragma once
// Prediction-space redundancy projection, variance pruning and spectral
// conditioning diagnostics for a pool of base-model predictions.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "stackreg/core.hpp"

namespace stackreg {

struct RedundancyConfig {
    double tau_corr = 0.95;
    /// Absolute MSE-between threshold. When unset, 0.05 * Var(target) is used.
    /// Use +infinity for correlation-only de-duplication.
    std::optional<double> tau_mse;
    double tau_var = 0.01;

    static constexpr double kDefaultMseFraction = 0.05;

    double effective_tau_mse(std::span<const double> target) const;
    /// Throws Config for out-of-range thresholds.
    void validate() const;
};

struct Removal {
    std::string removed;
    std::string kept;
    double rho = 0.0;           // Pearson correlation between the two prediction columns
    double mse_between = 0.0;   // mean squared difference between the two columns
    double delta_rmse = 0.0;    // RMSE(removed) - RMSE(kept), >= 0
};

struct ConditioningStats {
    double kappa = 1.0;             // sigma_max / sigma_min of the correlation matrix
    double eff_rank = 1.0;          // trace / sigma_max
    std::vector<double> spectrum;   // singular values, descending
};

struct SelectionResult {
    std::vector<std::size_t> retained;      // indices into the input pool, in processing order
    std::vector<std::string> retained_names;
    std::vector<Removal> removals;          // in processing order
    std::vector<double> model_rmse;         // OOF RMSE of every input column
    std::size_t k_eff = 0;
    double tau_mse_used = 0.0;
    double kappa_before = 1.0;
    double kappa_after = 1.0;
    double eff_rank_before = 1.0;
    double eff_rank_after = 1.0;
};

/// Joint correlation / MSE suppression. Columns are processed in ascending
/// OOF RMSE (ties by name); a candidate is dropped iff some already retained
/// column has corr >= tau_corr and MSE-between <= tau_mse. Conditioning is
/// measured on the nonconstant columns of the input and of the retained set.
SelectionResult project(const PredictionMatrix& oof, const TargetVector& target,
                        const RedundancyConfig& cfg);

/// No-op selection: every column retained in input order, with conditioning
/// stats filled in. Used when de-duplication is switched off.
SelectionResult keep_all(const PredictionMatrix& oof, const TargetVector& target);

struct VariancePruneResult {
    PredictionMatrix kept;
    std::vector<std::string> removed;
};

/// Drops columns with population variance <= tau_var. Throws Selection if
/// nothing survives.
VariancePruneResult variance_prune(const PredictionMatrix& oof, double tau_var);

/// Spectrum of the K x K Pearson correlation matrix. Requires K >= 2 and
/// nonconstant columns (Degenerate otherwise).
ConditioningStats conditioning(const PredictionMatrix& oof);

/// Correlation matrix (row-major K x K) of the columns.
std::vector<double> correlation_matrix(const PredictionMatrix& oof);

}  // namespace stackreg
