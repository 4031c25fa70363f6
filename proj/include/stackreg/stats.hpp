#pragma once
// Paired t-tests, bootstrap intervals and fold-stability summaries.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace stackreg {

/// Regularized incomplete beta I_x(a, b), continued-fraction evaluation.
double incomplete_beta(double a, double b, double x);

/// P(|T| >= |t|) for Student's t with `df` degrees of freedom.
double student_t_two_tailed(double t, double df);

struct TTestResult {
    double t = 0.0;
    double p = 1.0;
    double df = 0.0;
    /// Differences have zero variance but nonzero mean: t is +/-inf, p = 0.
    bool exact_difference = false;
};

/// Paired two-tailed t-test on a - b. If every difference is zero, t = 0 and p = 1.
TTestResult paired_t_test(std::span<const double> a, std::span<const double> b);

struct ComparisonReport {
    std::string method_a;
    std::string method_b;
    std::vector<double> fold_rmse_a;
    std::vector<double> fold_rmse_b;
    double t_stat = 0.0;
    double p_value = 1.0;
    double bonferroni_alpha = 0.05;  // alpha / n_comparisons
    bool significant = false;        // p_value <= bonferroni_alpha
    bool exact_difference = false;
};

ComparisonReport compare_methods(std::string method_a, std::vector<double> fold_rmse_a,
                                 std::string method_b, std::vector<double> fold_rmse_b,
                                 std::size_t n_comparisons, double alpha);

/// Significance stars: "***" p < 0.001, "**" p < 0.01, "*" p < 0.05, "" otherwise.
std::string significance_stars(double p);

struct BootstrapCI {
    double point = 0.0;
    double lo = 0.0;
    double hi = 0.0;
    int n_resamples = 0;
    double level = 0.95;
    std::uint64_t seed = 0;
};

/// Percentile interval for the RMSE of per-sample errors (prediction - target),
/// resampling rows with replacement. Resample b draws from its own stream
/// seeded by (seed, b). Requires n_resamples >= 100 and level in (0, 1).
BootstrapCI bootstrap_rmse_ci(std::span<const double> errors, int n_resamples, double level,
                              std::uint64_t seed);

struct FoldConsistency {
    double mean = 0.0;
    double std = 0.0;         // sample standard deviation
    double cv_percent = 0.0;  // 100 * std / mean
};

FoldConsistency fold_consistency(std::span<const double> per_fold_rmse);

/// Linear-interpolation quantile of already-sorted data, q in [0, 1].
double quantile_sorted(std::span<const double> sorted, double q);

}  // namespace stackreg
