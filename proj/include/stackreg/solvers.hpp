#pragma once
// Regularized linear regression: closed-form ridge, coordinate-descent
// lasso / elastic net, within-fold standardization and nested
// cross-validated hyperparameter selection.
//
// Loss scaling. Every solver minimizes, over weights w and an unpenalized
// intercept handled by centering,
//
//     1/(2n) ||y - Xw||^2  +  l1 ||w||_1  +  l2 ||w||_2^2
//
// and PenaltySpec maps the user-facing (lambda, alpha) onto (l1, l2):
//
//     ridge(lambda)             l1 = 0,              l2 = lambda / 2
//     lasso(lambda)             l1 = lambda,         l2 = 0
//     elasticnet(lambda, alpha) l1 = alpha lambda,   l2 = (1 - alpha) lambda / 2
//
// so ridge(lambda) is exactly the minimizer of 1/n ||y - Xw||^2 + lambda ||w||^2,
// i.e. the solution of (X'X + n lambda I) w = X'y on centered data, and
// elasticnet(lambda, 0) == ridge(lambda), elasticnet(lambda, 1) == lasso(lambda).
// The all-zero lasso threshold is lambda_max = max_j |x_j' y| / n.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "stackreg/core.hpp"
#include "stackreg/folds.hpp"

namespace stackreg {

enum class PenaltyKind { Ridge, Lasso, ElasticNet };

std::string_view to_string(PenaltyKind kind) noexcept;
/// Accepts "ridge", "lasso", "elasticnet"; throws Config otherwise.
PenaltyKind parse_penalty_kind(std::string_view s);

struct PenaltySpec {
    PenaltyKind kind = PenaltyKind::Ridge;
    double lambda = 0.0;
    double alpha = 1.0;  // elastic-net mixing; ignored for ridge / lasso

    static PenaltySpec ridge(double lambda) { return {PenaltyKind::Ridge, lambda, 0.0}; }
    static PenaltySpec lasso(double lambda) { return {PenaltyKind::Lasso, lambda, 1.0}; }
    static PenaltySpec elasticnet(double lambda, double alpha) {
        return {PenaltyKind::ElasticNet, lambda, alpha};
    }

    double l1() const noexcept;
    double l2() const noexcept;
    /// Throws Config for lambda < 0 or alpha outside [0, 1].
    void validate() const;

    friend bool operator==(const PenaltySpec&, const PenaltySpec&) = default;
};

struct LinearModel {
    std::vector<double> weights;
    double intercept = 0.0;

    std::vector<double> predict(const Matrix& X) const;
};

/// Column means and population standard deviations of training rows.
/// Columns whose std is zero at rounding level are flagged and transform to 0.
class Standardizer {
public:
    Standardizer() = default;
    static Standardizer fit(const Matrix& X);

    Matrix transform(const Matrix& X) const;
    /// Maps a model fitted on standardized features back to raw feature space.
    LinearModel to_raw(const LinearModel& standardized) const;

    const std::vector<double>& means() const noexcept { return means_; }
    const std::vector<double>& stds() const noexcept { return stds_; }
    bool is_constant(std::size_t j) const noexcept { return constant_[j] != 0; }

private:
    std::vector<double> means_;
    std::vector<double> stds_;
    std::vector<char> constant_;
};

/// Centered sufficient statistics of (X, y) over a set of rows: G = Xc'Xc,
/// b = Xc'yc, plus the means used for centering. All solvers run on this, so a
/// single training split can be solved for many penalties without touching rows.
struct CenteredGram {
    std::size_t n = 0;
    std::size_t d = 0;
    std::vector<double> x_mean;
    double y_mean = 0.0;
    std::vector<double> gram;  // d x d, column-major (symmetric)
    std::vector<double> xty;
    double yty = 0.0;          // centered y'y
    std::vector<char> active;  // 0 for columns with no variation over these rows

    static CenteredGram build(const Matrix& X, std::span<const double> y);
    static CenteredGram build(const Matrix& X, std::span<const double> y,
                              std::span<const std::size_t> rows);

    double g(std::size_t i, std::size_t j) const noexcept { return gram[j * d + i]; }
};

struct CdOptions {
    double tol = 1e-7;        // on the largest coordinate change in one sweep
    int max_iter = 10'000;    // full sweeps
    bool record_objective = false;
};

struct CdResult {
    LinearModel model;
    int sweeps = 0;
    bool converged = false;
    double last_max_update = 0.0;
    std::vector<double> objective_trace;  // after each sweep, if requested
};

/// Closed-form ridge via Cholesky. Throws Singular when lambda == 0 and the
/// centered normal matrix is not positive definite.
LinearModel fit_ridge(const Matrix& X, std::span<const double> y, double lambda);
LinearModel solve_ridge(const CenteredGram& sys, double lambda);

/// Cyclic coordinate descent with soft-thresholding. Non-convergence within
/// max_iter is reported in the result rather than thrown.
CdResult fit_coordinate_descent(const Matrix& X, std::span<const double> y,
                                const PenaltySpec& penalty, const CdOptions& opts = {});
CdResult solve_coordinate_descent(const CenteredGram& sys, double l1, double l2,
                                  const CdOptions& opts, std::span<const double> warm_start = {});

/// Objective 1/(2n)||y - Xw - b||^2 + l1|w|_1 + l2|w|^2 evaluated on raw data.
double penalized_objective(const Matrix& X, std::span<const double> y, const LinearModel& m,
                           double l1, double l2);

std::vector<double> logspace(double lo_exp, double hi_exp, std::size_t count);

struct Grid {
    std::vector<double> ridge_lambdas;
    std::vector<double> lasso_lambdas;  // also the elastic-net lambda axis
    std::vector<double> alphas;         // elastic-net mixing values

    /// ridge 10^-3..10^5 (50 values), lasso 10^-5..10^0.1 (30 values),
    /// alpha in {0.1, 0.5, 0.7, 0.9, 0.95, 0.99, 1.0}.
    static Grid defaults();

    /// The candidate list searched for one model kind, in grid order.
    std::vector<PenaltySpec> candidates(PenaltyKind kind) const;
};

struct NestedCvOptions {
    int inner_folds = 3;
    std::uint64_t seed = 42;
    CdOptions cd;
};

struct FitResult {
    PenaltyKind kind = PenaltyKind::Ridge;
    /// Mean standardized-space weights across outer folds.
    std::vector<double> weights;
    double intercept = 0.0;
    /// Most frequently selected penalty across outer folds (ties: earliest in grid order).
    PenaltySpec penalty;
    std::vector<PenaltySpec> fold_penalty;
    std::vector<std::vector<double>> fold_weights;  // standardized space, per outer fold
    std::vector<LinearModel> fold_models;           // raw feature space, per outer fold
    std::vector<double> oof_pred;
    std::vector<double> per_fold_rmse;
    double sparsity = 0.0;  // fraction of exactly-zero fold weights, averaged over folds
    std::size_t fit_calls = 0;
    std::size_t nonconverged_fits = 0;

    /// Test-time prediction: average of the outer-fold models.
    std::vector<double> predict(const Matrix& X) const;
};

/// Outer loop over `folds`: standardize on outer-train rows, choose the grid
/// candidate minimizing pooled inner-CV RMSE (unstratified inner folds),
/// refit on outer-train and predict the held-out fold. Issues exactly
/// L * inner_folds * |candidates| + L solver fits.
FitResult nested_cv_fit(const Matrix& X, std::span<const double> y, const FoldAssignment& folds,
                        PenaltyKind kind, const Grid& grid, const NestedCvOptions& opts = {});

/// Same outer protocol with a single fixed penalty and no inner search (L fits).
FitResult cv_fit_fixed(const Matrix& X, std::span<const double> y, const FoldAssignment& folds,
                       const PenaltySpec& penalty, const CdOptions& cd = {});

struct PathPoint {
    PenaltySpec penalty;
    double mean_rmse = 0.0;  // across outer folds
    double std_rmse = 0.0;   // sample std across outer folds
    double nonzero_fraction = 0.0;
};

/// Held-out RMSE of every grid candidate across the outer folds.
std::vector<PathPoint> regularization_path(const Matrix& X, std::span<const double> y,
                                           const FoldAssignment& folds, PenaltyKind kind,
                                           const Grid& grid, const CdOptions& cd = {});

}  // namespace stackreg
