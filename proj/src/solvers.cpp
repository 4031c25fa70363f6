#include "stackreg/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <string>

#include "stackreg/kernels.hpp"
#include "stackreg/rng.hpp"

namespace stackreg {

std::string_view to_string(PenaltyKind kind) noexcept {
    switch (kind) {
        case PenaltyKind::Ridge: return "ridge";
        case PenaltyKind::Lasso: return "lasso";
        case PenaltyKind::ElasticNet: return "elasticnet";
    }
    return "unknown";
}

PenaltyKind parse_penalty_kind(std::string_view s) {
    if (s == "ridge") return PenaltyKind::Ridge;
    if (s == "lasso") return PenaltyKind::Lasso;
    if (s == "elasticnet") return PenaltyKind::ElasticNet;
    throw Error(ErrorKind::Config, "unknown meta-learner '" + std::string(s) +
                                       "' (expected ridge, lasso or elasticnet)");
}

double PenaltySpec::l1() const noexcept {
    switch (kind) {
        case PenaltyKind::Ridge: return 0.0;
        case PenaltyKind::Lasso: return lambda;
        case PenaltyKind::ElasticNet: return alpha * lambda;
    }
    return 0.0;
}

double PenaltySpec::l2() const noexcept {
    switch (kind) {
        case PenaltyKind::Ridge: return 0.5 * lambda;
        case PenaltyKind::Lasso: return 0.0;
        case PenaltyKind::ElasticNet: return 0.5 * (1.0 - alpha) * lambda;
    }
    return 0.0;
}

void PenaltySpec::validate() const {
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
        throw Error(ErrorKind::Config, "penalty lambda must be finite and >= 0");
    }
    if (kind == PenaltyKind::ElasticNet && !(alpha >= 0.0 && alpha <= 1.0)) {
        throw Error(ErrorKind::Config, "elastic-net alpha must lie in [0, 1]");
    }
}

std::vector<double> LinearModel::predict(const Matrix& X) const {
    require_same_length(X.cols(), weights.size(), "LinearModel::predict");
    std::vector<double> out(X.rows(), intercept);
    for (std::size_t j = 0; j < weights.size(); ++j) {
        if (weights[j] != 0.0) kernels::axpy(weights[j], X.col(j), out);
    }
    return out;
}

namespace {

// Sum of squares at rounding level relative to the column's magnitude.
bool negligible_spread(double centered_ss, double scale, std::size_t n) {
    const double s = 1e-12 * scale;
    return !(centered_ss > static_cast<double>(n) * s * s);
}

double max_abs(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::fabs(x));
    return m;
}

double soft_threshold(double z, double t) {
    if (z > t) return z - t;
    if (z < -t) return z + t;
    return 0.0;
}

}  // namespace

// ---------------------------------------------------------------------------
// Standardizer

Standardizer Standardizer::fit(const Matrix& X) {
    if (X.rows() == 0) throw Error(ErrorKind::Dimension, "standardizer: no rows");
    Standardizer s;
    const std::size_t n = X.rows();
    s.means_.resize(X.cols());
    s.stds_.resize(X.cols());
    s.constant_.resize(X.cols());
    for (std::size_t j = 0; j < X.cols(); ++j) {
        const auto c = X.col(j);
        const double m = kernels::sum(c) / static_cast<double>(n);
        const double ss = kernels::centered_dot(c, m, c, m);
        s.means_[j] = m;
        if (negligible_spread(ss, max_abs(c), n)) {
            s.stds_[j] = 0.0;
            s.constant_[j] = 1;
        } else {
            s.stds_[j] = std::sqrt(ss / static_cast<double>(n));
        }
    }
    return s;
}

Matrix Standardizer::transform(const Matrix& X) const {
    require_same_length(X.cols(), means_.size(), "Standardizer::transform");
    Matrix out(X.rows(), X.cols());
    for (std::size_t j = 0; j < X.cols(); ++j) {
        if (constant_[j]) continue;
        const auto src = X.col(j);
        auto dst = out.col(j);
        const double inv = 1.0 / stds_[j];
        for (std::size_t i = 0; i < src.size(); ++i) dst[i] = (src[i] - means_[j]) * inv;
    }
    return out;
}

LinearModel Standardizer::to_raw(const LinearModel& standardized) const {
    require_same_length(standardized.weights.size(), means_.size(), "Standardizer::to_raw");
    LinearModel raw;
    raw.weights.resize(means_.size(), 0.0);
    raw.intercept = standardized.intercept;
    for (std::size_t j = 0; j < means_.size(); ++j) {
        if (constant_[j]) continue;
        raw.weights[j] = standardized.weights[j] / stds_[j];
        raw.intercept -= raw.weights[j] * means_[j];
    }
    return raw;
}

// ---------------------------------------------------------------------------
// CenteredGram

CenteredGram CenteredGram::build(const Matrix& X, std::span<const double> y) {
    std::vector<std::size_t> rows(X.rows());
    std::iota(rows.begin(), rows.end(), 0);
    return build(X, y, rows);
}

CenteredGram CenteredGram::build(const Matrix& X, std::span<const double> y,
                                 std::span<const std::size_t> rows) {
    require_same_length(X.rows(), y.size(), "CenteredGram");
    if (rows.empty()) throw Error(ErrorKind::Dimension, "CenteredGram: no rows");
    CenteredGram s;
    s.n = rows.size();
    s.d = X.cols();
    const double inv_n = 1.0 / static_cast<double>(s.n);

    std::vector<double> yc(s.n);
    for (std::size_t i = 0; i < s.n; ++i) yc[i] = y[rows[i]];
    s.y_mean = kernels::sum(yc) * inv_n;
    for (double& v : yc) v -= s.y_mean;
    s.yty = kernels::dot(yc, yc);

    // Centered copies of the selected rows, one contiguous buffer per column.
    Matrix xc(s.n, s.d);
    s.x_mean.resize(s.d);
    s.active.assign(s.d, 1);
    for (std::size_t j = 0; j < s.d; ++j) {
        const auto src = X.col(j);
        auto dst = xc.col(j);
        for (std::size_t i = 0; i < s.n; ++i) dst[i] = src[rows[i]];
        const double scale = max_abs(dst);
        s.x_mean[j] = kernels::sum(dst) * inv_n;
        for (double& v : dst) v -= s.x_mean[j];
        if (negligible_spread(kernels::dot(dst, dst), scale, s.n)) {
            s.active[j] = 0;
            std::fill(dst.begin(), dst.end(), 0.0);
        }
    }

    s.gram.assign(s.d * s.d, 0.0);
    s.xty.assign(s.d, 0.0);
    for (std::size_t j = 0; j < s.d; ++j) {
        if (!s.active[j]) continue;
        s.xty[j] = kernels::dot(xc.col(j), yc);
        for (std::size_t k = 0; k <= j; ++k) {
            if (!s.active[k]) continue;
            const double v = kernels::dot(xc.col(j), xc.col(k));
            s.gram[j * s.d + k] = v;
            s.gram[k * s.d + j] = v;
        }
    }
    return s;
}

// ---------------------------------------------------------------------------
// Ridge

namespace {

LinearModel finish(const CenteredGram& sys, std::vector<double> w) {
    LinearModel m;
    m.intercept = sys.y_mean;
    for (std::size_t j = 0; j < sys.d; ++j) m.intercept -= w[j] * sys.x_mean[j];
    m.weights = std::move(w);
    return m;
}

// In-place lower Cholesky of a dense p x p row-major matrix. Returns false if a
// pivot is not safely positive.
bool cholesky(std::vector<double>& a, std::size_t p, double pivot_floor) {
    for (std::size_t j = 0; j < p; ++j) {
        double diag = a[j * p + j];
        for (std::size_t k = 0; k < j; ++k) diag -= a[j * p + k] * a[j * p + k];
        if (!(diag > pivot_floor)) return false;
        const double ljj = std::sqrt(diag);
        a[j * p + j] = ljj;
        for (std::size_t i = j + 1; i < p; ++i) {
            double v = a[i * p + j];
            for (std::size_t k = 0; k < j; ++k) v -= a[i * p + k] * a[j * p + k];
            a[i * p + j] = v / ljj;
        }
    }
    return true;
}

void cholesky_solve(const std::vector<double>& l, std::size_t p, std::vector<double>& b) {
    for (std::size_t i = 0; i < p; ++i) {
        double v = b[i];
        for (std::size_t k = 0; k < i; ++k) v -= l[i * p + k] * b[k];
        b[i] = v / l[i * p + i];
    }
    for (std::size_t i = p; i-- > 0;) {
        double v = b[i];
        for (std::size_t k = i + 1; k < p; ++k) v -= l[k * p + i] * b[k];
        b[i] = v / l[i * p + i];
    }
}

}  // namespace

LinearModel solve_ridge(const CenteredGram& sys, double lambda) {
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
        throw Error(ErrorKind::Config, "ridge lambda must be finite and >= 0");
    }
    std::vector<std::size_t> act;
    for (std::size_t j = 0; j < sys.d; ++j) {
        if (sys.active[j]) act.push_back(j);
    }
    std::vector<double> w(sys.d, 0.0);
    const std::size_t p = act.size();
    if (p == 0) return finish(sys, std::move(w));

    const double shift = static_cast<double>(sys.n) * lambda;
    std::vector<double> a(p * p);
    double max_diag = 0.0;
    for (std::size_t r = 0; r < p; ++r) {
        for (std::size_t c = 0; c < p; ++c) a[r * p + c] = sys.g(act[r], act[c]);
        max_diag = std::max(max_diag, a[r * p + r]);
        a[r * p + r] += shift;
    }
    const double floor = 1e-13 * (max_diag + shift);
    if (!cholesky(a, p, floor)) {
        throw Error(ErrorKind::Singular,
                    "ridge normal equations are singular at lambda = " + std::to_string(lambda) +
                        "; use lambda > 0");
    }
    std::vector<double> rhs(p);
    for (std::size_t r = 0; r < p; ++r) rhs[r] = sys.xty[act[r]];
    cholesky_solve(a, p, rhs);
    for (std::size_t r = 0; r < p; ++r) w[act[r]] = rhs[r];
    return finish(sys, std::move(w));
}

LinearModel fit_ridge(const Matrix& X, std::span<const double> y, double lambda) {
    require_same_length(X.rows(), y.size(), "fit_ridge");
    require_finite(y, "fit_ridge target");
    return solve_ridge(CenteredGram::build(X, y), lambda);
}

// ---------------------------------------------------------------------------
// Coordinate descent

namespace {

double gram_objective(const CenteredGram& sys, std::span<const double> w,
                      std::span<const double> q, double l1, double l2) {
    const double n = static_cast<double>(sys.n);
    double quad = sys.yty - 2.0 * kernels::dot(sys.xty, w) + kernels::dot(w, q);
    double pen1 = 0.0;
    for (double v : w) pen1 += std::fabs(v);
    return 0.5 * quad / n + l1 * pen1 + l2 * kernels::dot(w, w);
}

}  // namespace

CdResult solve_coordinate_descent(const CenteredGram& sys, double l1, double l2,
                                  const CdOptions& opts, std::span<const double> warm_start) {
    if (!(l1 >= 0.0) || !(l2 >= 0.0)) {
        throw Error(ErrorKind::Config, "coordinate descent penalties must be >= 0");
    }
    if (!(opts.tol > 0.0)) throw Error(ErrorKind::Config, "coordinate descent tol must be > 0");
    if (opts.max_iter < 1) throw Error(ErrorKind::Config, "coordinate descent max_iter must be >= 1");

    const std::size_t d = sys.d;
    const double n = static_cast<double>(sys.n);
    std::vector<double> w(d, 0.0);
    if (!warm_start.empty()) {
        require_same_length(warm_start.size(), d, "warm start");
        for (std::size_t j = 0; j < d; ++j) w[j] = sys.active[j] ? warm_start[j] : 0.0;
    }
    // q = G w, maintained incrementally.
    std::vector<double> q(d, 0.0);
    for (std::size_t j = 0; j < d; ++j) {
        if (w[j] != 0.0) kernels::axpy(w[j], {sys.gram.data() + j * d, d}, q);
    }

    CdResult res;
    for (int sweep = 1; sweep <= opts.max_iter; ++sweep) {
        double max_update = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
            if (!sys.active[j]) continue;
            const double gjj = sys.g(j, j);
            const double z = (sys.xty[j] - q[j] + gjj * w[j]) / n;
            const double updated = soft_threshold(z, l1) / (gjj / n + 2.0 * l2);
            const double delta = updated - w[j];
            if (delta != 0.0) {
                kernels::axpy(delta, {sys.gram.data() + j * d, d}, q);
                w[j] = updated;
                max_update = std::max(max_update, std::fabs(delta));
            }
        }
        res.sweeps = sweep;
        res.last_max_update = max_update;
        if (opts.record_objective) res.objective_trace.push_back(gram_objective(sys, w, q, l1, l2));
        if (max_update < opts.tol) {
            res.converged = true;
            break;
        }
    }
    res.model = finish(sys, std::move(w));
    return res;
}

CdResult fit_coordinate_descent(const Matrix& X, std::span<const double> y,
                                const PenaltySpec& penalty, const CdOptions& opts) {
    penalty.validate();
    require_same_length(X.rows(), y.size(), "fit_coordinate_descent");
    require_finite(y, "fit_coordinate_descent target");
    return solve_coordinate_descent(CenteredGram::build(X, y), penalty.l1(), penalty.l2(), opts);
}

double penalized_objective(const Matrix& X, std::span<const double> y, const LinearModel& m,
                           double l1, double l2) {
    const auto pred = m.predict(X);
    double pen1 = 0.0;
    for (double v : m.weights) pen1 += std::fabs(v);
    return 0.5 * kernels::squared_distance(pred, y) / static_cast<double>(y.size()) + l1 * pen1 +
           l2 * kernels::dot(m.weights, m.weights);
}

// ---------------------------------------------------------------------------
// Grids

std::vector<double> logspace(double lo_exp, double hi_exp, std::size_t count) {
    std::vector<double> out(count);
    if (count == 1) {
        out[0] = std::pow(10.0, lo_exp);
        return out;
    }
    for (std::size_t i = 0; i < count; ++i) {
        const double e = lo_exp + (hi_exp - lo_exp) * static_cast<double>(i) /
                                      static_cast<double>(count - 1);
        out[i] = std::pow(10.0, e);
    }
    return out;
}

Grid Grid::defaults() {
    return {logspace(-3.0, 5.0, 50), logspace(-5.0, 0.1, 30),
            {0.1, 0.5, 0.7, 0.9, 0.95, 0.99, 1.0}};
}

std::vector<PenaltySpec> Grid::candidates(PenaltyKind kind) const {
    std::vector<PenaltySpec> out;
    switch (kind) {
        case PenaltyKind::Ridge:
            for (double l : ridge_lambdas) out.push_back(PenaltySpec::ridge(l));
            break;
        case PenaltyKind::Lasso:
            for (double l : lasso_lambdas) out.push_back(PenaltySpec::lasso(l));
            break;
        case PenaltyKind::ElasticNet:
            for (double a : alphas) {
                for (double l : lasso_lambdas) out.push_back(PenaltySpec::elasticnet(l, a));
            }
            break;
    }
    for (const auto& c : out) c.validate();
    return out;
}

// ---------------------------------------------------------------------------
// Cross-validated fitting

namespace {

struct Solved {
    LinearModel model;
    bool converged = true;
};

Solved solve(const CenteredGram& sys, const PenaltySpec& p, const CdOptions& cd,
             std::span<const double> warm = {}) {
    if (p.kind == PenaltyKind::Ridge) return {solve_ridge(sys, p.lambda), true};
    auto r = solve_coordinate_descent(sys, p.l1(), p.l2(), cd, warm);
    return {std::move(r.model), r.converged};
}

// Order in which candidates are solved on one split: ridge in grid order;
// penalized-CD kinds grouped by alpha with lambda descending, so each solve
// can warm-start from the previous (more regularized) one.
std::vector<std::size_t> solve_order(const std::vector<PenaltySpec>& cands) {
    std::vector<std::size_t> order(cands.size());
    std::iota(order.begin(), order.end(), 0);
    if (cands.empty() || cands.front().kind == PenaltyKind::Ridge) return order;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (cands[a].alpha != cands[b].alpha) return cands[a].alpha < cands[b].alpha;
        return cands[a].lambda > cands[b].lambda;
    });
    return order;
}

struct FoldContext {
    std::vector<std::size_t> train;
    std::vector<std::size_t> val;
    Standardizer scaler;
    Matrix x_train;  // standardized
    std::vector<double> y_train;
};

FoldContext make_fold(const Matrix& X, std::span<const double> y, const FoldAssignment& folds,
                      int l) {
    FoldContext f;
    f.train = folds.complement(l);
    f.val = folds.members(l);
    const Matrix raw = X.select_rows(f.train);
    f.scaler = Standardizer::fit(raw);
    f.x_train = f.scaler.transform(raw);
    f.y_train.resize(f.train.size());
    for (std::size_t i = 0; i < f.train.size(); ++i) f.y_train[i] = y[f.train[i]];
    return f;
}

void check_inputs(const Matrix& X, std::span<const double> y, const FoldAssignment& folds) {
    require_same_length(X.rows(), y.size(), "design rows vs target");
    require_same_length(folds.n_samples(), y.size(), "fold assignment vs target");
    if (X.cols() == 0) throw Error(ErrorKind::Dimension, "design matrix has no columns");
    require_finite(y, "target");
    for (std::size_t j = 0; j < X.cols(); ++j) require_finite(X.col(j), "design matrix");
}

std::size_t choose_candidate(const FoldContext& f, const std::vector<PenaltySpec>& cands,
                             const NestedCvOptions& opts, std::uint64_t seed, FitResult& acc) {
    const std::size_t m = f.train.size();
    const FoldAssignment inner = random_partition(m, opts.inner_folds, seed);
    const auto order = solve_order(cands);
    std::vector<double> sse(cands.size(), 0.0);

    for (int j = 0; j < opts.inner_folds; ++j) {
        const auto tr = inner.complement(j);
        const auto va = inner.members(j);
        const CenteredGram sys = CenteredGram::build(f.x_train, f.y_train, tr);
        const Matrix x_val = f.x_train.select_rows(va);
        std::vector<double> y_val(va.size());
        for (std::size_t i = 0; i < va.size(); ++i) y_val[i] = f.y_train[va[i]];

        std::vector<double> warm;
        double warm_alpha = -1.0;
        for (std::size_t c : order) {
            if (cands[c].alpha != warm_alpha) {
                warm.clear();
                warm_alpha = cands[c].alpha;
            }
            Solved s = solve(sys, cands[c], opts.cd, warm);
            ++acc.fit_calls;
            if (!s.converged) ++acc.nonconverged_fits;
            const auto pred = s.model.predict(x_val);
            sse[c] += kernels::squared_distance(pred, y_val);
            warm = s.model.weights;
        }
    }
    return static_cast<std::size_t>(std::min_element(sse.begin(), sse.end()) - sse.begin());
}

void finalize(FitResult& r, std::span<const double> y, const FoldAssignment& folds,
              const std::vector<double>& fold_intercepts) {
    const std::size_t L = static_cast<std::size_t>(folds.n_folds());
    const std::size_t d = r.fold_weights.front().size();
    r.weights.assign(d, 0.0);
    r.intercept = 0.0;
    double zeros = 0.0;
    for (std::size_t l = 0; l < L; ++l) {
        for (std::size_t j = 0; j < d; ++j) {
            r.weights[j] += r.fold_weights[l][j] / static_cast<double>(L);
            if (r.fold_weights[l][j] == 0.0) zeros += 1.0;
        }
        r.intercept += fold_intercepts[l] / static_cast<double>(L);
    }
    r.sparsity = zeros / static_cast<double>(L * d);

    r.per_fold_rmse.resize(L);
    for (int l = 0; l < folds.n_folds(); ++l) {
        const auto idx = folds.members(l);
        std::vector<double> p(idx.size()), t(idx.size());
        for (std::size_t i = 0; i < idx.size(); ++i) {
            p[i] = r.oof_pred[idx[i]];
            t[i] = y[idx[i]];
        }
        r.per_fold_rmse[static_cast<std::size_t>(l)] = rmse(p, t);
    }

    // Modal penalty; ties resolved by first occurrence across folds.
    std::size_t best = 0, best_count = 0;
    for (std::size_t a = 0; a < r.fold_penalty.size(); ++a) {
        std::size_t c = 0;
        for (const auto& p : r.fold_penalty) c += (p == r.fold_penalty[a]) ? 1 : 0;
        if (c > best_count) {
            best = a;
            best_count = c;
        }
    }
    r.penalty = r.fold_penalty[best];
}

template <typename Select>
FitResult outer_loop(const Matrix& X, std::span<const double> y, const FoldAssignment& folds,
                     PenaltyKind kind, const CdOptions& cd, Select&& select) {
    check_inputs(X, y, folds);
    FitResult r;
    r.kind = kind;
    r.oof_pred.assign(y.size(), 0.0);
    std::vector<double> fold_intercepts;
    for (int l = 0; l < folds.n_folds(); ++l) {
        try {
            const FoldContext f = make_fold(X, y, folds, l);
            const PenaltySpec chosen = select(f, l, r);
            const CenteredGram sys = CenteredGram::build(f.x_train, f.y_train);
            Solved s = solve(sys, chosen, cd);
            ++r.fit_calls;
            if (!s.converged) ++r.nonconverged_fits;
            const LinearModel raw = f.scaler.to_raw(s.model);
            const auto pred = raw.predict(X.select_rows(f.val));
            for (std::size_t i = 0; i < f.val.size(); ++i) r.oof_pred[f.val[i]] = pred[i];
            r.fold_penalty.push_back(chosen);
            r.fold_weights.push_back(s.model.weights);
            fold_intercepts.push_back(s.model.intercept);
            r.fold_models.push_back(raw);
        } catch (const Error& e) {
            throw Error(e.kind(), "outer fold " + std::to_string(l) + ": " + e.what());
        }
    }
    finalize(r, y, folds, fold_intercepts);
    return r;
}

}  // namespace

std::vector<double> FitResult::predict(const Matrix& X) const {
    if (fold_models.empty()) throw Error(ErrorKind::Input, "FitResult has no fitted models");
    std::vector<double> out(X.rows(), 0.0);
    const double w = 1.0 / static_cast<double>(fold_models.size());
    for (const auto& m : fold_models) kernels::axpy(w, m.predict(X), out);
    return out;
}

FitResult nested_cv_fit(const Matrix& X, std::span<const double> y, const FoldAssignment& folds,
                        PenaltyKind kind, const Grid& grid, const NestedCvOptions& opts) {
    if (opts.inner_folds < 2) throw Error(ErrorKind::Config, "inner_folds must be >= 2");
    const auto cands = grid.candidates(kind);
    if (cands.empty()) {
        throw Error(ErrorKind::Config, "empty grid for " + std::string(to_string(kind)));
    }
    return outer_loop(X, y, folds, kind, opts.cd,
                      [&](const FoldContext& f, int l, FitResult& acc) {
                          const std::uint64_t seed =
                              derive_seed(opts.seed, static_cast<std::uint64_t>(l), 0x1a5e);
                          return cands[choose_candidate(f, cands, opts, seed, acc)];
                      });
}

FitResult cv_fit_fixed(const Matrix& X, std::span<const double> y, const FoldAssignment& folds,
                       const PenaltySpec& penalty, const CdOptions& cd) {
    penalty.validate();
    return outer_loop(X, y, folds, penalty.kind, cd,
                      [&](const FoldContext&, int, FitResult&) { return penalty; });
}

std::vector<PathPoint> regularization_path(const Matrix& X, std::span<const double> y,
                                           const FoldAssignment& folds, PenaltyKind kind,
                                           const Grid& grid, const CdOptions& cd) {
    check_inputs(X, y, folds);
    const auto cands = grid.candidates(kind);
    const auto order = solve_order(cands);
    const std::size_t L = static_cast<std::size_t>(folds.n_folds());
    std::vector<std::vector<double>> fold_rmse(cands.size(), std::vector<double>(L));
    std::vector<double> nonzero(cands.size(), 0.0);

    for (int l = 0; l < folds.n_folds(); ++l) {
        const FoldContext f = make_fold(X, y, folds, l);
        const CenteredGram sys = CenteredGram::build(f.x_train, f.y_train);
        const Matrix x_val = X.select_rows(f.val);
        std::vector<double> y_val(f.val.size());
        for (std::size_t i = 0; i < f.val.size(); ++i) y_val[i] = y[f.val[i]];
        std::vector<double> warm;
        double warm_alpha = -1.0;
        for (std::size_t c : order) {
            if (cands[c].alpha != warm_alpha) {
                warm.clear();
                warm_alpha = cands[c].alpha;
            }
            Solved s = solve(sys, cands[c], cd, warm);
            warm = s.model.weights;
            const auto pred = f.scaler.to_raw(s.model).predict(x_val);
            fold_rmse[c][static_cast<std::size_t>(l)] = rmse(pred, y_val);
            const auto nz = std::count_if(s.model.weights.begin(), s.model.weights.end(),
                                          [](double v) { return v != 0.0; });
            nonzero[c] += static_cast<double>(nz) /
                          static_cast<double>(s.model.weights.size() * L);
        }
    }

    std::vector<PathPoint> out;
    out.reserve(cands.size());
    for (std::size_t c = 0; c < cands.size(); ++c) {
        PathPoint p;
        p.penalty = cands[c];
        p.mean_rmse = kernels::sum(fold_rmse[c]) / static_cast<double>(L);
        double ss = 0.0;
        for (double v : fold_rmse[c]) ss += (v - p.mean_rmse) * (v - p.mean_rmse);
        p.std_rmse = std::sqrt(ss / static_cast<double>(L - 1));
        p.nonzero_fraction = nonzero[c];
        out.push_back(p);
    }
    return out;
}

}  // namespace stackreg
