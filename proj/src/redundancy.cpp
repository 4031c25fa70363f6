#include "stackreg/redundancy.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "stackreg/kernels.hpp"

namespace stackreg {

double RedundancyConfig::effective_tau_mse(std::span<const double> target) const {
    if (tau_mse) return *tau_mse;
    return kDefaultMseFraction * variance(target);
}

void RedundancyConfig::validate() const {
    if (!(tau_corr > 0.0 && tau_corr <= 1.0)) {
        throw Error(ErrorKind::Config, "tau_corr must lie in (0, 1]");
    }
    if (tau_mse && !(*tau_mse >= 0.0)) throw Error(ErrorKind::Config, "tau_mse must be >= 0");
    if (!(tau_var >= 0.0) || !std::isfinite(tau_var)) {
        throw Error(ErrorKind::Config, "tau_var must be finite and >= 0");
    }
}

namespace {

struct ColumnMoments {
    double mean = 0.0;
    double ss = 0.0;  // centered sum of squares; 0 for constant columns
};

ColumnMoments moments(std::span<const double> c) {
    ColumnMoments m;
    m.mean = kernels::sum(c) / static_cast<double>(c.size());
    m.ss = kernels::centered_dot(c, m.mean, c, m.mean);
    double scale = 0.0;
    for (double v : c) scale = std::max(scale, std::fabs(v));
    const double s = 1e-14 * scale;
    if (!(m.ss > static_cast<double>(c.size()) * s * s)) m.ss = 0.0;
    return m;
}

double column_corr(std::span<const double> a, const ColumnMoments& ma, std::span<const double> b,
                   const ColumnMoments& mb) {
    if (ma.ss == 0.0 || mb.ss == 0.0) return (ma.ss == 0.0 && mb.ss == 0.0) ? 1.0 : 0.0;
    const double r = kernels::centered_dot(a, ma.mean, b, mb.mean) / std::sqrt(ma.ss * mb.ss);
    return std::clamp(r, -1.0, 1.0);
}

ConditioningStats spectrum_of(const std::vector<double>& corr, std::size_t k) {
    ConditioningStats s;
    if (k == 1) {
        s.spectrum = {1.0};
        return s;
    }
    Eigen::MatrixXd c(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k));
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j < k; ++j) {
            c(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = corr[i * k + j];
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(c, Eigen::EigenvaluesOnly);
    if (eig.info() != Eigen::Success) {
        throw Error(ErrorKind::Degenerate, "eigendecomposition of correlation matrix failed");
    }
    s.spectrum.resize(k);
    for (std::size_t i = 0; i < k; ++i) {
        s.spectrum[i] = std::fabs(eig.eigenvalues()(static_cast<Eigen::Index>(i)));
    }
    std::sort(s.spectrum.begin(), s.spectrum.end(), std::greater<>());
    const double smax = s.spectrum.front();
    const double smin = s.spectrum.back();
    // Singular values at rounding level relative to sigma_max count as zero.
    s.kappa = smin > 1e-15 * smax ? smax / smin : std::numeric_limits<double>::infinity();
    double trace = 0.0;
    for (std::size_t i = 0; i < k; ++i) trace += corr[i * k + i];
    s.eff_rank = trace / smax;
    return s;
}

std::vector<double> corr_of(const PredictionMatrix& oof, const std::vector<ColumnMoments>& m) {
    const std::size_t k = oof.n_models();
    std::vector<double> c(k * k, 0.0);
    for (std::size_t i = 0; i < k; ++i) {
        c[i * k + i] = 1.0;
        for (std::size_t j = 0; j < i; ++j) {
            const double r = column_corr(oof.column(i), m[i], oof.column(j), m[j]);
            c[i * k + j] = r;
            c[j * k + i] = r;
        }
    }
    return c;
}

// Conditioning over nonconstant columns only; a pool with fewer than two
// such columns reports the trivial 1 x 1 spectrum.
ConditioningStats conditioning_of_subset(const PredictionMatrix& oof,
                                         const std::vector<ColumnMoments>& m,
                                         const std::vector<std::size_t>& subset) {
    std::vector<std::size_t> live;
    for (auto k : subset) {
        if (m[k].ss > 0.0) live.push_back(k);
    }
    if (live.size() < 2) return spectrum_of({1.0}, 1);
    const PredictionMatrix sub = oof.select_models(live);
    std::vector<ColumnMoments> sm;
    for (auto k : live) sm.push_back(m[k]);
    return spectrum_of(corr_of(sub, sm), live.size());
}

}  // namespace

std::vector<double> correlation_matrix(const PredictionMatrix& oof) {
    std::vector<ColumnMoments> m;
    for (std::size_t k = 0; k < oof.n_models(); ++k) {
        m.push_back(moments(oof.column(k)));
        if (m.back().ss == 0.0) {
            throw Error(ErrorKind::Degenerate,
                        "model '" + oof.name(k) + "' has constant predictions; prune it first");
        }
    }
    return corr_of(oof, m);
}

ConditioningStats conditioning(const PredictionMatrix& oof) {
    if (oof.n_models() < 2) {
        throw Error(ErrorKind::Dimension, "conditioning needs at least 2 models");
    }
    if (oof.n_rows() < 2) throw Error(ErrorKind::Dimension, "conditioning needs at least 2 rows");
    return spectrum_of(correlation_matrix(oof), oof.n_models());
}

VariancePruneResult variance_prune(const PredictionMatrix& oof, double tau_var) {
    if (!(tau_var >= 0.0)) throw Error(ErrorKind::Config, "tau_var must be >= 0");
    if (oof.n_models() == 0) throw Error(ErrorKind::Selection, "empty model pool");
    std::vector<std::size_t> keep;
    VariancePruneResult out;
    for (std::size_t k = 0; k < oof.n_models(); ++k) {
        const ColumnMoments m = moments(oof.column(k));
        const double var = m.ss / static_cast<double>(oof.n_rows());
        if (var > tau_var) {
            keep.push_back(k);
        } else {
            out.removed.push_back(oof.name(k));
        }
    }
    if (keep.empty()) {
        throw Error(ErrorKind::Selection, "variance pruning removed every model (tau_var = " +
                                              std::to_string(tau_var) + ")");
    }
    out.kept = oof.select_models(keep);
    return out;
}

SelectionResult project(const PredictionMatrix& oof, const TargetVector& target,
                        const RedundancyConfig& cfg) {
    cfg.validate();
    const std::size_t K = oof.n_models();
    if (K == 0) throw Error(ErrorKind::Selection, "empty model pool");
    require_same_length(oof.n_rows(), target.size(), "predictions vs target");

    SelectionResult res;
    res.tau_mse_used = cfg.effective_tau_mse(target.values());
    res.model_rmse.resize(K);
    std::vector<ColumnMoments> m(K);
    for (std::size_t k = 0; k < K; ++k) {
        res.model_rmse[k] = rmse(oof.column(k), target.values());
        m[k] = moments(oof.column(k));
    }

    std::vector<std::size_t> order(K);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (res.model_rmse[a] != res.model_rmse[b]) return res.model_rmse[a] < res.model_rmse[b];
        return oof.name(a) < oof.name(b);
    });

    const double n = static_cast<double>(oof.n_rows());
    for (std::size_t k : order) {
        bool keep = true;
        for (std::size_t kept : res.retained) {
            const double rho = column_corr(oof.column(k), m[k], oof.column(kept), m[kept]);
            if (rho < cfg.tau_corr) continue;
            const double mse = kernels::squared_distance(oof.column(k), oof.column(kept)) / n;
            if (mse <= res.tau_mse_used) {
                res.removals.push_back({oof.name(k), oof.name(kept), rho, mse,
                                        res.model_rmse[k] - res.model_rmse[kept]});
                keep = false;
                break;
            }
        }
        if (keep) res.retained.push_back(k);
    }
    res.k_eff = res.retained.size();
    for (auto k : res.retained) res.retained_names.push_back(oof.name(k));

    std::vector<std::size_t> all(K);
    std::iota(all.begin(), all.end(), 0);
    const ConditioningStats before = conditioning_of_subset(oof, m, all);
    const ConditioningStats after = conditioning_of_subset(oof, m, res.retained);
    res.kappa_before = before.kappa;
    res.kappa_after = after.kappa;
    res.eff_rank_before = before.eff_rank;
    res.eff_rank_after = after.eff_rank;
    return res;
}

SelectionResult keep_all(const PredictionMatrix& oof, const TargetVector& target) {
    const std::size_t K = oof.n_models();
    if (K == 0) throw Error(ErrorKind::Selection, "empty model pool");
    require_same_length(oof.n_rows(), target.size(), "predictions vs target");
    SelectionResult res;
    std::vector<ColumnMoments> m(K);
    for (std::size_t k = 0; k < K; ++k) {
        res.model_rmse.push_back(rmse(oof.column(k), target.values()));
        m[k] = moments(oof.column(k));
        res.retained.push_back(k);
        res.retained_names.push_back(oof.name(k));
    }
    res.k_eff = K;
    const ConditioningStats c = conditioning_of_subset(oof, m, res.retained);
    res.kappa_before = res.kappa_after = c.kappa;
    res.eff_rank_before = res.eff_rank_after = c.eff_rank;
    return res;
}

}  // namespace stackreg
