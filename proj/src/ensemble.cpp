#include "stackreg/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "stackreg/kernels.hpp"

namespace stackreg {

std::vector<double> inverse_risk_weights(std::span<const double> risks) {
    if (risks.empty()) throw Error(ErrorKind::Selection, "no members to weight");
    std::vector<double> w(risks.size(), 0.0);
    for (std::size_t m = 0; m < risks.size(); ++m) {
        if (!(risks[m] >= 0.0) || !std::isfinite(risks[m])) {
            throw Error(ErrorKind::Input, "member risks must be finite and >= 0");
        }
        if (risks[m] == 0.0) {
            w[m] = 1.0;
            return w;
        }
    }
    double total = 0.0;
    for (std::size_t m = 0; m < risks.size(); ++m) {
        w[m] = 1.0 / risks[m];
        total += w[m];
    }
    for (double& v : w) v /= total;
    return w;
}

BlendResult blend(const std::vector<BlendMember>& members, std::span<const double> target) {
    if (members.empty()) throw Error(ErrorKind::Selection, "blend: no members");
    const bool with_test = members.front().test_pred.has_value();
    BlendResult out;
    for (const auto& m : members) {
        require_same_length(m.oof_pred.size(), target.size(), "blend member '" + m.name + "'");
        if (m.test_pred.has_value() != with_test) {
            throw Error(ErrorKind::Dimension, "blend: test predictions given for some members only");
        }
        if (with_test) {
            require_same_length(m.test_pred->size(), members.front().test_pred->size(),
                                "blend member '" + m.name + "' test rows");
        }
        out.member_names.push_back(m.name);
        out.risks.push_back(rmse(m.oof_pred, target));
    }
    out.weights = inverse_risk_weights(out.risks);
    for (std::size_t m = 0; m < members.size(); ++m) {
        if (out.risks[m] == 0.0) {
            out.perfect_member = members[m].name;
            break;
        }
    }

    out.final_pred.assign(target.size(), 0.0);
    if (with_test) out.final_test_pred.emplace(members.front().test_pred->size(), 0.0);
    for (std::size_t m = 0; m < members.size(); ++m) {
        if (out.weights[m] == 0.0) continue;
        kernels::axpy(out.weights[m], members[m].oof_pred, out.final_pred);
        if (with_test) kernels::axpy(out.weights[m], *members[m].test_pred, *out.final_test_pred);
    }
    return out;
}

namespace {

// Model indices sorted by name; scanning in this order and keeping strict
// improvements yields lexicographic tie-breaking.
std::vector<std::size_t> name_order(const PredictionMatrix& oof) {
    std::vector<std::size_t> order(oof.n_models());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return oof.name(a) < oof.name(b); });
    return order;
}

}  // namespace

std::pair<std::string, MetricReport> best_single(const PredictionMatrix& oof,
                                                 std::span<const double> target) {
    if (oof.n_models() == 0) throw Error(ErrorKind::Selection, "best_single: empty pool");
    require_same_length(oof.n_rows(), target.size(), "predictions vs target");
    std::size_t best = 0;
    double best_rmse = std::numeric_limits<double>::infinity();
    for (std::size_t k : name_order(oof)) {
        const double r = rmse(oof.column(k), target);
        if (r < best_rmse) {
            best_rmse = r;
            best = k;
        }
    }
    return {oof.name(best), evaluate(oof.column(best), target)};
}

std::vector<double> uniform_average(const PredictionMatrix& oof) {
    if (oof.n_models() == 0) throw Error(ErrorKind::Selection, "uniform_average: empty pool");
    std::vector<double> out(oof.n_rows(), 0.0);
    for (std::size_t k = 0; k < oof.n_models(); ++k) kernels::axpy(1.0, oof.column(k), out);
    const double inv = 1.0 / static_cast<double>(oof.n_models());
    for (double& v : out) v *= inv;
    return out;
}

WeightedAverage weighted_average(const PredictionMatrix& oof, std::span<const double> target) {
    if (oof.n_models() == 0) throw Error(ErrorKind::Selection, "weighted_average: empty pool");
    require_same_length(oof.n_rows(), target.size(), "predictions vs target");
    std::vector<double> risks(oof.n_models());
    for (std::size_t k = 0; k < oof.n_models(); ++k) risks[k] = rmse(oof.column(k), target);
    WeightedAverage out;
    out.weights = inverse_risk_weights(risks);
    out.prediction.assign(oof.n_rows(), 0.0);
    for (std::size_t k = 0; k < oof.n_models(); ++k) {
        if (out.weights[k] != 0.0) kernels::axpy(out.weights[k], oof.column(k), out.prediction);
    }
    return out;
}

FitResult linear_stack(const PredictionMatrix& oof, std::span<const double> target,
                       const FoldAssignment& folds, double lambda) {
    return cv_fit_fixed(oof.matrix(), target, folds, PenaltySpec::ridge(lambda));
}

FitResult linear_stack(const PredictionMatrix& oof, std::span<const double> target,
                       const FoldAssignment& folds, const Grid& grid,
                       const NestedCvOptions& opts) {
    return nested_cv_fit(oof.matrix(), target, folds, PenaltyKind::Ridge, grid, opts);
}

std::vector<double> HillClimbState::weights() const {
    const double total = static_cast<double>(std::accumulate(counts.begin(), counts.end(),
                                                             std::size_t{0}));
    std::vector<double> w(counts.size(), 0.0);
    if (total == 0.0) return w;
    for (std::size_t k = 0; k < counts.size(); ++k) w[k] = static_cast<double>(counts[k]) / total;
    return w;
}

namespace {

// RMSE values within rounding of each other count as tied, so that exact ties
// are broken by name rather than by summation order.
bool clearly_less(double a, double b) {
    if (std::isinf(b)) return !std::isinf(a) || a < b;
    return a < b - 1e-12 * std::max(1.0, b);
}

}  // namespace

HillClimbState hill_climb(const PredictionMatrix& oof, std::span<const double> target,
                          const HillClimbOptions& opts) {
    const std::size_t K = oof.n_models();
    if (K == 0) throw Error(ErrorKind::Selection, "hill_climb: empty pool");
    if (opts.max_steps < 1) throw Error(ErrorKind::Config, "hill_climb: max_steps must be >= 1");
    require_same_length(oof.n_rows(), target.size(), "predictions vs target");

    const std::size_t n = oof.n_rows();
    const auto order = name_order(oof);
    HillClimbState st;
    st.counts.assign(K, 0);

    // Step 1: best single model.
    std::size_t first = order.front();
    double first_rmse = std::numeric_limits<double>::infinity();
    for (std::size_t k : order) {
        const double r = rmse(oof.column(k), target);
        if (clearly_less(r, first_rmse)) {
            first_rmse = r;
            first = k;
        }
    }
    std::vector<double> sum(oof.column(first).begin(), oof.column(first).end());
    std::size_t total = 1;
    st.counts[first] = 1;
    st.current_pred = sum;
    st.current_rmse = first_rmse;
    st.history.push_back({1, oof.name(first), first_rmse});

    std::vector<double> trial(n);
    std::size_t stale = 0;
    for (std::size_t step = 2; step <= opts.max_steps; ++step) {
        if (st.current_rmse == 0.0) break;
        const double inv = 1.0 / static_cast<double>(total + 1);
        std::size_t best = order.front();
        double best_rmse = std::numeric_limits<double>::infinity();
        for (std::size_t k : order) {
            std::copy(sum.begin(), sum.end(), trial.begin());
            kernels::axpy(1.0, oof.column(k), trial);
            for (double& v : trial) v *= inv;
            const double r = std::sqrt(kernels::squared_distance(trial, target) /
                                       static_cast<double>(n));
            if (clearly_less(r, best_rmse)) {
                best_rmse = r;
                best = k;
            }
        }
        if (st.counts[best] == total) break;  // averaging with itself changes nothing
        if (clearly_less(st.current_rmse, best_rmse)) break;

        kernels::axpy(1.0, oof.column(best), sum);
        ++total;
        ++st.counts[best];
        st.current_pred = sum;
        for (double& v : st.current_pred) v *= inv;
        stale = clearly_less(best_rmse, st.current_rmse) ? 0 : stale + 1;
        st.current_rmse = best_rmse;
        st.history.push_back({step, oof.name(best), best_rmse});
        if (stale >= opts.patience) break;
    }
    return st;
}

}  // namespace stackreg
