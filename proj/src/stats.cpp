#include "stackreg/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "stackreg/core.hpp"
#include "stackreg/rng.hpp"

namespace stackreg {

namespace {

// Lentz's method for the continued fraction of I_x(a, b).
double beta_continued_fraction(double a, double b, double x) {
    constexpr int kMaxIter = 300;
    constexpr double kEps = 1e-15;
    constexpr double kTiny = 1e-300;
    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kEps) break;
    }
    return h;
}

}  // namespace

double incomplete_beta(double a, double b, double x) {
    if (!(a > 0.0) || !(b > 0.0)) throw Error(ErrorKind::Input, "incomplete_beta: a, b must be > 0");
    if (!(x >= 0.0 && x <= 1.0)) throw Error(ErrorKind::Input, "incomplete_beta: x outside [0, 1]");
    if (x == 0.0 || x == 1.0) return x;
    const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                             a * std::log(x) + b * std::log1p(-x);
    const double front = std::exp(log_front);
    // The fraction converges fast for x < (a + 1) / (a + b + 2); use symmetry otherwise.
    if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_continued_fraction(a, b, x) / a;
    return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double student_t_two_tailed(double t, double df) {
    if (!(df > 0.0)) throw Error(ErrorKind::Input, "student_t: df must be > 0");
    if (std::isinf(t)) return 0.0;
    if (std::isnan(t)) throw Error(ErrorKind::Input, "student_t: t is NaN");
    const double x = df / (df + t * t);
    return std::clamp(incomplete_beta(0.5 * df, 0.5, x), 0.0, 1.0);
}

TTestResult paired_t_test(std::span<const double> a, std::span<const double> b) {
    require_same_length(a.size(), b.size(), "paired_t_test");
    if (a.size() < 2) throw Error(ErrorKind::Dimension, "paired_t_test needs at least 2 pairs");
    require_finite(a, "paired_t_test a");
    require_finite(b, "paired_t_test b");
    const std::size_t n = a.size();
    std::vector<double> d(n);
    for (std::size_t i = 0; i < n; ++i) d[i] = a[i] - b[i];

    TTestResult r;
    r.df = static_cast<double>(n - 1);
    double s = 0.0;
    for (double v : d) s += v;
    const double md = s / static_cast<double>(n);
    double ss = 0.0;
    for (double v : d) ss += (v - md) * (v - md);
    const bool all_zero = std::all_of(d.begin(), d.end(), [](double v) { return v == 0.0; });
    if (all_zero) return r;  // t = 0, p = 1
    const bool identical = std::all_of(d.begin(), d.end(), [&](double v) { return v == d[0]; });
    if (identical || ss == 0.0) {
        r.exact_difference = true;
        r.t = md > 0.0 ? std::numeric_limits<double>::infinity()
                       : -std::numeric_limits<double>::infinity();
        r.p = 0.0;
        return r;
    }
    const double sd = std::sqrt(ss / r.df);
    r.t = md / (sd / std::sqrt(static_cast<double>(n)));
    r.p = student_t_two_tailed(r.t, r.df);
    return r;
}

ComparisonReport compare_methods(std::string method_a, std::vector<double> fold_rmse_a,
                                 std::string method_b, std::vector<double> fold_rmse_b,
                                 std::size_t n_comparisons, double alpha) {
    if (n_comparisons == 0) throw Error(ErrorKind::Config, "n_comparisons must be >= 1");
    if (!(alpha > 0.0 && alpha < 1.0)) throw Error(ErrorKind::Config, "alpha must lie in (0, 1)");
    ComparisonReport c;
    const TTestResult t = paired_t_test(fold_rmse_a, fold_rmse_b);
    c.method_a = std::move(method_a);
    c.method_b = std::move(method_b);
    c.fold_rmse_a = std::move(fold_rmse_a);
    c.fold_rmse_b = std::move(fold_rmse_b);
    c.t_stat = t.t;
    c.p_value = t.p;
    c.exact_difference = t.exact_difference;
    c.bonferroni_alpha = alpha / static_cast<double>(n_comparisons);
    c.significant = c.p_value <= c.bonferroni_alpha;
    return c;
}

std::string significance_stars(double p) {
    if (p < 0.001) return "***";
    if (p < 0.01) return "**";
    if (p < 0.05) return "*";
    return "";
}

double quantile_sorted(std::span<const double> sorted, double q) {
    if (sorted.empty()) throw Error(ErrorKind::Dimension, "quantile of empty data");
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

BootstrapCI bootstrap_rmse_ci(std::span<const double> errors, int n_resamples, double level,
                              std::uint64_t seed) {
    if (errors.empty()) throw Error(ErrorKind::Dimension, "bootstrap: no errors");
    if (n_resamples < 100) throw Error(ErrorKind::Config, "bootstrap: need >= 100 resamples");
    if (!(level > 0.0 && level < 1.0)) throw Error(ErrorKind::Config, "bootstrap: level in (0, 1)");
    require_finite(errors, "bootstrap errors");

    const std::size_t n = errors.size();
    std::vector<double> sq(n);
    for (std::size_t i = 0; i < n; ++i) sq[i] = errors[i] * errors[i];
    auto stat = [n](double sum_sq) { return std::sqrt(sum_sq / static_cast<double>(n)); };

    BootstrapCI ci;
    ci.n_resamples = n_resamples;
    ci.level = level;
    ci.seed = seed;
    double total = 0.0;
    for (double v : sq) total += v;
    ci.point = stat(total);

    std::vector<double> stats(static_cast<std::size_t>(n_resamples));
    for (int b = 0; b < n_resamples; ++b) {
        Rng rng(derive_seed(seed, static_cast<std::uint64_t>(b), 0xb007));
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += sq[rng.below(n)];
        stats[static_cast<std::size_t>(b)] = stat(s);
    }
    std::sort(stats.begin(), stats.end());
    const double tail = 0.5 * (1.0 - level);
    ci.lo = quantile_sorted(stats, tail);
    ci.hi = quantile_sorted(stats, 1.0 - tail);
    // A constant error vector gives identical resample statistics; pin them to
    // the point estimate so rounding in the summation order cannot split them.
    if (stats.front() == stats.back() ||
        std::all_of(sq.begin(), sq.end(), [&](double v) { return v == sq[0]; })) {
        ci.lo = ci.hi = ci.point;
    }
    return ci;
}

FoldConsistency fold_consistency(std::span<const double> per_fold_rmse) {
    if (per_fold_rmse.size() < 2) {
        throw Error(ErrorKind::Dimension, "fold_consistency needs at least 2 folds");
    }
    require_finite(per_fold_rmse, "fold rmse");
    FoldConsistency f;
    const double n = static_cast<double>(per_fold_rmse.size());
    for (double v : per_fold_rmse) f.mean += v;
    f.mean /= n;
    double ss = 0.0;
    for (double v : per_fold_rmse) ss += (v - f.mean) * (v - f.mean);
    f.std = std::sqrt(ss / (n - 1.0));
    f.cv_percent = f.mean != 0.0 ? 100.0 * f.std / f.mean : 0.0;
    return f;
}

}  // namespace stackreg
