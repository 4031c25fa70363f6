#include <catch_amalgamated.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <vector>

#include "stackreg/redundancy.hpp"
#include "stackreg/synth.hpp"
#include "test_util.hpp"

using namespace stackreg;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;
using testutil::error_kind;

namespace {

double mse_between(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return s / static_cast<double>(a.size());
}

// Three clusters of four near-duplicates around independent signals.
struct Clustered {
    PredictionMatrix pool;
    std::vector<double> y;
    std::vector<int> cluster;
};

Clustered clustered_pool(std::uint64_t seed) {
    Rng rng(seed);
    const std::size_t n = 2000;
    Clustered c;
    c.y = testutil::normals(rng, n);
    std::vector<std::string> names;
    std::vector<std::vector<double>> cols;
    for (int k = 0; k < 3; ++k) {
        // Each cluster mixes the target with its own large independent component
        // so cross-cluster correlation stays low.
        const auto base = testutil::normals(rng, n);
        for (int m = 0; m < 4; ++m) {
            std::vector<double> col(n);
            const double noise = 0.02 * (1 + m);
            for (std::size_t i = 0; i < n; ++i) col[i] = 0.3 * c.y[i] + base[i] + noise * rng.normal();
            names.push_back("k" + std::to_string(k) + "_" + std::to_string(m));
            cols.push_back(std::move(col));
            c.cluster.push_back(k);
        }
    }
    c.pool = PredictionMatrix(names, cols);
    return c;
}

}  // namespace

TEST_CASE("identical columns collapse to one") {
    const std::vector<double> y{1, 2, 3, 4, 5};
    const std::vector<double> p{1.1, 2.2, 2.9, 4.1, 5.2};
    const PredictionMatrix m({"b", "a"}, std::vector<std::vector<double>>{p, p});
    const SelectionResult s = project(m, TargetVector(y), RedundancyConfig{});
    CHECK(s.k_eff == 1);
    CHECK(s.retained_names == std::vector<std::string>{"a"});  // RMSE tie broken by name
    REQUIRE(s.removals.size() == 1);
    CHECK(s.removals[0].removed == "b");
    CHECK(s.removals[0].kept == "a");
    CHECK_THAT(s.removals[0].rho, WithinAbs(1.0, 1e-12));
    CHECK(s.removals[0].mse_between == 0.0);
    CHECK(s.removals[0].delta_rmse == 0.0);
}

TEST_CASE("unreachable correlation threshold keeps everything") {
    Rng rng(41);
    const auto y = testutil::normals(rng, 300);
    std::vector<std::vector<double>> cols;
    for (int k = 0; k < 4; ++k) {
        std::vector<double> c(300);
        for (std::size_t i = 0; i < 300; ++i) c[i] = y[i] + 0.05 * rng.normal();
        cols.push_back(c);
    }
    const PredictionMatrix m({"a", "b", "c", "d"}, cols);
    RedundancyConfig cfg;
    cfg.tau_corr = 1.0;
    cfg.tau_mse = std::numeric_limits<double>::infinity();
    CHECK(project(m, TargetVector(y), cfg).k_eff == 4);
    cfg.tau_corr = 0.95;
    CHECK(project(m, TargetVector(y), cfg).k_eff == 1);
}

TEST_CASE("clustered pool keeps the best member of each cluster") {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const Clustered c = clustered_pool(seed);
        const TargetVector y(c.y);
        RedundancyConfig cfg;
        cfg.tau_mse = 1e9;
        const SelectionResult s = project(c.pool, y, cfg);
        REQUIRE(s.k_eff == 3);
        std::set<std::string> expect;
        for (int k = 0; k < 3; ++k) {
            std::size_t best = 0;
            double br = std::numeric_limits<double>::infinity();
            for (std::size_t j = 0; j < c.pool.n_models(); ++j) {
                if (c.cluster[j] != k) continue;
                const double r = rmse(c.pool.column(j), c.y);
                if (r < br) {
                    br = r;
                    best = j;
                }
            }
            expect.insert(c.pool.name(best));
        }
        CHECK(std::set<std::string>(s.retained_names.begin(), s.retained_names.end()) == expect);
    }
}

TEST_CASE("selection invariants on random pools") {
    Rng rng(42);
    for (int t = 0; t < 30; ++t) {
        const std::size_t n = 200;
        const std::size_t K = 3 + rng.below(10);
        const auto y = testutil::normals(rng, n);
        std::vector<std::vector<double>> cols;
        std::vector<std::string> names;
        const auto shared = testutil::normals(rng, n);
        for (std::size_t k = 0; k < K; ++k) {
            std::vector<double> c(n);
            const double own = 0.05 + 0.5 * rng.uniform();
            for (std::size_t i = 0; i < n; ++i) c[i] = y[i] + 0.4 * shared[i] + own * rng.normal();
            cols.push_back(c);
            names.push_back("m" + std::to_string(rng.below(1000)) + "_" + std::to_string(k));
        }
        const PredictionMatrix pool(names, cols);
        RedundancyConfig cfg;
        cfg.tau_corr = 0.8 + 0.19 * rng.uniform();
        cfg.tau_mse = 0.5 * rng.uniform();
        const SelectionResult s = project(pool, TargetVector(y), cfg);

        CHECK(s.k_eff == s.retained.size());
        CHECK(s.retained.size() + s.removals.size() == K);
        std::set<std::string> all(s.retained_names.begin(), s.retained_names.end());
        for (const auto& r : s.removals) all.insert(r.removed);
        CHECK(all.size() == K);

        // Antichain: no retained pair satisfies both conditions.
        for (std::size_t a = 0; a < s.retained.size(); ++a) {
            for (std::size_t b = a + 1; b < s.retained.size(); ++b) {
                const auto ca = pool.column(s.retained[a]), cb = pool.column(s.retained[b]);
                CHECK_FALSE((pearson(ca, cb) >= cfg.tau_corr && mse_between(ca, cb) <= *cfg.tau_mse));
            }
        }
        // Every removal points at a kept model that was no worse.
        for (const auto& r : s.removals) {
            CHECK(r.delta_rmse >= 0.0);
            CHECK(std::find(s.retained_names.begin(), s.retained_names.end(), r.kept) != s.retained_names.end());
            CHECK(r.rho >= cfg.tau_corr);
            CHECK(r.mse_between <= *cfg.tau_mse);
            const double rr = rmse(pool.column(pool.index_of(r.removed)), y);
            const double rk = rmse(pool.column(pool.index_of(r.kept)), y);
            CHECK((rk < rr || (rk == rr && r.kept < r.removed)));
        }

        // Column order does not matter.
        std::vector<std::size_t> perm(K);
        std::iota(perm.begin(), perm.end(), 0);
        rng.shuffle(std::span<std::size_t>(perm));
        const SelectionResult sp = project(pool.select_models(perm), TargetVector(y), cfg);
        CHECK(sp.retained_names == s.retained_names);
        REQUIRE(sp.removals.size() == s.removals.size());
        for (std::size_t i = 0; i < s.removals.size(); ++i) {
            CHECK(sp.removals[i].removed == s.removals[i].removed);
            CHECK(sp.removals[i].kept == s.removals[i].kept);
        }
    }
}

TEST_CASE("raising tau_corr never shrinks the retained set on clustered pools") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        SynthConfig sc;
        sc.n_samples = 500;
        sc.n_clusters = 2 + seed % 4;
        sc.models_per_cluster = 2 + seed % 3;
        sc.rho_within = 0.8 + 0.01 * static_cast<double>(seed);
        sc.seed = seed;
        const SynthData d = synthesize(sc);
        std::size_t prev = 0;
        for (double tc = 0.5; tc <= 1.0; tc += 0.05) {
            RedundancyConfig cfg;
            cfg.tau_corr = std::min(tc, 1.0);
            const std::size_t k = project(d.predictions, TargetVector(d.target), cfg).k_eff;
            CHECK(k >= prev);
            prev = k;
        }
    }
}

TEST_CASE("tau_mse default and correlation-only mode") {
    const std::vector<double> y{0, 2, 4, 6};
    RedundancyConfig cfg;
    CHECK_THAT(cfg.effective_tau_mse(y), WithinAbs(0.05 * 5.0, 1e-12));
    cfg.tau_mse = 0.7;
    CHECK(cfg.effective_tau_mse(y) == 0.7);

    // Perfectly correlated but offset columns: only correlation-only mode merges them.
    const std::vector<double> a{0, 2, 4, 6}, b{3, 5, 7, 9};
    const PredictionMatrix m({"a", "b"}, std::vector<std::vector<double>>{a, b});
    RedundancyConfig joint;
    CHECK(project(m, TargetVector(y), joint).k_eff == 2);
    RedundancyConfig corr_only;
    corr_only.tau_mse = std::numeric_limits<double>::infinity();
    const SelectionResult s = project(m, TargetVector(y), corr_only);
    CHECK(s.retained_names == std::vector<std::string>{"a"});
    CHECK_THAT(s.removals[0].delta_rmse, WithinAbs(3.0, 1e-12));
    CHECK_THAT(s.tau_mse_used, WithinAbs(std::numeric_limits<double>::infinity(), 0.0));
}

TEST_CASE("config validation") {
    RedundancyConfig c;
    c.tau_corr = 0.0;
    CHECK(error_kind([&] { c.validate(); }) == ErrorKind::Config);
    c.tau_corr = 1.01;
    CHECK(error_kind([&] { c.validate(); }) == ErrorKind::Config);
    c.tau_corr = 0.9;
    c.tau_mse = -1.0;
    CHECK(error_kind([&] { c.validate(); }) == ErrorKind::Config);
    c.tau_mse.reset();
    c.tau_var = -0.5;
    CHECK(error_kind([&] { c.validate(); }) == ErrorKind::Config);
    const PredictionMatrix empty;
    CHECK(error_kind([&] { project(empty, TargetVector({1.0, 2.0}), RedundancyConfig{}); }) == ErrorKind::Selection);
}

TEST_CASE("variance pruning") {
    const std::vector<double> constant(6, 3.0);
    // Population variance 0.02 exactly.
    const double h = std::sqrt(0.02);
    const std::vector<double> small{h, -h, h, -h, h, -h};
    const std::vector<double> wide{1, -1, 2, -2, 3, -3};
    const PredictionMatrix m({"const", "small", "wide"},
                             std::vector<std::vector<double>>{constant, small, wide});
    const auto r = variance_prune(m, 0.01);
    CHECK(r.removed == std::vector<std::string>{"const"});
    CHECK(r.kept.names() == std::vector<std::string>{"small", "wide"});
    CHECK(variance_prune(m, 0.0).removed == std::vector<std::string>{"const"});
    CHECK(variance_prune(m, 0.5).removed == std::vector<std::string>{"const", "small"});
    CHECK(error_kind([&] { variance_prune(m, 100.0); }) == ErrorKind::Selection);
    CHECK(error_kind([&] { variance_prune(m, -1.0); }) == ErrorKind::Config);
}

TEST_CASE("two columns at correlation 0.6") {
    Rng rng(43);
    const std::size_t n = 500;
    auto a = testutil::normals(rng, n);
    auto c = testutil::normals(rng, n);
    // Standardize a, then make c orthogonal to a and standardize it too.
    auto standardize = [](std::vector<double>& v) {
        const double m = mean(v), s = std::sqrt(variance(v));
        for (auto& x : v) x = (x - m) / s;
    };
    standardize(a);
    standardize(c);
    double proj = 0.0;
    for (std::size_t i = 0; i < n; ++i) proj += a[i] * c[i];
    proj /= static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) c[i] -= proj * a[i];
    standardize(c);
    std::vector<double> b(n);
    for (std::size_t i = 0; i < n; ++i) b[i] = 0.6 * a[i] + 0.8 * c[i];
    const ConditioningStats s = conditioning(PredictionMatrix({"a", "b"}, std::vector<std::vector<double>>{a, b}));
    REQUIRE(s.spectrum.size() == 2);
    CHECK_THAT(s.spectrum[0], WithinAbs(1.6, 1e-9));
    CHECK_THAT(s.spectrum[1], WithinAbs(0.4, 1e-9));
    CHECK_THAT(s.kappa, WithinAbs(4.0, 1e-8));
    CHECK_THAT(s.eff_rank, WithinAbs(1.25, 1e-9));
}

TEST_CASE("independent columns are well conditioned") {
    Rng rng(44);
    std::vector<std::vector<double>> cols;
    for (int k = 0; k < 5; ++k) cols.push_back(testutil::normals(rng, 50000));
    const ConditioningStats s = conditioning(PredictionMatrix({"a", "b", "c", "d", "e"}, cols));
    CHECK(s.kappa < 1.1);
    CHECK(s.eff_rank > 4.5);
    CHECK(s.eff_rank <= 5.0);
}

TEST_CASE("spectrum matches an independent eigen-solver") {
    Rng rng(45);
    for (int t = 0; t < 10; ++t) {
        const std::size_t K = 2 + rng.below(7);
        const std::size_t n = 100;
        const auto common = testutil::normals(rng, n);
        std::vector<std::vector<double>> cols;
        std::vector<std::string> names;
        for (std::size_t k = 0; k < K; ++k) {
            std::vector<double> c(n);
            const double w = rng.uniform();
            for (std::size_t i = 0; i < n; ++i) c[i] = w * common[i] + rng.normal();
            cols.push_back(c);
            names.push_back("m" + std::to_string(k));
        }
        const PredictionMatrix pool(names, cols);
        Eigen::MatrixXd C(K, K);
        for (std::size_t i = 0; i < K; ++i) {
            for (std::size_t j = 0; j < K; ++j) {
                C(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = pearson(cols[i], cols[j]);
            }
        }
        Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(C).eigenvalues();
        std::vector<double> e(ev.data(), ev.data() + ev.size());
        std::sort(e.rbegin(), e.rend());
        const ConditioningStats s = conditioning(pool);
        REQUIRE(s.spectrum.size() == K);
        for (std::size_t k = 0; k < K; ++k) CHECK_THAT(s.spectrum[k], WithinAbs(e[k], 1e-10));
        CHECK_THAT(s.kappa, WithinRel(e.front() / e.back(), 1e-9));
        CHECK_THAT(s.eff_rank, WithinRel(static_cast<double>(K) / e.front(), 1e-10));
        CHECK(s.kappa >= 1.0);
        const auto cm = correlation_matrix(pool);
        CHECK_THAT(cm[1], WithinAbs(C(0, 1), 1e-12));
    }
}

TEST_CASE("conditioning errors") {
    const std::vector<double> a{1, 2, 3}, b{2, 2, 2};
    CHECK(error_kind([&] { conditioning(PredictionMatrix({"a", "b"}, std::vector<std::vector<double>>{a, b})); }) ==
          ErrorKind::Degenerate);
    CHECK(error_kind([&] { conditioning(PredictionMatrix({"a"}, std::vector<std::vector<double>>{a})); }) ==
          ErrorKind::Dimension);
}

TEST_CASE("projection improves conditioning on duplicated-plus-noise pools") {
    int kappa_ok = 0, rank_ok = 0, sigma_ok = 0;
    for (int t = 0; t < 20; ++t) {
        SynthConfig sc;
        sc.n_clusters = 2 + static_cast<std::size_t>(t % 4);
        sc.models_per_cluster = 3;
        sc.seed = static_cast<std::uint64_t>(t);
        const SynthData d = synthesize(sc);
        const SelectionResult s = project(d.predictions, TargetVector(d.target), RedundancyConfig{});
        if (s.kappa_after < s.kappa_before) ++kappa_ok;
        if (s.eff_rank_after < s.eff_rank_before) ++rank_ok;
        const auto before = conditioning(d.predictions);
        const auto after = conditioning(d.predictions.select_models(s.retained));
        if (after.spectrum.back() > before.spectrum.back()) ++sigma_ok;
    }
    CHECK(kappa_ok >= 19);
    CHECK(rank_ok >= 19);
    CHECK(sigma_ok >= 19);
}

TEST_CASE("keep_all retains everything in input order") {
    Rng rng(46);
    const auto y = testutil::normals(rng, 100);
    std::vector<std::vector<double>> cols;
    for (int k = 0; k < 3; ++k) {
        std::vector<double> c(100);
        for (std::size_t i = 0; i < 100; ++i) c[i] = y[i] + 0.01 * rng.normal();
        cols.push_back(c);
    }
    const PredictionMatrix m({"z", "y", "x"}, cols);
    const SelectionResult s = keep_all(m, TargetVector(y));
    CHECK(s.retained == std::vector<std::size_t>{0, 1, 2});
    CHECK(s.retained_names == std::vector<std::string>{"z", "y", "x"});
    CHECK(s.removals.empty());
    CHECK(s.kappa_after == s.kappa_before);
    CHECK(s.kappa_before > 10.0);
}
