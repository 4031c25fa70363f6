#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "stackreg/ensemble.hpp"
#include "stackreg/folds.hpp"
#include "test_util.hpp"

using namespace stackreg;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;
using testutil::error_kind;

namespace {

// Members whose OOF RMSE against a zero target is exactly r.
BlendMember member_with_rmse(const std::string& name, double r) {
    return {name, {r, -r, r, -r}, std::nullopt};
}

PredictionMatrix random_pool(Rng& rng, const std::vector<double>& y, std::size_t K) {
    std::vector<std::string> names;
    std::vector<std::vector<double>> cols;
    for (std::size_t k = 0; k < K; ++k) {
        std::vector<double> c(y.size());
        const double s = 0.2 + rng.uniform();
        for (std::size_t i = 0; i < y.size(); ++i) c[i] = y[i] + s * rng.normal();
        cols.push_back(c);
        names.push_back("m" + std::to_string(k));
    }
    return PredictionMatrix(names, cols);
}

}  // namespace

TEST_CASE("blend weights from risks") {
    const std::vector<double> y(4, 0.0);
    const BlendResult b = blend({member_with_rmse("a", 2.0), member_with_rmse("b", 4.0)}, y);
    CHECK_THAT(b.weights[0], WithinAbs(2.0 / 3.0, 1e-12));
    CHECK_THAT(b.weights[1], WithinAbs(1.0 / 3.0, 1e-12));
    CHECK(b.risks == std::vector<double>{2.0, 4.0});
    CHECK_THAT(b.final_pred[0], WithinAbs(2.0 * 2.0 / 3.0 + 4.0 / 3.0, 1e-12));

    const BlendResult eq = blend({member_with_rmse("a", 1.5), member_with_rmse("b", 1.5), member_with_rmse("c", 1.5)}, y);
    for (double w : eq.weights) CHECK_THAT(w, WithinAbs(1.0 / 3.0, 1e-12));

    const BlendResult one = blend({member_with_rmse("solo", 3.0)}, y);
    CHECK(one.weights == std::vector<double>{1.0});
    CHECK(one.final_pred == std::vector<double>{3, -3, 3, -3});
}

TEST_CASE("blend weight invariants and test predictions") {
    Rng rng(61);
    for (int t = 0; t < 20; ++t) {
        const auto y = testutil::normals(rng, 60);
        std::vector<BlendMember> ms;
        const std::size_t M = 1 + rng.below(5);
        for (std::size_t m = 0; m < M; ++m) {
            BlendMember b;
            b.name = "meta" + std::to_string(m);
            b.oof_pred = y;
            const double s = 0.1 + rng.uniform();
            for (auto& v : b.oof_pred) v += s * rng.normal();
            b.test_pred = testutil::normals(rng, 7);
            ms.push_back(b);
        }
        const BlendResult r = blend(ms, y);
        double sum = 0.0;
        for (double w : r.weights) {
            CHECK(w > 0.0);
            sum += w;
        }
        CHECK_THAT(sum, WithinAbs(1.0, 1e-12));
        for (std::size_t a = 0; a < M; ++a) {
            for (std::size_t b = 0; b < M; ++b) {
                if (r.risks[a] < r.risks[b]) CHECK(r.weights[a] > r.weights[b]);
            }
        }
        REQUIRE(r.final_test_pred.has_value());
        for (std::size_t i = 0; i < 7; ++i) {
            double s = 0.0;
            for (std::size_t m = 0; m < M; ++m) s += r.weights[m] * (*ms[m].test_pred)[i];
            CHECK_THAT((*r.final_test_pred)[i], WithinAbs(s, 1e-12));
        }
    }
}

TEST_CASE("a perfect member takes the whole blend") {
    const std::vector<double> y{1, 2, 3};
    const BlendResult r = blend({{"bad", {0, 0, 0}, std::nullopt}, {"perfect", y, std::nullopt}, {"also", y, std::nullopt}}, y);
    CHECK(r.weights == std::vector<double>{0, 1, 0});
    REQUIRE(r.perfect_member.has_value());
    CHECK(*r.perfect_member == "perfect");
    CHECK(r.final_pred == y);
    CHECK(inverse_risk_weights(std::vector<double>{0.0, 0.0}) == std::vector<double>{1.0, 0.0});
}

TEST_CASE("blend input validation") {
    const std::vector<double> y{1, 2, 3};
    CHECK(error_kind([&] { blend({}, y); }) == ErrorKind::Selection);
    CHECK(error_kind([&] { blend({{"a", {1, 2}, std::nullopt}}, y); }) == ErrorKind::Dimension);
}

TEST_CASE("best single model") {
    const std::vector<double> y{1, 2, 3, 4};
    const PredictionMatrix p({"a", "b", "c", "d"}, std::vector<std::vector<double>>{{0, 0, 0, 0}, {1, 2, 3, 5}, {2, 3, 4, 5}, y});
    const auto [name, m] = best_single(p, y);
    CHECK(name == "d");
    CHECK(m.rmse == 0.0);

    const std::vector<double> z{0, 1};
    const PredictionMatrix two({"one", "two"}, std::vector<std::vector<double>>{{1, -1}, {2, -2}});
    CHECK(best_single(two, z).first == "one");
    const PredictionMatrix tie({"zeta", "alpha"}, std::vector<std::vector<double>>{{1, 2}, {-1, 0}});
    CHECK(best_single(tie, z).first == "alpha");

    Rng rng(62);
    for (int t = 0; t < 20; ++t) {
        const auto yy = testutil::normals(rng, 40);
        const PredictionMatrix pool = random_pool(rng, yy, 2 + rng.below(10));
        std::size_t arg = 0;
        for (std::size_t k = 1; k < pool.n_models(); ++k) {
            if (rmse(pool.column(k), yy) < rmse(pool.column(arg), yy)) arg = k;
        }
        CHECK(best_single(pool, yy).first == pool.name(arg));
    }
}

TEST_CASE("uniform and weighted averages") {
    const std::vector<double> a{1, 2, 3};
    CHECK(uniform_average(PredictionMatrix({"a"}, std::vector<std::vector<double>>{a})) == a);
    const auto z = uniform_average(PredictionMatrix({"a", "b"}, std::vector<std::vector<double>>{a, {-1, -2, -3}}));
    for (double v : z) CHECK(v == 0.0);

    const std::vector<double> y{0, 0, 0, 0};
    const PredictionMatrix same({"a", "b"}, std::vector<std::vector<double>>{{1, 2, 3, 4}, {1, 2, 3, 4}});
    CHECK(weighted_average(same, y).prediction == std::vector<double>{1, 2, 3, 4});
    const PredictionMatrix pair({"a", "b"}, std::vector<std::vector<double>>{{2, -2, 2, -2}, {4, -4, 4, -4}});
    const WeightedAverage w = weighted_average(pair, y);
    CHECK_THAT(w.weights[0], WithinAbs(2.0 / 3.0, 1e-12));
    CHECK_THAT(w.weights[1], WithinAbs(1.0 / 3.0, 1e-12));

    Rng rng(63);
    const auto yy = testutil::normals(rng, 30);
    const PredictionMatrix pool = random_pool(rng, yy, 3);
    const WeightedAverage wa = weighted_average(pool, yy);
    std::vector<double> inv(3);
    double s = 0.0;
    for (std::size_t k = 0; k < 3; ++k) {
        inv[k] = 1.0 / rmse(pool.column(k), yy);
        s += inv[k];
    }
    for (std::size_t i = 0; i < 30; ++i) {
        double e = 0.0;
        for (std::size_t k = 0; k < 3; ++k) e += inv[k] / s * pool.column(k)[i];
        CHECK_THAT(wa.prediction[i], WithinAbs(e, 1e-12));
    }

    // Equal member errors make the weighted average uniform.
    const std::vector<double> t{0, 0, 0, 0};
    const PredictionMatrix eq({"a", "b"}, std::vector<std::vector<double>>{{1, -1, 1, -1}, {-1, 1, 1, -1}});
    const auto u = uniform_average(eq);
    const auto wv = weighted_average(eq, t).prediction;
    for (std::size_t i = 0; i < 4; ++i) CHECK_THAT(wv[i], WithinAbs(u[i], 1e-15));
}

TEST_CASE("linear stack at lambda 0 is fold-wise OLS") {
    Rng rng(64);
    const auto y = testutil::normals(rng, 80);
    const PredictionMatrix pool = random_pool(rng, y, 3);
    const FoldAssignment f = stratified_partition(y, 4, 4, 42);
    const FitResult r = linear_stack(pool, y, f, 0.0);
    for (int l = 0; l < 4; ++l) {
        const auto tr = f.complement(l);
        std::vector<double> yt;
        for (auto i : tr) yt.push_back(y[i]);
        const LinearModel ols = fit_ridge(pool.matrix().select_rows(tr), yt, 0.0);
        const auto& m = r.fold_models[static_cast<std::size_t>(l)];
        for (std::size_t j = 0; j < 3; ++j) CHECK_THAT(m.weights[j], WithinAbs(ols.weights[j], 1e-9));
        CHECK_THAT(m.intercept, WithinAbs(ols.intercept, 1e-9));
    }
}

TEST_CASE("linear stack with a huge lambda predicts the training mean") {
    Rng rng(65);
    const auto y = testutil::normals(rng, 50, 3.0);
    const PredictionMatrix pool = random_pool(rng, y, 4);
    const FoldAssignment f = stratified_partition(y, 5, 5, 42);
    const FitResult r = linear_stack(pool, y, f, 1e12);
    for (int l = 0; l < 5; ++l) {
        double s = 0.0;
        const auto tr = f.complement(l);
        for (auto i : tr) s += y[i];
        for (auto i : f.members(l)) CHECK_THAT(r.oof_pred[i], WithinAbs(s / static_cast<double>(tr.size()), 1e-8));
    }
}

TEST_CASE("hill climbing basics") {
    const std::vector<double> y{1, 2, 3};
    const HillClimbState one = hill_climb(PredictionMatrix({"a"}, std::vector<std::vector<double>>{{1, 1, 1}}), y);
    CHECK(one.history.size() == 1);
    CHECK(one.counts == std::vector<std::size_t>{1});

    const PredictionMatrix perfect({"a", "b", "c"}, std::vector<std::vector<double>>{{0, 0, 0}, y, {3, 2, 1}});
    const HillClimbState p = hill_climb(perfect, y);
    CHECK(p.history.size() == 1);
    CHECK(p.history[0].chosen == "b");
    CHECK(p.current_rmse == 0.0);
    CHECK(p.weights() == std::vector<double>{0, 1, 0});

    HillClimbOptions bad;
    bad.max_steps = 0;
    CHECK(error_kind([&] { hill_climb(perfect, y, bad); }) == ErrorKind::Config);
}

TEST_CASE("hill climbing on a constructed 3 x 5 pool follows exhaustive enumeration") {
    // Two opposite biases average out, so the greedy path alternates.
    const std::vector<double> y{0, 1, 2, 3, 4};
    const PredictionMatrix pool({"hi", "lo", "noisy"}, std::vector<std::vector<double>>{
                                                           {0.5, 1.5, 2.5, 3.5, 4.5},
                                                           {-0.6, 0.4, 1.4, 2.4, 3.4},
                                                           {1, 0, 3, 2, 5}});
    HillClimbOptions opts;
    opts.max_steps = 10;
    const HillClimbState s = hill_climb(pool, y, opts);
    std::vector<std::size_t> counts(3, 0);
    double prev = std::numeric_limits<double>::infinity();
    for (std::size_t step = 0; step < s.history.size(); ++step) {
        std::vector<double> cand(3);
        for (std::size_t k = 0; k < 3; ++k) {
            auto c = counts;
            ++c[k];
            std::size_t tot = 0;
            for (auto v : c) tot += v;
            std::vector<double> p(5, 0.0);
            for (std::size_t j = 0; j < 3; ++j) {
                for (std::size_t i = 0; i < 5; ++i) p[i] += static_cast<double>(c[j]) * pool.column(j)[i] / static_cast<double>(tot);
            }
            cand[k] = rmse(p, y);
        }
        const auto best = static_cast<std::size_t>(std::min_element(cand.begin(), cand.end()) - cand.begin());
        CHECK(s.history[step].chosen == pool.name(best));
        CHECK_THAT(s.history[step].rmse, WithinAbs(cand[best], 1e-12));
        CHECK(cand[best] <= prev + 1e-12);
        prev = cand[best];
        ++counts[best];
    }
    CHECK(s.counts == counts);
    CHECK(s.history[0].chosen == "hi");
    CHECK(s.history[1].chosen == "lo");
    CHECK(s.current_rmse < rmse(pool.column(0), y));
}

TEST_CASE("hill climbing state is consistent") {
    Rng rng(66);
    for (int t = 0; t < 30; ++t) {
        const auto y = testutil::normals(rng, 25);
        const PredictionMatrix pool = random_pool(rng, y, 2 + rng.below(6));
        const HillClimbState s = hill_climb(pool, y);
        std::size_t total = 0;
        for (auto c : s.counts) total += c;
        CHECK(total == s.history.size());
        for (std::size_t i = 0; i < 25; ++i) {
            double p = 0.0;
            for (std::size_t k = 0; k < pool.n_models(); ++k) p += static_cast<double>(s.counts[k]) * pool.column(k)[i];
            CHECK_THAT(s.current_pred[i], WithinAbs(p / static_cast<double>(total), 1e-12));
        }
        for (std::size_t h = 1; h < s.history.size(); ++h) CHECK(s.history[h].rmse <= s.history[h - 1].rmse + 1e-12);
        CHECK(s.current_rmse <= best_single(pool, y).second.rmse + 1e-12);
        const auto w = s.weights();
        double ws = 0.0;
        for (double v : w) ws += v;
        CHECK_THAT(ws, WithinAbs(1.0, 1e-12));
    }
}

TEST_CASE("re-adding the sole member stops the search") {
    // Identical columns: the best addition is the model already in the ensemble.
    const std::vector<double> y{0, 1, 2, 3};
    const std::vector<double> c{1, 1, 2, 2};
    const PredictionMatrix pool({"b", "a"}, std::vector<std::vector<double>>{c, c});
    const HillClimbState s = hill_climb(pool, y);
    REQUIRE(s.history.size() == 1);
    CHECK(s.history[0].chosen == "a");
}

TEST_CASE("max_steps bounds the search") {
    Rng rng(67);
    const auto y = testutil::normals(rng, 40);
    const PredictionMatrix pool = random_pool(rng, y, 6);
    for (std::size_t m : {1u, 2u, 5u}) {
        HillClimbOptions opts;
        opts.max_steps = m;
        CHECK(hill_climb(pool, y, opts).history.size() <= m);
    }
}
