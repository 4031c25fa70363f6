#include <catch_amalgamated.hpp>

#include <boost/math/distributions/beta.hpp>
#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "stackreg/stats.hpp"
#include "test_util.hpp"

using namespace stackreg;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;
using testutil::error_kind;

namespace {

struct TCase {
    std::vector<double> a, b;
    double t, p;
};

// scipy.stats.ttest_rel reference values.
const std::vector<TCase> kCases{
    {{1, 2, 3, 4, 5}, {0, 0, 0, 0, 0}, 4.242640687119285, 0.013235599563682695},
    {{8.61, 8.59, 8.63, 8.58, 8.60, 8.62, 8.57, 8.61, 8.60, 8.59},
     {8.63, 8.60, 8.66, 8.61, 8.62, 8.63, 8.60, 8.62, 8.63, 8.61},
     -7.58430874440371, 3.3813790831847724e-05},
    {{2.1, 3.4, 1.9, 5.6, 4.2, 3.3}, {2.0, 3.9, 2.5, 5.1, 4.8, 3.0}, -0.6629935441317959, 0.5366721154447918},
    {{0.5, 0.7, 0.2, 0.9}, {0.1, 0.2, 0.3, 0.4}, 2.263009527424072, 0.10862358012074638},
    {{10, 12, 9, 11, 13, 10, 12, 11}, {11, 11, 10, 13, 12, 12, 13, 12}, -1.820930936000652, 0.11141646787533989},
};

}  // namespace

TEST_CASE("incomplete beta reference values") {
    CHECK_THAT(incomplete_beta(2.5, 0.5, 0.3), WithinRel(0.018927124071945658, 1e-12));
    CHECK_THAT(incomplete_beta(1.0, 1.0, 0.42), WithinAbs(0.42, 1e-14));
    CHECK_THAT(incomplete_beta(5.0, 3.0, 0.8), WithinRel(0.8519680000000001, 1e-12));
    CHECK_THAT(incomplete_beta(0.5, 0.5, 0.1), WithinRel(0.20483276469913345, 1e-12));
    CHECK(incomplete_beta(2.0, 3.0, 0.0) == 0.0);
    CHECK(incomplete_beta(2.0, 3.0, 1.0) == 1.0);
    CHECK(error_kind([] { incomplete_beta(0.0, 1.0, 0.5); }) == ErrorKind::Input);
    CHECK(error_kind([] { incomplete_beta(1.0, 1.0, 1.5); }) == ErrorKind::Input);
}

TEST_CASE("incomplete beta agrees with boost over a grid") {
    for (double a : {0.3, 0.5, 1.0, 2.5, 7.0, 30.0}) {
        for (double b : {0.5, 1.0, 3.0, 12.0}) {
            boost::math::beta_distribution<double> dist(a, b);
            for (double x = 0.01; x < 1.0; x += 0.07) {
                CHECK_THAT(incomplete_beta(a, b, x), WithinAbs(boost::math::cdf(dist, x), 1e-12));
            }
        }
    }
}

TEST_CASE("two-tailed t p-values") {
    CHECK_THAT(student_t_two_tailed(2.0, 5.0), WithinRel(0.10193947882985828, 1e-10));
    CHECK_THAT(student_t_two_tailed(1.0, 1.0), WithinRel(0.5, 1e-12));
    CHECK_THAT(student_t_two_tailed(0.5, 30.0), WithinRel(0.6207230048851273, 1e-10));
    CHECK_THAT(student_t_two_tailed(3.5, 9.0), WithinRel(0.006723515763058952, 1e-10));
    CHECK_THAT(student_t_two_tailed(10.0, 2.0), WithinRel(0.009852457023325692, 1e-10));
    CHECK(student_t_two_tailed(0.0, 4.0) == 1.0);
    CHECK(student_t_two_tailed(std::numeric_limits<double>::infinity(), 4.0) == 0.0);
    CHECK(student_t_two_tailed(-2.0, 5.0) == student_t_two_tailed(2.0, 5.0));
    for (double df : {1.0, 2.0, 3.0, 9.0, 29.0, 200.0}) {
        boost::math::students_t dist(df);
        for (double t : {0.1, 0.7, 1.5, 2.2, 4.0, 8.0}) {
            const double ref = 2.0 * boost::math::cdf(boost::math::complement(dist, t));
            CHECK_THAT(student_t_two_tailed(t, df), WithinRel(ref, 1e-10));
        }
    }
    CHECK(error_kind([] { student_t_two_tailed(1.0, 0.0); }) == ErrorKind::Input);
}

TEST_CASE("paired t-test reference cases") {
    for (const auto& c : kCases) {
        const TTestResult r = paired_t_test(c.a, c.b);
        CHECK_THAT(r.t, WithinAbs(c.t, 1e-9));
        CHECK_THAT(r.p, WithinAbs(c.p, 1e-9));
        CHECK(r.df == static_cast<double>(c.a.size() - 1));
        CHECK_FALSE(r.exact_difference);
    }
}

TEST_CASE("paired t-test degenerate differences") {
    const std::vector<double> a{1, 2, 3, 4};
    const TTestResult same = paired_t_test(a, a);
    CHECK(same.t == 0.0);
    CHECK(same.p == 1.0);
    CHECK_FALSE(same.exact_difference);

    const std::vector<double> b{0, 1, 2, 3};
    const TTestResult exact = paired_t_test(a, b);
    CHECK(exact.exact_difference);
    CHECK(exact.p == 0.0);
    CHECK(exact.t == std::numeric_limits<double>::infinity());
    CHECK(paired_t_test(b, a).t == -std::numeric_limits<double>::infinity());

    CHECK(error_kind([] { paired_t_test(std::vector<double>{1}, std::vector<double>{2}); }) == ErrorKind::Dimension);
    CHECK(error_kind([] { paired_t_test(std::vector<double>{1, 2}, std::vector<double>{2}); }) == ErrorKind::Dimension);
}

TEST_CASE("paired t-test is antisymmetric with p in [0, 1]") {
    Rng rng(71);
    for (int t = 0; t < 100; ++t) {
        const std::size_t n = 2 + rng.below(20);
        const auto a = testutil::normals(rng, n);
        const auto b = testutil::normals(rng, n, 0.3);
        const TTestResult ab = paired_t_test(a, b), ba = paired_t_test(b, a);
        CHECK(ab.t == -ba.t);
        CHECK(ab.p == ba.p);
        CHECK(ab.p >= 0.0);
        CHECK(ab.p <= 1.0);
    }
}

TEST_CASE("Bonferroni comparison") {
    const auto& c = kCases[0];
    const ComparisonReport r = compare_methods("x", c.a, "y", c.b, 4, 0.05);
    CHECK(r.method_a == "x");
    CHECK(r.bonferroni_alpha == 0.0125);
    CHECK_FALSE(r.significant);  // p = 0.0132 > 0.0125
    CHECK(compare_methods("x", c.a, "y", c.b, 2, 0.05).significant);
    CHECK(r.significant == (r.p_value <= r.bonferroni_alpha));
    CHECK(error_kind([&] { compare_methods("x", c.a, "y", c.b, 0, 0.05); }) == ErrorKind::Config);
    CHECK(error_kind([&] { compare_methods("x", c.a, "y", c.b, 1, 1.0); }) == ErrorKind::Config);

    CHECK(significance_stars(0.0005) == "***");
    CHECK(significance_stars(0.005) == "**");
    CHECK(significance_stars(0.03) == "*");
    CHECK(significance_stars(0.2).empty());
}

TEST_CASE("bootstrap determinism and degenerate input") {
    Rng rng(72);
    const auto e = testutil::normals(rng, 400);
    const BootstrapCI a = bootstrap_rmse_ci(e, 1000, 0.95, 42);
    const BootstrapCI b = bootstrap_rmse_ci(e, 1000, 0.95, 42);
    CHECK(a.lo == b.lo);
    CHECK(a.hi == b.hi);
    CHECK(a.point == b.point);
    CHECK(a.lo <= a.point);
    CHECK(a.point <= a.hi);
    CHECK(a.n_resamples == 1000);
    CHECK(a.seed == 42);
    const BootstrapCI c = bootstrap_rmse_ci(e, 1000, 0.95, 43);
    CHECK((c.lo != a.lo || c.hi != a.hi));

    const std::vector<double> constant(150, -0.4);
    const BootstrapCI d = bootstrap_rmse_ci(constant, 500, 0.9, 1);
    CHECK_THAT(d.point, WithinAbs(0.4, 1e-15));
    CHECK(d.lo == d.point);
    CHECK(d.hi == d.point);

    CHECK(error_kind([&] { bootstrap_rmse_ci(e, 99, 0.95, 1); }) == ErrorKind::Config);
    CHECK(error_kind([&] { bootstrap_rmse_ci(e, 100, 1.0, 1); }) == ErrorKind::Config);
}

TEST_CASE("bootstrap covers the true error scale and narrows with more data") {
    Rng rng(73);
    int covered_small = 0, covered_large = 0, narrower = 0;
    const int trials = 200;
    for (int t = 0; t < trials; ++t) {
        const auto small = testutil::normals(rng, 50);
        const auto large = testutil::normals(rng, 500);
        const BootstrapCI s = bootstrap_rmse_ci(small, 1000, 0.95, derive_seed(42, t));
        const BootstrapCI l = bootstrap_rmse_ci(large, 1000, 0.95, derive_seed(43, t));
        covered_small += s.lo <= 1.0 && 1.0 <= s.hi;
        covered_large += l.lo <= 1.0 && 1.0 <= l.hi;
        narrower += (l.hi - l.lo) < (s.hi - s.lo);
    }
    // Percentile intervals undercover slightly at small N.
    CHECK(covered_small >= 0.85 * trials);
    CHECK(covered_large >= 0.88 * trials);
    CHECK(covered_large <= 0.99 * trials);
    CHECK(narrower == trials);
}

TEST_CASE("fold consistency") {
    const FoldConsistency c = fold_consistency(std::vector<double>{8, 10});
    CHECK(c.mean == 9.0);
    CHECK_THAT(c.std, WithinAbs(std::sqrt(2.0), 1e-12));
    CHECK_THAT(c.cv_percent, WithinAbs(15.713484026367723, 1e-9));
    const FoldConsistency z = fold_consistency(std::vector<double>{3, 3, 3});
    CHECK(z.std == 0.0);
    CHECK(z.cv_percent == 0.0);
    CHECK(error_kind([] { fold_consistency(std::vector<double>{1}); }) == ErrorKind::Dimension);
}

TEST_CASE("quantiles interpolate linearly") {
    const std::vector<double> s{1, 2, 3, 4};
    CHECK(quantile_sorted(s, 0.0) == 1.0);
    CHECK(quantile_sorted(s, 1.0) == 4.0);
    CHECK_THAT(quantile_sorted(s, 0.5), WithinAbs(2.5, 1e-15));
    CHECK_THAT(quantile_sorted(s, 0.1), WithinAbs(1.3, 1e-12));
}
