#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

#include "stackreg/ensemble.hpp"
#include "stackreg/metafeatures.hpp"
#include "test_util.hpp"

using namespace stackreg;
using Catch::Matchers::WithinAbs;
using testutil::error_kind;

namespace {

PredictionMatrix single_row(const std::vector<double>& row) {
    std::vector<std::string> names;
    std::vector<std::vector<double>> cols;
    for (std::size_t k = 0; k < row.size(); ++k) {
        names.push_back("m" + std::to_string(k));
        cols.push_back({row[k]});
    }
    return PredictionMatrix(names, cols);
}

std::vector<double> engineered(const MetaDesign& d, std::size_t row) {
    std::vector<double> out;
    for (std::size_t j = d.n_base; j < d.matrix.cols(); ++j) out.push_back(d.matrix(row, j));
    return out;
}

}  // namespace

TEST_CASE("constant row") {
    const MetaDesign d = augment(single_row({5, 5, 5}));
    CHECK(engineered(d, 0) == std::vector<double>{5, 0, 5, 0, 0, 0});
}

TEST_CASE("row 1 2 3") {
    const MetaDesign d = augment(single_row({3, 1, 2}));
    const auto e = engineered(d, 0);
    const double sd = std::sqrt(2.0 / 3.0);
    CHECK_THAT(e[0], WithinAbs(2.0, 1e-12));
    CHECK_THAT(e[1], WithinAbs(sd, 1e-12));
    CHECK_THAT(e[1], WithinAbs(0.81650, 1e-5));
    CHECK(e[2] == 2.0);
    CHECK(e[3] == 2.0);
    CHECK_THAT(e[4], WithinAbs(2.0 * sd, 1e-12));
    CHECK_THAT(e[5], WithinAbs(1.63299, 1e-5));
}

TEST_CASE("even count median is the midpoint") {
    const MetaDesign d = augment(single_row({4, 1, 10, 2}));
    CHECK(engineered(d, 0)[2] == 3.0);
}

TEST_CASE("column layout and width") {
    Rng rng(51);
    std::vector<std::string> names;
    std::vector<std::vector<double>> cols;
    for (int k = 0; k < 37; ++k) {
        names.push_back("model_" + std::to_string(k));
        cols.push_back(testutil::normals(rng, 20));
    }
    const MetaDesign d = augment(PredictionMatrix(names, cols));
    CHECK(d.matrix.cols() == 43);
    CHECK(d.n_base == 37);
    REQUIRE(d.column_names.size() == 43);
    CHECK(d.column_names.front() == "model_0");
    for (std::size_t j = 0; j < 6; ++j) CHECK(d.column_names[37 + j] == kMetaFeatureNames[j]);
    for (std::size_t k = 0; k < 37; ++k) {
        for (std::size_t i = 0; i < 20; ++i) CHECK(d.matrix(i, k) == cols[k][i]);
    }
}

TEST_CASE("feature groups can be switched off") {
    const PredictionMatrix p = single_row({1, 2, 4});
    MetaFeatureSet none{false, false};
    CHECK(augment(p, none).matrix.cols() == 3);
    MetaFeatureSet stats_only{true, false};
    const MetaDesign s = augment(p, stats_only);
    CHECK(s.matrix.cols() == 7);
    CHECK(s.column_names.back() == "range");
    MetaFeatureSet inter_only{false, true};
    const MetaDesign i = augment(p, inter_only);
    CHECK(i.matrix.cols() == 5);
    CHECK(i.column_names[3] == "mean_std_interaction");
}

TEST_CASE("row invariants and agreement with the uniform average") {
    Rng rng(52);
    for (int t = 0; t < 20; ++t) {
        const std::size_t K = 1 + rng.below(8);
        const std::size_t n = 50;
        std::vector<std::string> names;
        std::vector<std::vector<double>> cols;
        for (std::size_t k = 0; k < K; ++k) {
            names.push_back("m" + std::to_string(k));
            auto c = testutil::normals(rng, n);
            // Some exact ties across models.
            if (k > 0 && rng.uniform() < 0.3) c = cols.front();
            cols.push_back(c);
        }
        const PredictionMatrix p(names, cols);
        const MetaDesign d = augment(p);
        const auto avg = uniform_average(p);
        for (std::size_t i = 0; i < n; ++i) {
            double lo = cols[0][i], hi = cols[0][i];
            for (std::size_t k = 1; k < K; ++k) {
                lo = std::min(lo, cols[k][i]);
                hi = std::max(hi, cols[k][i]);
            }
            const auto e = engineered(d, i);
            CHECK_THAT(e[0], WithinAbs(avg[i], 1e-12));
            CHECK(e[1] >= 0.0);
            CHECK(e[2] >= lo);
            CHECK(e[2] <= hi);
            CHECK(e[3] >= 0.0);
            CHECK((e[1] == 0.0) == (e[3] == 0.0));
            CHECK_THAT(e[4], WithinAbs(e[0] * e[1], 1e-12));
            CHECK_THAT(e[5], WithinAbs(e[3] * e[1], 1e-12));
            for (double v : e) CHECK(std::isfinite(v));
        }
    }
}

TEST_CASE("single retained model still emits all six columns") {
    const PredictionMatrix p({"only"}, std::vector<std::vector<double>>{{1, 2, 3}});
    const MetaDesign d = augment(p);
    CHECK(d.matrix.cols() == 7);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(d.matrix(i, 2) == 0.0);
        CHECK(d.matrix(i, 4) == 0.0);
    }
}

TEST_CASE("empty pool") {
    CHECK(error_kind([] { augment(PredictionMatrix{}); }) == ErrorKind::Selection);
}
