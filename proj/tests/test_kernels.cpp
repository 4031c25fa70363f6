#include <catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "stackreg/kernels.hpp"
#include "stackreg/rng.hpp"

using namespace stackreg;
using namespace stackreg::kernels;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

std::vector<double> random_vec(Rng& rng, std::size_t n) {
    std::vector<double> v(n);
    for (auto& x : v) x = rng.normal(0.3, 2.0);
    return v;
}

long double ref_sum(const std::vector<double>& a) {
    long double s = 0.0L;
    for (double x : a) s += x;
    return s;
}

}  // namespace

TEST_CASE("scalar table is always available") {
    const auto all = available_backends();
    REQUIRE_FALSE(all.empty());
    CHECK(all.front() == Backend::Scalar);
    CHECK(table_for(Backend::Scalar) == &detail::scalar_table);
    CHECK(backend_name(Backend::Scalar) == "scalar");
}

TEST_CASE("every available backend agrees with the scalar reference") {
    Rng rng(7);
    const KernelTable* ref = table_for(Backend::Scalar);
    // Lengths around the vector width and unroll factor exercise the tails.
    for (std::size_t n : {0u, 1u, 2u, 3u, 4u, 5u, 7u, 8u, 9u, 15u, 16u, 17u, 31u, 33u, 100u, 1001u}) {
        const auto a = random_vec(rng, n);
        const auto b = random_vec(rng, n);
        const double ma = 0.25, mb = -0.5;
        for (Backend be : available_backends()) {
            const KernelTable* t = table_for(be);
            REQUIRE(t != nullptr);
            INFO("backend " << backend_name(be) << " n=" << n);
            const double scale = 1.0 + static_cast<double>(n);
            CHECK_THAT(t->sum(a.data(), n), WithinAbs(ref->sum(a.data(), n), 1e-12 * scale));
            CHECK_THAT(t->dot(a.data(), b.data(), n), WithinAbs(ref->dot(a.data(), b.data(), n), 1e-12 * scale));
            CHECK_THAT(t->squared_distance(a.data(), b.data(), n),
                       WithinAbs(ref->squared_distance(a.data(), b.data(), n), 1e-11 * scale));
            CHECK_THAT(t->abs_distance(a.data(), b.data(), n),
                       WithinAbs(ref->abs_distance(a.data(), b.data(), n), 1e-11 * scale));
            CHECK_THAT(t->centered_dot(a.data(), ma, b.data(), mb, n),
                       WithinAbs(ref->centered_dot(a.data(), ma, b.data(), mb, n), 1e-11 * scale));
            std::vector<double> y1 = b, y2 = b;
            ref->axpy(-1.5, a.data(), y1.data(), n);
            t->axpy(-1.5, a.data(), y2.data(), n);
            for (std::size_t i = 0; i < n; ++i) CHECK_THAT(y2[i], WithinAbs(y1[i], 1e-14 * (1 + std::fabs(y1[i]))));
        }
    }
}

TEST_CASE("scalar kernels match long-double sums") {
    Rng rng(8);
    const auto a = random_vec(rng, 513);
    const auto b = random_vec(rng, 513);
    long double d = 0.0L, sq = 0.0L, ab = 0.0L;
    for (std::size_t i = 0; i < a.size(); ++i) {
        d += static_cast<long double>(a[i]) * b[i];
        sq += (static_cast<long double>(a[i]) - b[i]) * (static_cast<long double>(a[i]) - b[i]);
        ab += std::fabs(static_cast<long double>(a[i]) - b[i]);
    }
    const KernelTable* s = table_for(Backend::Scalar);
    CHECK_THAT(s->sum(a.data(), a.size()), WithinAbs(static_cast<double>(ref_sum(a)), 1e-10));
    CHECK_THAT(s->dot(a.data(), b.data(), a.size()), WithinRel(static_cast<double>(d), 1e-12));
    CHECK_THAT(s->squared_distance(a.data(), b.data(), a.size()), WithinRel(static_cast<double>(sq), 1e-12));
    CHECK_THAT(s->abs_distance(a.data(), b.data(), a.size()), WithinRel(static_cast<double>(ab), 1e-12));
}

TEST_CASE("set_backend switches the dispatched kernels") {
    const Backend before = active_backend();
    const std::vector<double> a{1, 2, 3, 4, 5, 6, 7, 8, 9};
    const std::vector<double> b{9, 8, 7, 6, 5, 4, 3, 2, 1};
    for (Backend be : available_backends()) {
        REQUIRE(set_backend(be));
        CHECK(active_backend() == be);
        CHECK(sum(a) == 45.0);
        CHECK(dot(a, b) == 165.0);
        CHECK(squared_distance(a, b) == 240.0);
        CHECK(abs_distance(a, b) == 40.0);
        CHECK(centered_dot(a, 5.0, b, 5.0) == -60.0);
    }
    set_backend(before);
}

TEST_CASE("unavailable backends are refused") {
    for (Backend be : {Backend::Avx2, Backend::Neon}) {
        if (table_for(be) == nullptr) CHECK_FALSE(set_backend(be));
    }
}
