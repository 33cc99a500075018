#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "rclt/coupling.hpp"
#include "rclt/moments.hpp"

using namespace rclt;

namespace {

SampleBatch std_normal_batch(int n, int p, std::int64_t N, std::uint64_t seed) {
    const ProcessSpec spec = build_ma(0, p, {Eigen::MatrixXd::Identity(p, p)}, Innovation::gaussian, 0.0, false, false);
    return sample_series(spec, n, N, seed);
}

}  // namespace

TEST_SUITE_BEGIN("moments");

TEST_CASE("standard normal moments at q = 2 and q = 3") {
    const SampleBatch x = std_normal_batch(4, 1, 200000, 100);
    const SampleBatch y = std_normal_batch(4, 1, 200000, 101);

    SUBCASE("q = 2 gives L near 2") {
        const MomentSummary s = estimate_moments(x, y, 2.0);
        for (std::size_t i = 0; i < s.per_index_L.size(); ++i)
            CHECK(std::abs(s.per_index_L[i] - 2.0) <= 4.0 * s.se_L[i]);
    }
    SUBCASE("q = 3 tracks the half-normal third moment") {
        const MomentSummary s = estimate_moments(x, y, 3.0);
        const double want = 2.0 * oracles::gauss_abs_moment(3.0);  // ~3.1915
        CHECK(want == doctest::Approx(3.1915).epsilon(1e-4));
        for (std::size_t i = 0; i < s.per_index_L.size(); ++i)
            CHECK(std::abs(s.per_index_L[i] - want) <= 4.0 * s.se_L[i]);
    }
    SUBCASE("p = 1 collapses the sup norm onto the marginal") {
        const MomentSummary s = estimate_moments(x, y, 3.0);
        CHECK(s.per_index_L == s.per_index_nu);
        CHECK(s.se_L == s.se_nu);
    }
}

TEST_CASE("L stays below nu up to noise") {
    const SampleBatch x = std_normal_batch(3, 4, 50000, 7);
    const SampleBatch y = std_normal_batch(3, 4, 50000, 8);
    const MomentSummary s = estimate_moments(x, y, 3.0);
    for (std::size_t i = 0; i < s.per_index_L.size(); ++i) {
        CHECK(s.per_index_L[i] <= s.per_index_nu[i] + 4.0 * (s.se_L[i] + s.se_nu[i]));
        CHECK(s.per_index_L[i] >= 0.0);
        CHECK(s.per_index_nu[i] >= 0.0);
    }
}

TEST_CASE("interval averages") {
    MomentSummary s;
    s.q = 3;
    s.per_index_L = {1, 2, 3};
    s.per_index_nu = {2, 4, 6};
    s.se_L = {0, 0, 0};
    s.se_nu = {0, 0, 0};
    SUBCASE("full range mean") {
        const auto [L, nu] = averaged(s, IntervalSet::range(1, 3));
        CHECK(L == doctest::Approx(2.0));
        CHECK(nu == doctest::Approx(4.0));
    }
    SUBCASE("singleton picks the entry") {
        const auto [L, nu] = averaged(s, IntervalSet::range(2, 2));
        CHECK(L == doctest::Approx(2.0));
        CHECK(nu == doctest::Approx(4.0));
    }
    SUBCASE("constant arrays return the constant") {
        s.per_index_L = {5, 5, 5};
        const auto [L, nu] = averaged(s, IntervalSet::range(1, 3));
        CHECK(L == doctest::Approx(5.0));
        (void)nu;
    }
    SUBCASE("bad interval throws") { CHECK_THROWS_AS(averaged(s, IntervalSet::range(1, 9)), BadIndexSet); }
}

TEST_CASE("jensen chain on estimated summaries") {
    // nu_bar_2 <= nu_bar_q^{2/q} + propagated noise, q = 3.
    for (auto innovation : {Innovation::gaussian, Innovation::student_t}) {
        const ProcessSpec spec = build_ma_equal(1, 3, innovation, 3.5, false, true);
        const SeriesMomentStats xs = series_moments(spec, 6, 100000, 55, {2.0, 3.0});
        const SeriesMomentStats ys = series_moments(spec, 6, 100000, 56, {2.0, 3.0});
        const MomentSummary m2 = combine_moments(xs, ys, 0);
        const MomentSummary m3 = combine_moments(xs, ys, 1);
        const IntervalSet full = IntervalSet::range(1, 6);
        const auto [L2, nu2] = averaged(m2, full);
        const auto [L3, nu3] = averaged(m3, full);
        const auto [seL2, senu2] = averaged_se(m2, full);
        const auto [seL3, senu3] = averaged_se(m3, full);
        (void)L2;
        (void)L3;
        (void)seL2;
        (void)seL3;
        const double rhs = std::pow(nu3, 2.0 / 3.0);
        const double propagated = senu2 + (2.0 / 3.0) * std::pow(nu3, -1.0 / 3.0) * senu3;
        CHECK(nu2 <= rhs + 4.0 * propagated);
    }
}

TEST_CASE("heavy tails trip the top-decile warning at q = 4") {
    const ProcessSpec heavy = build_ma_equal(1, 2, Innovation::student_t, 3.5, false, true);
    const SeriesMomentStats xs = series_moments(heavy, 4, 50000, 77, {4.0});
    const SeriesMomentStats ys = series_moments(heavy, 4, 50000, 78, {4.0});
    const MomentSummary s = combine_moments(xs, ys, 0);
    CHECK(s.heavy_tail_warning);
}

TEST_CASE("shape mismatch is rejected") {
    const SampleBatch a = std_normal_batch(3, 1, 1000, 1);
    const SampleBatch b = std_normal_batch(4, 1, 1000, 2);
    CHECK_THROWS_AS(estimate_moments(a, b, 2.0), ShapeMismatch);
}

TEST_CASE("summary serializes to json") {
    const SampleBatch x = std_normal_batch(2, 1, 2000, 5);
    const MomentSummary s = estimate_moments(x, x, 2.0);
    const std::string js = s.to_json();
    CHECK(js.find("\"per_index_L\"") != std::string::npos);
    CHECK(js.find("\"heavy_tail_warning\"") != std::string::npos);
}

TEST_SUITE_END();
