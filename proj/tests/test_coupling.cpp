#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "rclt/coupling.hpp"
#include "rclt/distance.hpp"

using namespace rclt;

namespace {

CovarianceModel iid_model(int n, int p) {
    CovarianceModel cov;
    cov.n = n;
    cov.p = p;
    cov.m = 0;
    cov.lag_blocks = {Eigen::MatrixXd::Identity(p, p)};
    return cov;
}

}  // namespace

TEST_SUITE_BEGIN("coupling");

TEST_CASE("dense expansion of simple models") {
    SUBCASE("iid gives the identity") {
        const SymMatrix d = expand_dense(iid_model(3, 2));
        CHECK((d.matrix() - Eigen::MatrixXd::Identity(6, 6)).norm() == 0.0);
    }
    SUBCASE("scalar ma(1) gives the tridiagonal band") {
        const ProcessSpec spec = build_ma_equal(1, 1, Innovation::gaussian, 0.0, false, true);
        const SymMatrix d = expand_dense(implied_covariance(spec, 4));
        Eigen::MatrixXd want(4, 4);
        want << 1, .5, 0, 0, .5, 1, .5, 0, 0, .5, 1, .5, 0, 0, .5, 1;
        CHECK((d.matrix() - want).cwiseAbs().maxCoeff() <= 1e-12);
    }
    SUBCASE("ring ma(1) adds the corners") {
        const ProcessSpec spec = build_ma_equal(1, 1, Innovation::gaussian, 0.0, true, true);
        const SymMatrix d = expand_dense(implied_covariance(spec, 4));
        CHECK(d(0, 3) == doctest::Approx(0.5).epsilon(1e-12));
        CHECK(d(3, 0) == doctest::Approx(0.5).epsilon(1e-12));
    }
    SUBCASE("cap is enforced") {
        CHECK_THROWS_AS(expand_dense(iid_model(100, 1), 64), TooLarge);
    }
}

TEST_CASE("coupled iid gaussians have identity covariance") {
    const SampleBatch y = gaussian_coupling(iid_model(4, 1), 100000, 31);
    const double se = 1.0 / std::sqrt(static_cast<double>(y.N));
    for (int t1 = 0; t1 < 4; ++t1)
        for (int t2 = t1; t2 < 4; ++t2) {
            double acc = 0;
            for (std::int64_t r = 0; r < y.N; ++r) acc += y.at(r, t1, 0) * y.at(r, t2, 0);
            const double want = t1 == t2 ? 1.0 : 0.0;
            CHECK(std::abs(acc / static_cast<double>(y.N) - want) <= 4.0 * se);
        }
}

TEST_CASE("duplication coupling goes through the rank-deficient path") {
    const CovarianceModel cov = implied_covariance(build_duplication(1), 4);
    const SampleBatch y = gaussian_coupling(cov, 200, 17);
    for (std::int64_t r = 0; r < y.N; ++r) {
        CHECK(std::abs(y.at(r, 0, 0) - y.at(r, 1, 0)) <= 1e-8);
        CHECK(std::abs(y.at(r, 2, 0) - y.at(r, 3, 0)) <= 1e-8);
    }
}

TEST_CASE("coupled ma(1) reproduces the lag-1 correlation") {
    const ProcessSpec spec = build_ma_equal(1, 1, Innovation::gaussian, 0.0, false, true);
    const SampleBatch y = gaussian_coupling(implied_covariance(spec, 4), 100000, 23);
    double s11 = 0, s12 = 0;
    for (std::int64_t r = 0; r < y.N; ++r) {
        s11 += y.at(r, 0, 0) * y.at(r, 0, 0);
        s12 += y.at(r, 0, 0) * y.at(r, 1, 0);
    }
    CHECK(s12 / s11 == doctest::Approx(0.5).epsilon(0.02));
}

TEST_CASE("coupled marginals look gaussian (kurtosis)") {
    const SampleBatch y = gaussian_coupling(iid_model(2, 1), 100000, 29);
    double s2 = 0, s4 = 0;
    for (std::int64_t r = 0; r < y.N; ++r) {
        const double v = y.at(r, 0, 0);
        s2 += v * v;
        s4 += v * v * v * v;
    }
    const double n = static_cast<double>(y.N);
    const double kurt = (s4 / n) / ((s2 / n) * (s2 / n));
    CHECK(std::abs(kurt - 3.0) <= 4.0 * 6.0 / std::sqrt(n));
}

TEST_CASE("gaussian process couples to itself in law") {
    // X gaussian MA(1); the matched Y has the same law, so the estimated
    // distance is two-sample noise within twice the DKW scale.
    const ProcessSpec spec = build_ma_equal(1, 1, Innovation::gaussian, 0.0, false, true);
    const SampleBatch x = sample_series(spec, 8, 100000, 41);
    const SampleBatch y = gaussian_coupling(implied_covariance(spec, 8), 100000, 42);
    const DistanceEstimate mu = mu_hat(x, y, RectClass::one_sided);
    CHECK(mu.value <= 2.0 * mu.se);
}

TEST_CASE("sum coupler matches the coupled batch totals in law") {
    const ProcessSpec spec = build_ma_equal(1, 2, Innovation::gaussian, 0.0, false, true);
    const CovarianceModel cov = implied_covariance(spec, 8);
    const SumCoupler coupler(cov);
    const Eigen::MatrixXd sums = coupler.sample_sums(100000, 57);
    // Var[S] per coordinate: sum of all blocks of the joint.
    const Eigen::MatrixXd dense = expand_dense(cov).matrix();
    Eigen::MatrixXd var_s = Eigen::MatrixXd::Zero(2, 2);
    for (int i = 0; i < 8; ++i)
        for (int j = 0; j < 8; ++j) var_s += dense.block(2 * i, 2 * j, 2, 2);
    for (int c = 0; c < 2; ++c) {
        double acc = 0;
        for (Eigen::Index r = 0; r < sums.rows(); ++r) acc += sums(r, c) * sums(r, c);
        CHECK(acc / static_cast<double>(sums.rows()) == doctest::Approx(var_s(c, c)).epsilon(0.05));
    }
    // Deterministic in the seed, regardless of threads.
    const Eigen::MatrixXd again = coupler.sample_sums(100000, 57, 1);
    CHECK((sums - again).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("per-index marginal moments match the gaussian oracle") {
    const ProcessSpec spec = build_ma_equal(1, 1, Innovation::gaussian, 0.0, false, true);
    const CovarianceModel cov = implied_covariance(spec, 6);
    const SeriesMomentStats stats = marginal_moments(cov, 200000, 71, {3.0});
    const double want = oracles::gauss_abs_moment(3.0);  // unit variance coordinates
    for (int t = 0; t < 6; ++t)
        CHECK(stats.marginal[0][static_cast<std::size_t>(t)] ==
              doctest::Approx(want).epsilon(4.0 * stats.marginal_se[0][static_cast<std::size_t>(t)] / want + 0.01));
}

TEST_SUITE_END();
