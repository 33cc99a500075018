#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "rclt/linalg.hpp"

using namespace rclt;

namespace {

Eigen::MatrixXd mat2(double a, double b, double c, double d) {
    Eigen::MatrixXd m(2, 2);
    m << a, b, c, d;
    return m;
}

}  // namespace

TEST_SUITE_BEGIN("linalg");

TEST_CASE("cholesky of the identity") {
    const CholFactor f = cholesky(SymMatrix::identity(3));
    CHECK(f.rank == 3);
    CHECK((f.lower - Eigen::MatrixXd::Identity(3, 3)).norm() == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("cholesky reconstructs a 2x2 pd matrix") {
    const SymMatrix m(mat2(4, 2, 2, 3));
    const CholFactor f = cholesky(m);
    CHECK(f.rank == 2);
    CHECK(f.lower(0, 0) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(f.lower(1, 0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(f.lower(1, 1) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
    CHECK((f.reconstruct() - m.matrix()).norm() <= 1e-12 * m.matrix().norm());
}

TEST_CASE("cholesky rejects an indefinite matrix") {
    CHECK_THROWS_AS(cholesky(SymMatrix(mat2(1, 2, 2, 1))), NotPositiveSemiDefinite);
}

TEST_CASE("cholesky psd fallback handles rank deficiency") {
    // Duplicated coordinates: rank 1, smallest eigenvalue 0.
    const SymMatrix m(mat2(1, 1, 1, 1));
    const CholFactor f = cholesky(m);
    CHECK(f.rank == 1);
    CHECK((f.reconstruct() - m.matrix()).norm() <= 1e-8 * m.matrix().norm());
}

TEST_CASE("min eigenvalue on fixed matrices") {
    CHECK(min_eigenvalue(SymMatrix::identity(5)) == doctest::Approx(1.0).epsilon(1e-12));
    // Characteristic polynomial x^2 - 4x + 3 has roots 1 and 3.
    CHECK(min_eigenvalue(SymMatrix(mat2(2, 1, 1, 2))) == doctest::Approx(1.0).epsilon(1e-12));
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(2, 2);
    d(0, 0) = 3;
    d(1, 1) = 5;
    CHECK(min_eigenvalue(SymMatrix(d)) == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("min eigenvalue agrees with the quadratic-formula oracle on random 2x2") {
    std::mt19937 gen(42);
    std::normal_distribution<double> nd;
    for (int trial = 0; trial < 100; ++trial) {
        const double a = nd(gen), b = nd(gen), d = nd(gen);
        const double tr = a + d, det = a * d - b * b;
        const double expected = 0.5 * (tr - std::sqrt(tr * tr - 4 * det));
        CHECK(min_eigenvalue(SymMatrix(mat2(a, b, b, d))) == doctest::Approx(expected).epsilon(1e-10));
    }
}

TEST_CASE("invert on fixed matrices") {
    CHECK((invert(SymMatrix::identity(4)).matrix() - Eigen::MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff() <= 1e-12);
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(2, 2);
    d(0, 0) = 2;
    d(1, 1) = 4;
    const SymMatrix inv = invert(SymMatrix(d));
    CHECK(inv(0, 0) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(inv(1, 1) == doctest::Approx(0.25).epsilon(1e-14));

    const SymMatrix m(mat2(2, 1, 1, 2));
    const SymMatrix minv = invert(m);
    CHECK(minv(0, 0) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    CHECK(minv(0, 1) == doctest::Approx(-1.0 / 3.0).epsilon(1e-12));
    // Product-with-input oracle.
    CHECK((m.matrix() * minv.matrix() - Eigen::MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff() <= 1e-8);
    CHECK_THROWS_AS(invert(SymMatrix(mat2(1, 2, 2, 1))), NotPositiveDefinite);
}

TEST_CASE("conditional covariance of a block-diagonal joint is the marginal") {
    const int n = 4, p = 2;
    Eigen::MatrixXd joint = Eigen::MatrixXd::Zero(n * p, n * p);
    std::mt19937 gen(7);
    for (int i = 0; i < n; ++i) joint.block(i * p, i * p, p, p) = oracles::random_pd(p, 100 + i);
    const SymMatrix sym(joint);
    for (int lo = 1; lo <= n; ++lo) {
        const IntervalSet I = IntervalSet::range(1, lo);
        const Eigen::MatrixXd cond = schur_conditional_cov(sym, n, p, I).matrix();
        const Eigen::MatrixXd marg = marginal_sum_cov(sym, n, p, I).matrix();
        CHECK((cond - marg).cwiseAbs().maxCoeff() <= 1e-10);
    }
}

TEST_CASE("conditional variance of the middle of a tridiagonal chain") {
    Eigen::MatrixXd joint(3, 3);
    joint << 1, .5, 0, .5, 1, .5, 0, .5, 1;
    const SymMatrix sym(joint);
    const SymMatrix cond = schur_conditional_cov(sym, 3, 1, IntervalSet::range(2, 2));
    // 1 - (.5,.5) I2^{-1} (.5,.5)^T = 0.5
    CHECK(cond(0, 0) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("full interval leaves the variance unconditioned") {
    const Eigen::MatrixXd joint = oracles::random_pd(6, 3);
    const SymMatrix sym(joint);
    const IntervalSet I = IntervalSet::range(1, 3);
    const Eigen::MatrixXd cond = schur_conditional_cov(sym, 3, 2, I).matrix();
    const Eigen::MatrixXd marg = marginal_sum_cov(sym, 3, 2, I).matrix();
    CHECK((cond - marg).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("schur agrees with the dense-inversion brute force on random joints") {
    std::mt19937 gen(2024);
    std::uniform_int_distribution<int> pick_n(2, 10);
    std::uniform_int_distribution<int> pick_p(1, 3);
    for (int trial = 0; trial < 50; ++trial) {
        int n = pick_n(gen), p = pick_p(gen);
        while (n * p > 60) p = pick_p(gen);
        const Eigen::MatrixXd joint = oracles::random_pd(n * p, 500 + trial);
        const SymMatrix sym(joint);
        std::uniform_int_distribution<int> pick_lo(1, n);
        const int lo = pick_lo(gen);
        std::uniform_int_distribution<int> pick_hi(lo, n);
        const int hi = pick_hi(gen);
        const IntervalSet I = IntervalSet::range(lo, hi);
        const Eigen::MatrixXd mine = schur_conditional_cov(sym, n, p, I).matrix();
        const Eigen::MatrixXd brute = oracles::brute_conditional_cov(joint, n, p, I.members(n));
        CHECK((mine - brute).norm() <= 1e-8 * std::max(1.0, brute.norm()));
    }
}

TEST_CASE("conditioning never increases the covariance (psd order)") {
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 5, p = 2;
        const Eigen::MatrixXd joint = oracles::random_pd(n * p, 900 + trial);
        const SymMatrix sym(joint);
        const IntervalSet I = IntervalSet::range(2, 4);
        const Eigen::MatrixXd cond = schur_conditional_cov(sym, n, p, I).matrix();
        const Eigen::MatrixXd marg = marginal_sum_cov(sym, n, p, I).matrix();
        CHECK(min_eigenvalue(SymMatrix(marg - cond)) >= -1e-8);
        CHECK(min_eigenvalue(SymMatrix(cond)) <= min_eigenvalue(SymMatrix(marg)) + 1e-8);
    }
}

TEST_CASE("cholesky reconstruction error stays small on random pd inputs") {
    for (int trial = 0; trial < 20; ++trial) {
        const Eigen::MatrixXd m = oracles::random_pd(8, 1300 + trial);
        const CholFactor f = cholesky(SymMatrix(m));
        CHECK((f.reconstruct() - m).norm() <= 1e-8 * m.norm());
    }
}

TEST_CASE("interval validation") {
    const SymMatrix sym(oracles::random_pd(4, 1));
    CHECK_THROWS_AS(schur_conditional_cov(sym, 4, 1, IntervalSet::range(0, 2)), BadIndexSet);
    CHECK_THROWS_AS(schur_conditional_cov(sym, 4, 1, IntervalSet::range(2, 5)), BadIndexSet);
}

TEST_SUITE_END();
