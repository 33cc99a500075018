#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "rclt/bounds.hpp"

using namespace rclt;

namespace {

BoundInputs unit_inputs() {
    BoundInputs b;
    b.n = 100;
    b.p = 4;
    b.m = 1;
    b.q = 3;
    b.sigma_min = 1;
    b.sigma_lower = 1;
    b.Lbar3 = 1;
    b.Lbar4 = 1;
    b.nubar_q = 1;
    b.Lbar_q = 1;
    b.C = 1;
    return b;
}

// Independent long-double evaluation of the third-moment display.
long double third_moment_oracle(long double n, long double p, long double q, long double smin, long double slow,
                                long double L3, long double nuq, long double C) {
    const long double e = 2.71828182845904523536L;
    const long double lep = std::log(e * p);
    const long double expo = std::max(1.0L, 2.0L / (q - 2.0L));
    const long double bracket = L3 / (slow * slow) * lep * lep + std::pow(nuq / (slow * slow), 1.0L / (q - 2.0L)) * std::pow(lep, expo);
    return C * std::log(e * n) / smin * std::sqrt(std::log(p * n) / n) * bracket;
}

}  // namespace

TEST_SUITE_BEGIN("bounds");

TEST_CASE("zero constant gives a zero bound") {
    BoundInputs b = unit_inputs();
    b.C = 0;
    CHECK(thm_rhs_q3(b) == 0.0);
    b.q = 4;
    CHECK(thm_rhs_q4(b) == 0.0);
    CHECK(shergin_rhs(4, 1, 3, 1, 1, 0) == 0.0);
}

TEST_CASE("bounds scale linearly in C") {
    BoundInputs b = unit_inputs();
    const double base = thm_rhs_q3(b);
    b.C = 2;
    CHECK(thm_rhs_q3(b) == 2.0 * base);
}

TEST_CASE("third-moment display against the long-double oracle") {
    const BoundInputs b = unit_inputs();
    const double got = thm_rhs_q3(b);
    const double want = static_cast<double>(third_moment_oracle(100, 4, 3, 1, 1, 1, 1, 1));
    CHECK(got == doctest::Approx(want).epsilon(1e-12));
    // At q = 3 the second log exponent is max(1, 2) = 2, so the two bracket
    // terms coincide: ln(100e) sqrt(ln 400/100) * 2 ln^2(4e).
    const double by_hand = std::log(100.0 * std::exp(1.0)) * std::sqrt(std::log(400.0) / 100.0) * 2.0 *
                           std::pow(std::log(4.0 * std::exp(1.0)), 2.0);
    CHECK(got == doctest::Approx(by_hand).epsilon(1e-12));
}

TEST_CASE("fourth-moment display") {
    BoundInputs b = unit_inputs();
    b.q = 4;

    SUBCASE("term dropout") {
        b.Lbar4 = 0;
        b.nubar_q = 0;
        const double lep = std::log(4.0 * std::exp(1.0));
        const double want = std::log(100 * std::exp(1.0)) * std::sqrt(std::log(400.0) / 100.0) * std::pow(lep, 1.5);
        CHECK(thm_rhs_q4(b) == doctest::Approx(want).epsilon(1e-12));
    }
    SUBCASE("square-root exponent on the sup-norm term at q = 4") {
        b.Lbar3 = 0;
        b.Lbar4 = 0;
        b.nubar_q = 4;
        const double lep = std::log(4.0 * std::exp(1.0));
        // (4/1)^{1/2} = 2
        const double want = std::log(100 * std::exp(1.0)) * std::sqrt(std::log(400.0) / 100.0) * 2.0 * lep;
        CHECK(thm_rhs_q4(b) == doctest::Approx(want).epsilon(1e-12));
    }
    SUBCASE("q below 4 is rejected") {
        b.q = 3.5;
        CHECK_THROWS_AS(thm_rhs_q4(b), BadQ);
    }
}

TEST_CASE("blocked bound reduces to the plain one at m = 1") {
    BoundInputs b = unit_inputs();
    CHECK(cor_rhs(b, CorVariant::q3) == thm_rhs_q3(b));
    b.q = 4;
    CHECK(cor_rhs(b, CorVariant::q4) == thm_rhs_q4(b));
}

TEST_CASE("blocked bound depends on (n, m) only through their ratio") {
    BoundInputs a = unit_inputs();
    a.n = 512;
    a.m = 2;
    BoundInputs b = unit_inputs();
    b.n = 256;
    b.m = 1;
    CHECK(cor_rhs(a, CorVariant::q3) == cor_rhs(b, CorVariant::q3));
}

TEST_CASE("blocked bound against an independent evaluation") {
    BoundInputs b = unit_inputs();
    b.n = 1024;
    b.m = 4;
    const double got = cor_rhs(b, CorVariant::q3);
    const double want = static_cast<double>(third_moment_oracle(256, 4, 3, 1, 1, 1, 1, 1));
    CHECK(got == doctest::Approx(want).epsilon(1e-12));
    b.m = 0;
    CHECK_THROWS_AS(cor_rhs(b, CorVariant::q3), BadM);
}

TEST_CASE("shergin comparison bound") {
    // sigma_min = sqrt(min(m+1, n)) sigma_lower = sqrt(2); n_eff = 4.
    const double got = shergin_rhs(4, 1, 3, 1, 1, 1);
    CHECK(got == doctest::Approx(1.0 / (std::sqrt(2.0) * 2.0)).epsilon(1e-14));
    // doubling n_eff scales by 1/sqrt(2)
    CHECK(shergin_rhs(8, 1, 3, 1, 1, 1) == doctest::Approx(got / std::sqrt(2.0)).epsilon(1e-14));
    CHECK_THROWS_AS(shergin_rhs(4, 1, 2, 1, 1, 1), BadQ);
}

TEST_CASE("bound is eventually decreasing in n") {
    BoundInputs b = unit_inputs();
    double prev = 1e300;
    for (int n = 8; n <= 4096; n *= 2) {
        b.n = n;
        const double v = thm_rhs_q3(b);
        CHECK(v < prev);
        prev = v;
    }
}

TEST_CASE("dropping var-ev swaps the prefactor denominator") {
    BoundInputs b = unit_inputs();
    b.sigma_min = 100.0;  // force the alternative branch to matter
    b.drop_var_ev = true;
    const double lep = std::log(4.0 * std::exp(1.0));
    const double want_denom = std::min(100.0, 1.0 * std::sqrt(lep));
    BoundInputs plain = b;
    plain.drop_var_ev = false;
    CHECK(thm_rhs_q3(b) == doctest::Approx(thm_rhs_q3(plain) * 100.0 / want_denom).epsilon(1e-12));
}

TEST_CASE("constant fitting") {
    CHECK(fit_constant({{0.2, 0.1}}) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(fit_constant({{0.2, 0.1}, {0.3, 0.6}}) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(fit_constant({{0.0, 0.5}, {0.0, 1.0}}) == 0.0);
    CHECK_THROWS_AS(fit_constant({}), EmptyObservations);
    // With the fitted constant every observation holds.
    const std::vector<std::pair<double, double>> obs = {{0.2, 0.1}, {0.3, 0.6}, {0.01, 0.9}};
    const double c = fit_constant(obs);
    for (const auto& [mu, rhs] : obs) CHECK(mu <= c * rhs + 1e-15);
}

TEST_CASE("evaluation record serialization") {
    BoundInputs b = unit_inputs();
    const BoundEvaluation ev = evaluate_bound(BoundFormula::thm31_q3, b);
    CHECK(BoundEvaluation::csv_header() == "formula_id,n,p,m,q,rhs,C");
    CHECK(ev.to_csv_row().rfind("thm31_q3,", 0) == 0);
    CHECK(ev.to_json().find("\"formula_id\":\"thm31_q3\"") != std::string::npos);
    CHECK(bound_formula_from_string("shergin") == BoundFormula::shergin);
    CHECK_THROWS_AS(bound_formula_from_string("nope"), BadParameter);
}

TEST_SUITE_END();
