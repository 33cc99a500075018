#ifndef RCLT_BOUNDS_HPP
#define RCLT_BOUNDS_HPP

#include <string>
#include <utility>
#include <vector>

#include "rclt/errors.hpp"

namespace rclt {

struct BoundInputs {
    double n = 0.0;
    double p = 0.0;
    double m = 1.0;
    double q = 3.0;
    double sigma_min = 1.0;    // σ_min > 0
    double sigma_lower = 1.0;  // σ̲ > 0
    double Lbar3 = 0.0;
    double Lbar4 = 0.0;
    double nubar_q = 0.0;
    double Lbar_q = 0.0;  // used only by the shergin formula
    double C = 1.0;
    bool drop_var_ev = false;  // replace C/σ_min by C/min{σ_min, σ̲ sqrt(log(ep))}
};

enum class BoundFormula { thm31_q3, thm32_q4, cor_q3, cor_q4, shergin };

std::string to_string(BoundFormula f);
BoundFormula bound_formula_from_string(const std::string& s);

struct BoundEvaluation {
    double rhs = 0.0;
    BoundFormula formula = BoundFormula::thm31_q3;
    BoundInputs inputs;

    static std::string csv_header();
    std::string to_csv_row() const;
    std::string to_json() const;
};

// Third-moment bound:
//   (C log(en)/σ_min) sqrt(log(pn)/n) [ (L̄3/σ̲²) log²(ep)
//       + (ν̄_q/σ̲²)^{1/(q-2)} log^{max(1, 2/(q-2))}(ep) ]
double thm_rhs_q3(const BoundInputs& b);

// Fourth-moment bound: same prefactor with bracket
//   (L̄3/σ̲²) log^{3/2}(ep) + (L̄4^{1/2}/σ̲) log(ep) + (ν̄_q/σ̲²)^{1/(q-2)} log(ep)
double thm_rhs_q4(const BoundInputs& b);

enum class CorVariant { q3, q4 };

// Blocked-reduction bound: the matching formula with n replaced by n/m.
double cor_rhs(const BoundInputs& b, CorVariant variant);

// Comparison bound for m-dependent sums:
//   C/(σ_min sqrt(n_eff)) (L̄_q/σ̲²)^{1/(q-2)},
// with σ_min² = min{m+1, n} σ̲² substituted internally and n_eff = n/m.
double shergin_rhs(double n, double m, double q, double Lbar_q, double sigma_lower, double C);

// Smallest constant making every observed (mu_hat, rhs-at-C=1) pair hold.
double fit_constant(const std::vector<std::pair<double, double>>& observations);

BoundEvaluation evaluate_bound(BoundFormula formula, const BoundInputs& inputs);

}  // namespace rclt

#endif
