#include "rclt/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace rclt {

std::string to_string(BoundFormula f) {
    switch (f) {
        case BoundFormula::thm31_q3: return "thm31_q3";
        case BoundFormula::thm32_q4: return "thm32_q4";
        case BoundFormula::cor_q3: return "cor_q3";
        case BoundFormula::cor_q4: return "cor_q4";
        case BoundFormula::shergin: return "shergin";
    }
    return "?";
}

BoundFormula bound_formula_from_string(const std::string& s) {
    if (s == "thm31_q3") return BoundFormula::thm31_q3;
    if (s == "thm32_q4") return BoundFormula::thm32_q4;
    if (s == "cor_q3") return BoundFormula::cor_q3;
    if (s == "cor_q4") return BoundFormula::cor_q4;
    if (s == "shergin") return BoundFormula::shergin;
    throw BadParameter("unknown bound formula: " + s);
}

namespace {

constexpr double kE = 2.718281828459045;

void check_common(const BoundInputs& b) {
    if (!(b.sigma_min > 0.0) || !(b.sigma_lower > 0.0)) throw BadParameter("sigmas must be > 0");
    if (!(b.n > 0.0) || !(b.p >= 1.0)) throw BadParameter("need n > 0 and p >= 1");
}

// Shared prefactor C log(en)/σ_min * sqrt(log(pn)/n), with the optional
// no-VAR-EV replacement of the 1/σ_min factor.
double prefactor(const BoundInputs& b, double n_eff) {
    const double log_ep = std::log(kE * b.p);
    const double denom = b.drop_var_ev ? std::min(b.sigma_min, b.sigma_lower * std::sqrt(log_ep)) : b.sigma_min;
    return b.C * std::log(kE * n_eff) / denom * std::sqrt(std::log(b.p * n_eff) / n_eff);
}

double bracket_q3(const BoundInputs& b) {
    const double log_ep = std::log(kE * b.p);
    const double s2 = b.sigma_lower * b.sigma_lower;
    const double expo = std::max(1.0, 2.0 / (b.q - 2.0));
    return b.Lbar3 / s2 * log_ep * log_ep + std::pow(b.nubar_q / s2, 1.0 / (b.q - 2.0)) * std::pow(log_ep, expo);
}

double bracket_q4(const BoundInputs& b) {
    const double log_ep = std::log(kE * b.p);
    const double s2 = b.sigma_lower * b.sigma_lower;
    return b.Lbar3 / s2 * std::pow(log_ep, 1.5) + std::sqrt(b.Lbar4) / b.sigma_lower * log_ep +
           std::pow(b.nubar_q / s2, 1.0 / (b.q - 2.0)) * log_ep;
}

}  // namespace

double thm_rhs_q3(const BoundInputs& b) {
    check_common(b);
    if (!(b.q >= 3.0)) throw BadQ("q must be >= 3");
    return prefactor(b, b.n) * bracket_q3(b);
}

double thm_rhs_q4(const BoundInputs& b) {
    check_common(b);
    if (!(b.q >= 4.0)) throw BadQ("q must be >= 4");
    return prefactor(b, b.n) * bracket_q4(b);
}

double cor_rhs(const BoundInputs& b, CorVariant variant) {
    check_common(b);
    if (!(b.m >= 1.0)) throw BadM("m must be >= 1");
    const double n_eff = b.n / b.m;
    if (variant == CorVariant::q3) {
        if (!(b.q >= 3.0)) throw BadQ("q must be >= 3");
        return prefactor(b, n_eff) * bracket_q3(b);
    }
    if (!(b.q >= 4.0)) throw BadQ("q must be >= 4");
    return prefactor(b, n_eff) * bracket_q4(b);
}

double shergin_rhs(double n, double m, double q, double Lbar_q, double sigma_lower, double C) {
    if (!(q > 2.0)) throw BadQ("q must be > 2");
    if (!(m >= 1.0)) throw BadM("m must be >= 1");
    if (!(sigma_lower > 0.0)) throw BadParameter("sigma_lower must be > 0");
    if (!(n > 0.0)) throw BadParameter("n must be > 0");
    const double n_eff = n / m;
    const double sigma_min = std::sqrt(std::min(m + 1.0, n)) * sigma_lower;
    return C / (sigma_min * std::sqrt(n_eff)) *
           std::pow(Lbar_q / (sigma_lower * sigma_lower), 1.0 / (q - 2.0));
}

double fit_constant(const std::vector<std::pair<double, double>>& observations) {
    if (observations.empty()) throw EmptyObservations("fit_constant requires at least one observation");
    double best = 0.0;
    for (const auto& [mu, rhs] : observations) {
        if (!(rhs > 0.0)) throw BadParameter("rhs values must be > 0");
        best = std::max(best, mu / rhs);
    }
    return best;
}

BoundEvaluation evaluate_bound(BoundFormula formula, const BoundInputs& inputs) {
    BoundEvaluation ev;
    ev.formula = formula;
    ev.inputs = inputs;
    switch (formula) {
        case BoundFormula::thm31_q3: ev.rhs = thm_rhs_q3(inputs); break;
        case BoundFormula::thm32_q4: ev.rhs = thm_rhs_q4(inputs); break;
        case BoundFormula::cor_q3: ev.rhs = cor_rhs(inputs, CorVariant::q3); break;
        case BoundFormula::cor_q4: ev.rhs = cor_rhs(inputs, CorVariant::q4); break;
        case BoundFormula::shergin:
            ev.rhs = shergin_rhs(inputs.n, inputs.m, inputs.q, inputs.Lbar_q, inputs.sigma_lower, inputs.C);
            break;
    }
    return ev;
}

std::string BoundEvaluation::csv_header() { return "formula_id,n,p,m,q,rhs,C"; }

std::string BoundEvaluation::to_csv_row() const {
    std::ostringstream os;
    os.precision(17);
    os << to_string(formula) << ',' << inputs.n << ',' << inputs.p << ',' << inputs.m << ',' << inputs.q << ','
       << rhs << ',' << inputs.C;
    return os.str();
}

std::string BoundEvaluation::to_json() const {
    std::ostringstream os;
    os.precision(17);
    os << "{\"formula_id\":\"" << to_string(formula) << "\",\"n\":" << inputs.n << ",\"p\":" << inputs.p
       << ",\"m\":" << inputs.m << ",\"q\":" << inputs.q << ",\"rhs\":" << rhs << ",\"C\":" << inputs.C << "}";
    return os.str();
}

}  // namespace rclt
