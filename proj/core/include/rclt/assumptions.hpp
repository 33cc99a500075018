#ifndef RCLT_ASSUMPTIONS_HPP
#define RCLT_ASSUMPTIONS_HPP

#include <optional>
#include <string>
#include <vector>

#include "rclt/covariance.hpp"
#include "rclt/interval.hpp"

namespace rclt {

// Largest admissible non-degeneracy constants for a covariance model,
// fitted by scanning every interval index set:
//   sigma_min_sq:  min over I of min_k Var[S_I^(k)] / (|I| min{m+1,|I|})
//   sigma_lower_sq: min over I (positive denominator) of
//                   lambda_min(Var[S_I | complement]) / (max{|I|-2m,0} min{m+1, max{|I|-2m,0}})
struct AssumptionReport {
    double sigma_min_sq = 0.0;
    double sigma_lower_sq = 0.0;
    IntervalSet worst_minvar;
    std::optional<IntervalSet> worst_minev;
    bool var_ev_holds = false;
    int n = 0;
    int p = 0;
    int m = 0;
    long skipped_intervals = 0;

    std::string to_json() const;
};

// All contiguous [i,j] with 1 <= i <= j <= n, plus (ring) every proper
// wrap-around set, deduplicated, ordered by cardinality then lo.
std::vector<IntervalSet> enumerate_intervals(int n, bool ring);

double sigma_min_sq_of(const CovarianceModel& cov, const IntervalSet& I);

std::pair<double, IntervalSet> fit_sigma_min(const CovarianceModel& cov, int m, int threads = 0);

struct SigmaLowerFit {
    double value = 0.0;
    std::optional<IntervalSet> worst;
    long skipped = 0;
};
SigmaLowerFit fit_sigma_lower(const CovarianceModel& cov, int m, int dense_cap = kDefaultDenseCap, int threads = 0);

bool check_var_ev(double sigma_min, double sigma_lower, int p);

AssumptionReport validate_assumptions(const CovarianceModel& cov, int dense_cap = kDefaultDenseCap, int threads = 0);

}  // namespace rclt

#endif
