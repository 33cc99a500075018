#ifndef RCLT_MOMENTS_HPP
#define RCLT_MOMENTS_HPP

#include <string>
#include <utility>
#include <vector>

#include "rclt/interval.hpp"
#include "rclt/process.hpp"

namespace rclt {

// Per-index moment functionals of a coupled pair of series:
//   per_index_L[i]  = max_k E|X_i^(k)|^q + max_k E|Y_i^(k)|^q
//   per_index_nu[i] = E||X_i||_inf^q + E||Y_i||_inf^q
// with matching Monte Carlo standard errors.
struct MomentSummary {
    double q = 0.0;
    std::vector<double> per_index_L;
    std::vector<double> per_index_nu;
    std::vector<double> se_L;
    std::vector<double> se_nu;
    std::int64_t N = 0;
    bool heavy_tail_warning = false;  // top-decile share of a sup-norm mean > 1/2

    std::string to_json() const;
};

MomentSummary estimate_moments(const SampleBatch& batch_x, const SampleBatch& batch_y, double q, int threads = 0);

// Assembles a summary from precomputed per-side statistics (streaming path).
MomentSummary combine_moments(const SeriesMomentStats& x_stats, const SeriesMomentStats& y_stats, std::size_t iq);

// Arithmetic means (L̄_{q,I}, ν̄_{q,I}) over the interval.
std::pair<double, double> averaged(const MomentSummary& summary, const IntervalSet& I);

// Standard errors of those averages (same interval).
std::pair<double, double> averaged_se(const MomentSummary& summary, const IntervalSet& I);

}  // namespace rclt

#endif
