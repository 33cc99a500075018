#ifndef RCLT_COUPLING_HPP
#define RCLT_COUPLING_HPP

#include <Eigen/Dense>
#include <cstdint>

#include "rclt/covariance.hpp"
#include "rclt/process.hpp"

namespace rclt {

// Gaussian series with Var[vec] equal to the model, sampled by applying the
// joint factor (Cholesky, with the PSD eigenfactor fallback) to i.i.d.
// standard normals. Deterministic per (seed, replicate).
SampleBatch gaussian_coupling(const CovarianceModel& cov, std::int64_t N, std::uint64_t seed,
                              int cap = kDefaultDenseCap, int threads = 0);

// Sum projection of the same coupling: factors the dense joint once, then
// draws only the per-replicate total-sum vector S = (Σ_i Y_i) via the
// precomposed p×(np) map. Lets sweeps run at sizes where materializing whole
// series batches is pointless.
class SumCoupler {
  public:
    SumCoupler(const CovarianceModel& cov, int cap = kDefaultDenseCap);

    int dim() const { return static_cast<int>(sum_map_.cols()); }
    int p() const { return static_cast<int>(sum_map_.rows()); }

    Eigen::MatrixXd sample_sums(std::int64_t N, std::uint64_t seed, int threads = 0) const;

  private:
    Eigen::MatrixXd sum_map_;  // (summing map) * L, p × (np)
};

// Per-index moment statistics of the coupled Gaussian series, estimated from
// its exact per-index marginal law N(0, block(i,i)). Cross-index dependence
// does not enter any per-index moment, so this matches sampling the joint
// series at a fraction of the cost.
SeriesMomentStats marginal_moments(const CovarianceModel& cov, std::int64_t N, std::uint64_t seed,
                                   const std::vector<double>& qs, int threads = 0);

}  // namespace rclt

#endif
