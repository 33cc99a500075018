#ifndef RCLT_DISTANCE_HPP
#define RCLT_DISTANCE_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rclt/covariance.hpp"
#include "rclt/interval.hpp"
#include "rclt/process.hpp"

namespace rclt {

enum class RectClass { one_sided, two_sided };

std::string to_string(RectClass c);

struct DistanceEstimate {
    double value = 0.0;
    double se = 0.0;
    std::int64_t n_samples = 0;
    std::int64_t n_candidates = 0;
    RectClass rect_class = RectClass::one_sided;

    static std::string csv_header();
    std::string to_csv_row() const;
    std::string to_json() const;
};

struct DistanceOptions {
    bool normalize = false;      // scale total sums by 1/sqrt(n)
    int candidate_budget = 16384;  // pooled-corner cap for p >= 2 (index-stride subsample)
    int quantile_levels = 64;    // per-coordinate rank-quantile corners
    int two_sided_levels = 32;
    int threads = 0;
};

// Sup over candidate rectangles of the ECDF gap between the per-replicate
// total-sum clouds of the two batches. One-sided candidates are the pooled
// sample points (all of them for p = 1, an index-stride subsample under the
// budget otherwise) plus per-coordinate rank-quantile corners; two-sided
// candidates are rank-level pairs over per-coordinate quantile grids (p <= 8).
DistanceEstimate mu_hat(const SampleBatch& batch_x, const SampleBatch& batch_y, RectClass rect_class,
                        const DistanceOptions& opts = {});

// Same estimator on precomputed total-sum clouds (rows = replicates).
DistanceEstimate mu_hat_sums(const Eigen::MatrixXd& sums_x, const Eigen::MatrixXd& sums_y, RectClass rect_class,
                             const DistanceOptions& opts = {});

// Exact one-sided sup distance between a finite discrete law and a diagonal
// Gaussian, by enumerating atom-coordinate corners and their left limits.
struct DiscreteLaw {
    std::vector<std::vector<double>> atoms;
    std::vector<double> probs;

    void validate() const;
    int dim() const { return atoms.empty() ? 0 : static_cast<int>(atoms.front().size()); }
};

double mu_exact(const DiscreteLaw& law, const std::vector<double>& gauss_mean, const std::vector<double>& gauss_sd);

struct KappaOptions {
    int candidate_budget = 512;
    int grid_points = 401;
    int cond_draws = 64;
    int cond_cloud = 2048;
    int dense_cap = kDefaultDenseCap;
    int threads = 0;
};

// Sup over candidate corners of the empirical annulus mass of the interval
// sum S_I. Unconditional: maximize over pooled sample sums plus a diagonal
// rank-quantile grid. Conditional (requires a Gaussian covariance model):
// average over conditioning draws of the per-draw sup, sampling from the
// analytic conditional law with candidates recentred per draw. Both are
// lower-bound-biased estimates of the sup (finite candidate budget).
DistanceEstimate kappa_hat(const SampleBatch& batch, const IntervalSet& I, double delta, bool conditional,
                           const CovarianceModel* cov, std::uint64_t seed, const KappaOptions& opts = {});

struct KappaPair {
    IntervalSet outer;        // I
    double delta_outer = 0.0; // delta
    IntervalSet inner;        // I' ⊂ I
    double delta_inner = 0.0; // delta' >= delta
};

struct KappaComparison {
    double lhs = 0.0, lhs_se = 0.0;
    double rhs = 0.0, rhs_se = 0.0;
    bool pass = false;
};

// Evaluates kappa on both sides of each nested pair and checks
// lhs <= rhs + 4 (se_lhs + se_rhs).
std::vector<KappaComparison> kappa_monotonicity_suite(const SampleBatch& batch, const std::vector<KappaPair>& pairs,
                                                      bool conditional, const CovarianceModel* cov,
                                                      std::uint64_t seed, const KappaOptions& opts = {});

// Unconditional annulus sup on a precomputed sum cloud (harness path).
DistanceEstimate kappa_hat_sums(const Eigen::MatrixXd& sums, double delta, const KappaOptions& opts = {});

// Per-replicate totals of a batch (rows = replicates), via the aligned tree.
Eigen::MatrixXd batch_total_sums(const SampleBatch& batch, bool normalize = false);
Eigen::MatrixXd batch_interval_sums(const SampleBatch& batch, const IntervalSet& I);

}  // namespace rclt

#endif
