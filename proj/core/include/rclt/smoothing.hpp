#ifndef RCLT_SMOOTHING_HPP
#define RCLT_SMOOTHING_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <vector>

#include "rclt/errors.hpp"
#include "rclt/process.hpp"

namespace rclt {

// One-sided rectangle membership x ⪯ r and the annulus
// A_{r,delta} = {x ⪯ r+delta·1} \ {x ⪯ r-delta·1}.
bool below_corner(std::span<const double> x, std::span<const double> r, double shift = 0.0);
bool in_annulus(std::span<const double> x, std::span<const double> r, double delta);

struct SmoothingParams {
    std::vector<double> r;   // rectangle corner
    double phi = 1.0;        // ramp slope, > 0
    double delta = 0.0;      // Gaussian blur scale, >= 0
    int mc_draws = 256;      // blur draws per evaluation
};

struct SmoothedValue {
    double value = 0.0;
    double se = 0.0;
};

// Ramp surrogate for the rectangle indicator: 1 below the corner, linear
// decay with slope phi in the largest coordinate gap, 0 past 1/phi.
double f_smooth(std::span<const double> x, std::span<const double> r, double phi);

// Gaussian-blurred ramp: MC average of f over delta-scaled standard normal
// perturbations, common draws keyed by (seed, grid_index, draw).
SmoothedValue rho_mixed(std::span<const double> x, const SmoothingParams& params, std::uint64_t seed,
                        std::uint32_t grid_index = 0);

// Blurred annulus indicator: MC probability that x + eps Z lands in A_{r,delta}.
SmoothedValue indicator_smooth(std::span<const double> x, std::span<const double> r, double delta_band, double eps,
                               int draws, std::uint64_t seed, std::uint32_t grid_index = 0);

// Gaussian anti-concentration bound for the annulus mass:
// C * delta * sqrt(log(e p) / min_var).
double nazarov_bound(double delta, int p, double min_var, double C);

// Max over the corner grid of |mean rho(X sums) - mean rho(Y sums)|, with
// common blur draws across the two batches.
double smoothing_gap(const Eigen::MatrixXd& sums_x, const Eigen::MatrixXd& sums_y,
                     const std::vector<std::vector<double>>& r_grid, const SmoothingParams& params,
                     std::uint64_t seed, int threads = 0);

}  // namespace rclt

#endif
