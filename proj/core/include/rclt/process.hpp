#ifndef RCLT_PROCESS_HPP
#define RCLT_PROCESS_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "rclt/covariance.hpp"
#include "rclt/errors.hpp"
#include "rclt/rng.hpp"

namespace rclt {

enum class ProcessKind { ma, ring_ma, duplication, heavy_tail_ma };
enum class Innovation { gaussian, student_t };

std::string to_string(ProcessKind k);
std::string to_string(Innovation v);

// Descriptor of an m-(ring-)dependent moving-average generating process:
//   X_i = Σ_{k=0}^m A_k ε_{i-k},  innovations i.i.d. mean zero, unit variance
// per coordinate (ring processes index ε modulo n at sampling time).
// Duplication is the special pairwise-equal construction X_{2j-1} = X_{2j}.
struct ProcessSpec {
    ProcessKind kind = ProcessKind::ma;
    int m = 0;
    int p = 1;
    std::vector<Eigen::MatrixXd> coeffs;  // A_0..A_m, each p×p
    Innovation innovation = Innovation::gaussian;
    double student_df = 0.0;  // > 3 when innovation == student_t
    bool standardized = false;

    bool ring() const { return kind == ProcessKind::ring_ma; }
    std::uint64_t digest() const;
};

ProcessSpec build_ma(int m, int p, std::vector<Eigen::MatrixXd> coeffs, Innovation innovation, double student_df,
                     bool ring, bool standardize);

// Equal-weight coefficients A_k = I/sqrt(m+1); the lab's default family.
ProcessSpec build_ma_equal(int m, int p, Innovation innovation, double student_df, bool ring, bool standardize);

ProcessSpec build_duplication(int p);

// N replicates of an n×p series, stored replicate-major, then time, then
// coordinate. Regeneration with the same (spec, n, N, seed) is bit identical
// regardless of worker count.
struct SampleBatch {
    int n = 0;
    int p = 0;
    std::int64_t N = 0;
    std::uint64_t seed = 0;
    std::uint64_t spec_digest = 0;
    std::vector<double> data;

    double at(std::int64_t rep, int t, int coord) const {
        return data[static_cast<std::size_t>((rep * n + t) * p + coord)];
    }
    double& at(std::int64_t rep, int t, int coord) {
        return data[static_cast<std::size_t>((rep * n + t) * p + coord)];
    }
    const double* replicate(std::int64_t rep) const { return data.data() + static_cast<std::size_t>(rep) * n * p; }
};

SampleBatch sample_series(const ProcessSpec& spec, int n, std::int64_t N, std::uint64_t seed, int threads = 0);

// Streaming total sums: row r of the result is Σ_i X_i for replicate r,
// accumulated with the power-of-two pairwise tree (bit identical to summing
// a materialized batch with tree_sum).
Eigen::MatrixXd sample_sums(const ProcessSpec& spec, int n, std::int64_t N, std::uint64_t seed, int threads = 0);

// Per-index moment accumulation without materializing the batch. For each
// requested exponent q: max over coordinates of the MC mean of |X_i^(k)|^q,
// the MC mean of ||X_i||_inf^q, matching standard errors, and the top-decile
// share of the sup-norm estimate (heavy-tail diagnostic).
struct SeriesMomentStats {
    std::vector<double> qs;
    // [q][i] layout
    std::vector<std::vector<double>> marginal;     // max_k E|X_i^(k)|^q
    std::vector<std::vector<double>> marginal_se;
    std::vector<std::vector<double>> sup_norm;     // E ||X_i||_inf^q
    std::vector<std::vector<double>> sup_norm_se;
    std::vector<std::vector<double>> top_decile_share;
    std::int64_t N = 0;
};

SeriesMomentStats series_moments(const ProcessSpec& spec, int n, std::int64_t N, std::uint64_t seed,
                                 const std::vector<double>& qs, int threads = 0);
SeriesMomentStats batch_moments(const SampleBatch& batch, const std::vector<double>& qs, int threads = 0);

// Moment accumulation over replicates produced on demand by `gen`, which must
// write replicate `rep` as a row-major n×p series and be a pure function of
// rep. Fixed block partition and block-ordered merging keep the result
// independent of the worker count.
SeriesMomentStats streaming_moments(int n, int p, std::int64_t N, const std::vector<double>& qs,
                                    const std::function<void(std::int64_t, double*)>& gen, int threads = 0);

// Exact analytic block covariance implied by the process.
CovarianceModel implied_covariance(const ProcessSpec& spec, int n);

// Blocking reduction: n' = floor(n/m) blocks, X'_i = sum of ((i-1)m, im] for
// i < n', the last block absorbing the remainder ((n'-1)m, n]. Block sums use
// the aligned pairwise tree, so for power-of-two m dividing n the reduced
// series reproduces the original tree totals bit for bit.
SampleBatch block_reduce(const SampleBatch& batch, int m);

}  // namespace rclt

#endif
