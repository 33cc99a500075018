#include "rclt/process.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "rclt/numeric.hpp"
#include "rclt/parallel.hpp"

namespace rclt {

std::string to_string(ProcessKind k) {
    switch (k) {
        case ProcessKind::ma: return "ma";
        case ProcessKind::ring_ma: return "ring_ma";
        case ProcessKind::duplication: return "duplication";
        case ProcessKind::heavy_tail_ma: return "heavy_tail_ma";
    }
    return "?";
}

std::string to_string(Innovation v) { return v == Innovation::gaussian ? "gaussian" : "student_t"; }

std::uint64_t ProcessSpec::digest() const {
    std::uint64_t h = fnv1a(to_string(kind));
    h = fnv1a_u64(static_cast<std::uint64_t>(m), h);
    h = fnv1a_u64(static_cast<std::uint64_t>(p), h);
    h = fnv1a(to_string(innovation), h);
    h = fnv1a_f64(student_df, h);
    h = fnv1a_u64(standardized ? 1 : 0, h);
    for (const auto& a : coeffs)
        for (Eigen::Index r = 0; r < a.rows(); ++r)
            for (Eigen::Index c = 0; c < a.cols(); ++c) h = fnv1a_f64(a(r, c), h);
    return h;
}

ProcessSpec build_ma(int m, int p, std::vector<Eigen::MatrixXd> coeffs, Innovation innovation, double student_df,
                     bool ring, bool standardize) {
    if (m < 0 || p < 1) throw BadCoefficients("m must be >= 0 and p >= 1");
    if (static_cast<int>(coeffs.size()) != m + 1) throw BadCoefficients("need m+1 coefficient matrices");
    for (const auto& a : coeffs)
        if (a.rows() != p || a.cols() != p) throw BadCoefficients("coefficient matrices must be p x p");
    if (innovation == Innovation::student_t && !(student_df > 3.0))
        throw BadParameter("StudentT innovations require df > 3");

    ProcessSpec spec;
    spec.kind = ring ? ProcessKind::ring_ma
                     : (innovation == Innovation::student_t ? ProcessKind::heavy_tail_ma : ProcessKind::ma);
    spec.m = m;
    spec.p = p;
    spec.coeffs = std::move(coeffs);
    spec.innovation = innovation;
    spec.student_df = innovation == Innovation::student_t ? student_df : 0.0;
    spec.standardized = standardize;

    if (standardize) {
        // Rescale row c of every A_k so Var[X^(c)] = sum_k ||A_k row c||^2 = 1.
        for (int c = 0; c < p; ++c) {
            double v = 0.0;
            for (const auto& a : spec.coeffs) v += a.row(c).squaredNorm();
            if (v <= 0.0) throw BadCoefficients("cannot standardize a coordinate with zero variance");
            const double s = 1.0 / std::sqrt(v);
            for (auto& a : spec.coeffs) a.row(c) *= s;
        }
    }
    return spec;
}

ProcessSpec build_ma_equal(int m, int p, Innovation innovation, double student_df, bool ring, bool standardize) {
    std::vector<Eigen::MatrixXd> coeffs(static_cast<std::size_t>(m) + 1, Eigen::MatrixXd::Identity(p, p));
    ProcessSpec spec = build_ma(m, p, std::move(coeffs), innovation, student_df, ring, false);
    if (standardize) {
        for (auto& a : spec.coeffs) a *= 1.0 / std::sqrt(static_cast<double>(m + 1));
        spec.standardized = true;
    }
    return spec;
}

ProcessSpec build_duplication(int p) {
    if (p < 1) throw BadCoefficients("p must be >= 1");
    ProcessSpec spec;
    spec.kind = ProcessKind::duplication;
    spec.m = 1;
    spec.p = p;
    spec.innovation = Innovation::gaussian;
    spec.standardized = true;
    return spec;
}

namespace {

double innovation_draw(const ProcessSpec& spec, PhiloxKey key, std::uint32_t rep, std::uint32_t idx,
                       std::uint32_t coord) {
    if (spec.innovation == Innovation::gaussian) return normal_draw(key, rep, idx, coord);
    const double df = spec.student_df;
    return student_t_draw(key, rep, idx, coord, df) * std::sqrt((df - 2.0) / df);
}

void check_sampling(const ProcessSpec& spec, int n, std::int64_t N) {
    if (N < 1) throw BadParameter("N must be >= 1");
    if (spec.kind == ProcessKind::duplication) {
        if (n < 2) throw BadParameter("duplication requires n >= 2");
        if (n % 2 != 0) throw OddLengthUnsupported("duplication requires even n");
        return;
    }
    if (n < spec.m + 1) throw BadParameter("need n >= m+1");
}

// Writes replicate `rep` of the series into out (row-major n×p).
void generate_replicate(const ProcessSpec& spec, int n, std::uint32_t rep, PhiloxKey key, std::vector<double>& eps,
                        double* out) {
    const int p = spec.p;
    if (spec.kind == ProcessKind::duplication) {
        for (int j = 0; j < n / 2; ++j)
            for (int c = 0; c < p; ++c) {
                const double z = normal_draw(key, rep, static_cast<std::uint32_t>(j), static_cast<std::uint32_t>(c));
                out[(2 * j) * p + c] = z;
                out[(2 * j + 1) * p + c] = z;
            }
        return;
    }

    const int m = spec.m;
    const bool ring = spec.ring();
    const int n_eps = ring ? n : n + m;
    eps.resize(static_cast<std::size_t>(n_eps) * p);
    for (int t = 0; t < n_eps; ++t)
        for (int c = 0; c < p; ++c)
            eps[static_cast<std::size_t>(t) * p + c] =
                innovation_draw(spec, key, rep, static_cast<std::uint32_t>(t), static_cast<std::uint32_t>(c));

    for (int t = 0; t < n; ++t) {
        double* row = out + static_cast<std::size_t>(t) * p;
        std::fill(row, row + p, 0.0);
        for (int k = 0; k <= m; ++k) {
            // Linear: eps index t-k shifted by +m; ring: modulo n.
            const int e = ring ? ((t - k) % n + n) % n : t - k + m;
            const double* ev = eps.data() + static_cast<std::size_t>(e) * p;
            const Eigen::MatrixXd& a = spec.coeffs[static_cast<std::size_t>(k)];
            for (int r = 0; r < p; ++r) {
                double acc = 0.0;
                for (int c = 0; c < p; ++c) acc += a(r, c) * ev[c];
                row[r] += acc;
            }
        }
    }
}

std::int64_t moment_block_size(std::int64_t N) {
    // Deterministic partition: at most 64 blocks, independent of threads.
    return std::max<std::int64_t>(1, (N + 63) / 64);
}

}  // namespace

SampleBatch sample_series(const ProcessSpec& spec, int n, std::int64_t N, std::uint64_t seed, int threads) {
    check_sampling(spec, n, N);
    SampleBatch batch;
    batch.n = n;
    batch.p = spec.p;
    batch.N = N;
    batch.seed = seed;
    batch.spec_digest = spec.digest();
    batch.data.resize(static_cast<std::size_t>(N) * n * spec.p);

    const PhiloxKey key = derive_key(seed, Stream::innovations);
    parallel_for_blocks(
        N, 256,
        [&](std::int64_t, std::int64_t lo, std::int64_t hi) {
            std::vector<double> eps;
            for (std::int64_t r = lo; r < hi; ++r)
                generate_replicate(spec, n, static_cast<std::uint32_t>(r), key, eps,
                                   batch.data.data() + static_cast<std::size_t>(r) * n * spec.p);
        },
        threads);
    return batch;
}

Eigen::MatrixXd sample_sums(const ProcessSpec& spec, int n, std::int64_t N, std::uint64_t seed, int threads) {
    check_sampling(spec, n, N);
    const int p = spec.p;
    Eigen::MatrixXd sums(N, p);
    const PhiloxKey key = derive_key(seed, Stream::innovations);
    parallel_for_blocks(
        N, 256,
        [&](std::int64_t, std::int64_t lo, std::int64_t hi) {
            std::vector<double> eps;
            std::vector<double> row(static_cast<std::size_t>(n) * p);
            for (std::int64_t r = lo; r < hi; ++r) {
                generate_replicate(spec, n, static_cast<std::uint32_t>(r), key, eps, row.data());
                for (int c = 0; c < p; ++c) sums(r, c) = tree_sum_strided(row.data() + c, n, p);
            }
        },
        threads);
    return sums;
}

namespace {

struct MomentAccumulator {
    // per (q, index, coord): running sum and sum of squares of |x|^q
    // per (q, index): same for ||x||_inf^q
    int n = 0, p = 0;
    std::size_t nq = 0;
    std::vector<double> marg_sum, marg_sq, sup_sum, sup_sq;

    void init(int n_, int p_, std::size_t nq_) {
        n = n_;
        p = p_;
        nq = nq_;
        marg_sum.assign(nq * n * p, 0.0);
        marg_sq.assign(nq * n * p, 0.0);
        sup_sum.assign(nq * n, 0.0);
        sup_sq.assign(nq * n, 0.0);
    }

    void add_row(const std::vector<double>& qs, int t, const double* row) {
        double sup = 0.0;
        for (int c = 0; c < p; ++c) sup = std::max(sup, std::abs(row[c]));
        for (std::size_t iq = 0; iq < nq; ++iq) {
            const double q = qs[iq];
            for (int c = 0; c < p; ++c) {
                const double v = std::pow(std::abs(row[c]), q);
                marg_sum[(iq * n + t) * p + c] += v;
                marg_sq[(iq * n + t) * p + c] += v * v;
            }
            const double s = std::pow(sup, q);
            sup_sum[iq * n + t] += s;
            sup_sq[iq * n + t] += s * s;
        }
    }

    void merge(const MomentAccumulator& other) {
        for (std::size_t i = 0; i < marg_sum.size(); ++i) marg_sum[i] += other.marg_sum[i];
        for (std::size_t i = 0; i < marg_sq.size(); ++i) marg_sq[i] += other.marg_sq[i];
        for (std::size_t i = 0; i < sup_sum.size(); ++i) sup_sum[i] += other.sup_sum[i];
        for (std::size_t i = 0; i < sup_sq.size(); ++i) sup_sq[i] += other.sup_sq[i];
    }
};

double mean_se(double sum, double sumsq, std::int64_t N, double* mean_out) {
    const double mean = sum / static_cast<double>(N);
    double var = sumsq / static_cast<double>(N) - mean * mean;
    if (var < 0.0) var = 0.0;
    *mean_out = mean;
    return std::sqrt(var / static_cast<double>(N));
}

// Top-decile share of the mean, from sorted nonnegative contributions.
void decile_share_from_values(std::vector<double>& vals, double* share) {
    std::sort(vals.begin(), vals.end());
    const std::size_t count = vals.size();
    const std::size_t top = std::max<std::size_t>(1, count / 10);
    double total = 0.0, head = 0.0;
    for (std::size_t i = 0; i < count; ++i) total += vals[i];
    for (std::size_t i = count - top; i < count; ++i) head += vals[i];
    *share = total > 0.0 ? head / total : 0.0;
}

}  // namespace

SeriesMomentStats streaming_moments(int n, int p, std::int64_t N, const std::vector<double>& qs,
                                    const std::function<void(std::int64_t, double*)>& gen, int threads) {
    const std::int64_t bs = moment_block_size(N);
    const std::int64_t nb = block_count(N, bs);
    std::vector<MomentAccumulator> partials(static_cast<std::size_t>(nb));
    parallel_for_blocks(
        N, bs,
        [&](std::int64_t b, std::int64_t lo, std::int64_t hi) {
            auto& acc = partials[static_cast<std::size_t>(b)];
            acc.init(n, p, qs.size());
            std::vector<double> row(static_cast<std::size_t>(n) * p);
            for (std::int64_t r = lo; r < hi; ++r) {
                gen(r, row.data());
                for (int t = 0; t < n; ++t) acc.add_row(qs, t, row.data() + static_cast<std::size_t>(t) * p);
            }
        },
        threads);
    MomentAccumulator total = std::move(partials[0]);
    for (std::size_t b = 1; b < partials.size(); ++b) total.merge(partials[b]);

    // Heavy-tail diagnostic from a deterministic replicate subsample.
    const std::int64_t cap = std::min<std::int64_t>(N, 4096);
    std::vector<std::vector<double>> sup_vals(static_cast<std::size_t>(n));
    for (auto& v : sup_vals) v.reserve(static_cast<std::size_t>(cap));
    {
        std::vector<double> row(static_cast<std::size_t>(n) * p);
        for (std::int64_t r = 0; r < cap; ++r) {
            gen(r, row.data());
            for (int t = 0; t < n; ++t) {
                double sup = 0.0;
                for (int c = 0; c < p; ++c) sup = std::max(sup, std::abs(row[static_cast<std::size_t>(t) * p + c]));
                sup_vals[static_cast<std::size_t>(t)].push_back(sup);
            }
        }
    }

    SeriesMomentStats out;
    out.qs = qs;
    out.N = N;
    out.marginal.assign(qs.size(), std::vector<double>(static_cast<std::size_t>(n), 0.0));
    out.marginal_se = out.marginal;
    out.sup_norm = out.marginal;
    out.sup_norm_se = out.marginal;
    out.top_decile_share = out.marginal;
    std::vector<double> scratch(static_cast<std::size_t>(cap));
    for (std::size_t iq = 0; iq < qs.size(); ++iq) {
        const double q = qs[iq];
        for (int t = 0; t < n; ++t) {
            double best = -1.0, best_se = 0.0;
            for (int c = 0; c < p; ++c) {
                double mean;
                const double se = mean_se(total.marg_sum[(iq * static_cast<std::size_t>(n) + static_cast<std::size_t>(t)) * static_cast<std::size_t>(p) + static_cast<std::size_t>(c)],
                                          total.marg_sq[(iq * static_cast<std::size_t>(n) + static_cast<std::size_t>(t)) * static_cast<std::size_t>(p) + static_cast<std::size_t>(c)], N, &mean);
                if (mean > best) {
                    best = mean;
                    best_se = se;
                }
            }
            out.marginal[iq][static_cast<std::size_t>(t)] = best;
            out.marginal_se[iq][static_cast<std::size_t>(t)] = best_se;
            double smean;
            out.sup_norm_se[iq][static_cast<std::size_t>(t)] =
                mean_se(total.sup_sum[iq * static_cast<std::size_t>(n) + static_cast<std::size_t>(t)],
                        total.sup_sq[iq * static_cast<std::size_t>(n) + static_cast<std::size_t>(t)], N, &smean);
            out.sup_norm[iq][static_cast<std::size_t>(t)] = smean;

            for (std::int64_t r = 0; r < cap; ++r)
                scratch[static_cast<std::size_t>(r)] =
                    std::pow(sup_vals[static_cast<std::size_t>(t)][static_cast<std::size_t>(r)], q);
            decile_share_from_values(scratch, &out.top_decile_share[iq][static_cast<std::size_t>(t)]);
        }
    }
    return out;
}

SeriesMomentStats series_moments(const ProcessSpec& spec, int n, std::int64_t N, std::uint64_t seed,
                                 const std::vector<double>& qs, int threads) {
    check_sampling(spec, n, N);
    const PhiloxKey key = derive_key(seed, Stream::innovations);
    return streaming_moments(
        n, spec.p, N, qs,
        [&spec, n, key](std::int64_t r, double* row) {
            thread_local std::vector<double> eps;
            generate_replicate(spec, n, static_cast<std::uint32_t>(r), key, eps, row);
        },
        threads);
}

SeriesMomentStats batch_moments(const SampleBatch& batch, const std::vector<double>& qs, int threads) {
    const std::size_t row_len = static_cast<std::size_t>(batch.n) * batch.p;
    return streaming_moments(
        batch.n, batch.p, batch.N, qs,
        [&batch, row_len](std::int64_t r, double* row) {
            const double* src = batch.replicate(r);
            std::copy(src, src + row_len, row);
        },
        threads);
}

CovarianceModel implied_covariance(const ProcessSpec& spec, int n) {
    CovarianceModel cov;
    cov.n = n;
    cov.p = spec.p;
    cov.m = spec.m;
    cov.ring = spec.ring();

    if (spec.kind == ProcessKind::duplication) {
        if (n % 2 != 0) throw OddLengthUnsupported("duplication requires even n");
        const int p = spec.p;
        Eigen::MatrixXd dense = Eigen::MatrixXd::Zero(n * p, n * p);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                if (i / 2 == j / 2) dense.block(i * p, j * p, p, p) = Eigen::MatrixXd::Identity(p, p);
        cov.dense_override = std::move(dense);
        return cov;
    }

    if (n < spec.m + 1) throw BadParameter("need n >= m+1");
    cov.lag_blocks.resize(static_cast<std::size_t>(spec.m) + 1);
    for (int d = 0; d <= spec.m; ++d) {
        Eigen::MatrixXd b = Eigen::MatrixXd::Zero(spec.p, spec.p);
        for (int k = 0; k + d <= spec.m; ++k)
            b += spec.coeffs[static_cast<std::size_t>(k)] * spec.coeffs[static_cast<std::size_t>(k + d)].transpose();
        cov.lag_blocks[static_cast<std::size_t>(d)] = std::move(b);
    }
    return cov;
}

SampleBatch block_reduce(const SampleBatch& batch, int m) {
    if (m < 1) throw BadParameter("m must be >= 1");
    if (batch.n < m) throw BadParameter("need n >= m");
    const int n_out = batch.n / m;
    const int p = batch.p;

    SampleBatch out;
    out.n = n_out;
    out.p = p;
    out.N = batch.N;
    out.seed = batch.seed;
    out.spec_digest = batch.spec_digest;
    out.data.resize(static_cast<std::size_t>(batch.N) * n_out * p);

    for (std::int64_t r = 0; r < batch.N; ++r) {
        const double* src = batch.replicate(r);
        for (int i = 0; i < n_out; ++i) {
            const int lo = i * m;
            const int hi = (i == n_out - 1) ? batch.n : (i + 1) * m;  // last block absorbs remainder
            for (int c = 0; c < p; ++c)
                out.at(r, i, c) = tree_sum_strided(src + static_cast<std::size_t>(lo) * p + c, hi - lo, p);
        }
    }
    return out;
}

}  // namespace rclt
