#include "rclt/coupling.hpp"

#include <cmath>

#include "rclt/numeric.hpp"
#include "rclt/parallel.hpp"
#include "rclt/rng.hpp"

namespace rclt {

Eigen::MatrixXd CovarianceModel::block(int i, int j) const {
    if (dense_override) return dense_override->block((i - 1) * p, (j - 1) * p, p, p);
    const int raw = j - i;
    if (!ring) {
        const int d = raw < 0 ? -raw : raw;
        if (d > m) return Eigen::MatrixXd::Zero(p, p);
        return raw >= 0 ? lag_blocks[static_cast<std::size_t>(d)]
                        : Eigen::MatrixXd(lag_blocks[static_cast<std::size_t>(d)].transpose());
    }
    // Ring: both the forward and the wrapped-back lag can land inside the
    // bandwidth when n <= 2m; sum the contributions.
    const int d = ((raw % n) + n) % n;
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(p, p);
    if (d <= m) out += lag_blocks[static_cast<std::size_t>(d)];
    if (d != 0 && n - d <= m) out += lag_blocks[static_cast<std::size_t>(n - d)].transpose();
    return out;
}

SymMatrix expand_dense(const CovarianceModel& cov, int cap) {
    const int dim = cov.n * cov.p;
    if (dim > cap) throw TooLarge("dense expansion dim " + std::to_string(dim) + " exceeds cap " + std::to_string(cap));
    if (cov.dense_override) return SymMatrix(*cov.dense_override);
    Eigen::MatrixXd dense(dim, dim);
    for (int i = 1; i <= cov.n; ++i)
        for (int j = 1; j <= cov.n; ++j) dense.block((i - 1) * cov.p, (j - 1) * cov.p, cov.p, cov.p) = cov.block(i, j);
    return SymMatrix(std::move(dense));
}

namespace {

// Fills z with the replicate's standard normal driver vector.
void fill_driver(PhiloxKey key, std::uint32_t rep, int dim, double* z) {
    for (int j = 0; j < dim; ++j) z[j] = normal_draw(key, rep, static_cast<std::uint32_t>(j), 0);
}

}  // namespace

SampleBatch gaussian_coupling(const CovarianceModel& cov, std::int64_t N, std::uint64_t seed, int cap, int threads) {
    if (N < 1) throw BadParameter("N must be >= 1");
    const SymMatrix joint = expand_dense(cov, cap);
    const CholFactor factor = cholesky(joint);
    const int dim = joint.dim();

    SampleBatch batch;
    batch.n = cov.n;
    batch.p = cov.p;
    batch.N = N;
    batch.seed = seed;
    batch.spec_digest = 0;
    batch.data.resize(static_cast<std::size_t>(N) * dim);

    const PhiloxKey key = derive_key(seed, Stream::coupling);
    parallel_for_blocks(
        N, 64,
        [&](std::int64_t, std::int64_t lo, std::int64_t hi) {
            Eigen::VectorXd z(dim);
            for (std::int64_t r = lo; r < hi; ++r) {
                fill_driver(key, static_cast<std::uint32_t>(r), dim, z.data());
                Eigen::Map<Eigen::VectorXd> out(batch.data.data() + static_cast<std::size_t>(r) * dim, dim);
                out.noalias() = factor.lower * z;
            }
        },
        threads);
    return batch;
}

SumCoupler::SumCoupler(const CovarianceModel& cov, int cap) {
    const SymMatrix joint = expand_dense(cov, cap);
    const CholFactor factor = cholesky(joint);
    const int p = cov.p;
    const int dim = joint.dim();
    // Row c of the summing map picks coordinate c of every time index.
    Eigen::MatrixXd sum_map = Eigen::MatrixXd::Zero(p, dim);
    for (int i = 0; i < cov.n; ++i)
        for (int c = 0; c < p; ++c) sum_map(c, i * p + c) = 1.0;
    sum_map_ = sum_map * factor.lower;
}

Eigen::MatrixXd SumCoupler::sample_sums(std::int64_t N, std::uint64_t seed, int threads) const {
    const int d = dim();
    Eigen::MatrixXd sums(N, p());
    const PhiloxKey key = derive_key(seed, Stream::coupling);
    parallel_for_blocks(
        N, 256,
        [&](std::int64_t, std::int64_t lo, std::int64_t hi) {
            Eigen::VectorXd z(d);
            for (std::int64_t r = lo; r < hi; ++r) {
                fill_driver(key, static_cast<std::uint32_t>(r), d, z.data());
                sums.row(r).noalias() = (sum_map_ * z).transpose();
            }
        },
        threads);
    return sums;
}

SeriesMomentStats marginal_moments(const CovarianceModel& cov, std::int64_t N, std::uint64_t seed,
                                   const std::vector<double>& qs, int threads) {
    const int n = cov.n, p = cov.p;
    std::vector<Eigen::MatrixXd> factors(static_cast<std::size_t>(n));
    for (int i = 1; i <= n; ++i) factors[static_cast<std::size_t>(i - 1)] = cholesky(SymMatrix(cov.block(i, i))).lower;

    const PhiloxKey key = derive_key(seed, Stream::marginal_moments);
    return streaming_moments(
        n, p, N, qs,
        [&factors, key, n, p](std::int64_t r, double* row) {
            Eigen::VectorXd z(p);
            for (int i = 0; i < n; ++i) {
                for (int c = 0; c < p; ++c)
                    z(c) = normal_draw(key, static_cast<std::uint32_t>(r), static_cast<std::uint32_t>(i),
                                       static_cast<std::uint32_t>(c));
                Eigen::Map<Eigen::VectorXd> out(row + static_cast<std::size_t>(i) * p, p);
                out.noalias() = factors[static_cast<std::size_t>(i)] * z;
            }
        },
        threads);
}

}  // namespace rclt
