#include "rclt/smoothing.hpp"

#include <cmath>

#include "rclt/parallel.hpp"
#include "rclt/rng.hpp"

namespace rclt {

bool below_corner(std::span<const double> x, std::span<const double> r, double shift) {
    for (std::size_t k = 0; k < x.size(); ++k)
        if (x[k] > r[k] + shift) return false;
    return true;
}

bool in_annulus(std::span<const double> x, std::span<const double> r, double delta) {
    return below_corner(x, r, delta) && !below_corner(x, r, -delta);
}

double f_smooth(std::span<const double> x, std::span<const double> r, double phi) {
    if (x.size() != r.size()) throw DimMismatch("f_smooth dim mismatch");
    if (!(phi > 0.0)) throw BadParameter("phi must be > 0");
    double gap = x[0] - r[0];
    for (std::size_t k = 1; k < x.size(); ++k) gap = std::max(gap, x[k] - r[k]);
    if (gap < 0.0) return 1.0;
    if (gap < 1.0 / phi) return 1.0 - phi * gap;
    return 0.0;
}

SmoothedValue rho_mixed(std::span<const double> x, const SmoothingParams& params, std::uint64_t seed,
                        std::uint32_t grid_index) {
    if (x.size() != params.r.size()) throw DimMismatch("rho_mixed dim mismatch");
    if (params.mc_draws < 1) throw BadParameter("mc_draws must be >= 1");
    if (params.delta == 0.0) return {f_smooth(x, params.r, params.phi), 0.0};

    const PhiloxKey key = derive_key(seed, Stream::blur);
    const int p = static_cast<int>(x.size());
    std::vector<double> shifted(x.size());
    double sum = 0.0, sumsq = 0.0;
    for (int d = 0; d < params.mc_draws; ++d) {
        for (int k = 0; k < p; ++k)
            shifted[static_cast<std::size_t>(k)] =
                x[static_cast<std::size_t>(k)] +
                params.delta * normal_draw(key, grid_index, static_cast<std::uint32_t>(d), static_cast<std::uint32_t>(k));
        const double v = f_smooth(shifted, params.r, params.phi);
        sum += v;
        sumsq += v * v;
    }
    const double mean = sum / params.mc_draws;
    double var = sumsq / params.mc_draws - mean * mean;
    if (var < 0.0) var = 0.0;
    return {mean, std::sqrt(var / params.mc_draws)};
}

SmoothedValue indicator_smooth(std::span<const double> x, std::span<const double> r, double delta_band, double eps,
                               int draws, std::uint64_t seed, std::uint32_t grid_index) {
    if (x.size() != r.size()) throw DimMismatch("indicator_smooth dim mismatch");
    if (delta_band < 0.0 || eps < 0.0) throw BadParameter("delta_band and eps must be >= 0");
    if (eps == 0.0) return {in_annulus(x, r, delta_band) ? 1.0 : 0.0, 0.0};
    if (draws < 1) throw BadParameter("draws must be >= 1");

    const PhiloxKey key = derive_key(seed, Stream::blur);
    const int p = static_cast<int>(x.size());
    std::vector<double> shifted(x.size());
    long hits = 0;
    for (int d = 0; d < draws; ++d) {
        for (int k = 0; k < p; ++k)
            shifted[static_cast<std::size_t>(k)] =
                x[static_cast<std::size_t>(k)] +
                eps * normal_draw(key, grid_index, static_cast<std::uint32_t>(d), static_cast<std::uint32_t>(k));
        if (in_annulus(shifted, r, delta_band)) ++hits;
    }
    const double mean = static_cast<double>(hits) / draws;
    return {mean, std::sqrt(std::max(mean * (1.0 - mean), 0.0) / draws)};
}

double nazarov_bound(double delta, int p, double min_var, double C) {
    if (!(min_var > 0.0)) throw NonpositiveVariance("min_var must be > 0");
    if (delta < 0.0) throw BadParameter("delta must be >= 0");
    const double e = std::exp(1.0);
    return C * delta * std::sqrt(std::log(e * static_cast<double>(p)) / min_var);
}

double smoothing_gap(const Eigen::MatrixXd& sums_x, const Eigen::MatrixXd& sums_y,
                     const std::vector<std::vector<double>>& r_grid, const SmoothingParams& params,
                     std::uint64_t seed, int threads) {
    if (sums_x.cols() != sums_y.cols()) throw ShapeMismatch("batches must share p");
    if (r_grid.empty()) throw BadParameter("r_grid must be nonempty");
    const int p = static_cast<int>(sums_x.cols());
    for (const auto& r : r_grid)
        if (static_cast<int>(r.size()) != p) throw ShapeMismatch("grid corner dim mismatch");

    const PhiloxKey key = derive_key(seed, Stream::blur);
    const std::int64_t g_count = static_cast<std::int64_t>(r_grid.size());
    std::vector<double> gaps(static_cast<std::size_t>(g_count), 0.0);

    parallel_for_blocks(
        g_count, 1,
        [&](std::int64_t g, std::int64_t, std::int64_t) {
            SmoothingParams local = params;
            local.r = r_grid[static_cast<std::size_t>(g)];
            // Common blur draws across X and Y, keyed on (grid index, draw).
            const int draws = params.delta == 0.0 ? 1 : params.mc_draws;
            std::vector<double> shifted(static_cast<std::size_t>(p));
            double mean_x = 0.0, mean_y = 0.0;
            for (int d = 0; d < draws; ++d) {
                std::vector<double> blur(static_cast<std::size_t>(p), 0.0);
                if (params.delta != 0.0)
                    for (int k = 0; k < p; ++k)
                        blur[static_cast<std::size_t>(k)] = params.delta * normal_draw(key, static_cast<std::uint32_t>(g),
                                                                                       static_cast<std::uint32_t>(d),
                                                                                       static_cast<std::uint32_t>(k));
                double acc_x = 0.0;
                for (Eigen::Index i = 0; i < sums_x.rows(); ++i) {
                    for (int k = 0; k < p; ++k) shifted[static_cast<std::size_t>(k)] = sums_x(i, k) + blur[static_cast<std::size_t>(k)];
                    acc_x += f_smooth(shifted, local.r, params.phi);
                }
                double acc_y = 0.0;
                for (Eigen::Index i = 0; i < sums_y.rows(); ++i) {
                    for (int k = 0; k < p; ++k) shifted[static_cast<std::size_t>(k)] = sums_y(i, k) + blur[static_cast<std::size_t>(k)];
                    acc_y += f_smooth(shifted, local.r, params.phi);
                }
                mean_x += acc_x / static_cast<double>(sums_x.rows());
                mean_y += acc_y / static_cast<double>(sums_y.rows());
            }
            gaps[static_cast<std::size_t>(g)] = std::abs(mean_x - mean_y) / draws;
        },
        threads);

    double out = 0.0;
    for (double g : gaps) out = std::max(out, g);
    return out;
}

}  // namespace rclt
