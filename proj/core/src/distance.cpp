#include "rclt/distance.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

#include "rclt/numeric.hpp"
#include "rclt/parallel.hpp"
#include "rclt/rng.hpp"

namespace rclt {

std::string to_string(RectClass c) { return c == RectClass::one_sided ? "one_sided" : "two_sided"; }

std::string DistanceEstimate::csv_header() { return "value,se,n_samples,n_candidates,class"; }

std::string DistanceEstimate::to_csv_row() const {
    std::ostringstream os;
    os.precision(17);
    os << value << ',' << se << ',' << n_samples << ',' << n_candidates << ',' << to_string(rect_class);
    return os.str();
}

std::string DistanceEstimate::to_json() const {
    std::ostringstream os;
    os.precision(17);
    os << "{\"value\":" << value << ",\"se\":" << se << ",\"n_samples\":" << n_samples
       << ",\"n_candidates\":" << n_candidates << ",\"class\":\"" << to_string(rect_class) << "\"}";
    return os.str();
}

Eigen::MatrixXd batch_total_sums(const SampleBatch& batch, bool normalize) {
    Eigen::MatrixXd sums(batch.N, batch.p);
    const double scale = normalize ? 1.0 / std::sqrt(static_cast<double>(batch.n)) : 1.0;
    for (std::int64_t r = 0; r < batch.N; ++r) {
        const double* rep = batch.replicate(r);
        for (int c = 0; c < batch.p; ++c) sums(r, c) = scale * tree_sum_strided(rep + c, batch.n, batch.p);
    }
    return sums;
}

Eigen::MatrixXd batch_interval_sums(const SampleBatch& batch, const IntervalSet& I) {
    const auto members = I.members(batch.n);
    Eigen::MatrixXd sums(batch.N, batch.p);
    std::vector<double> scratch(members.size());
    for (std::int64_t r = 0; r < batch.N; ++r)
        for (int c = 0; c < batch.p; ++c) {
            for (std::size_t k = 0; k < members.size(); ++k) scratch[k] = batch.at(r, members[k] - 1, c);
            sums(r, c) = tree_sum(scratch.data(), static_cast<std::int64_t>(scratch.size()));
        }
    return sums;
}

namespace {

double dkw_se(std::int64_t n_min) { return std::sqrt(std::log(2.0 / 0.01) / (2.0 * static_cast<double>(n_min))); }

// Exact one-sided two-sample sup over the pooled points (p = 1).
double exact_ks_1d(std::vector<double> x, std::vector<double> y) {
    std::sort(x.begin(), x.end());
    std::sort(y.begin(), y.end());
    const std::size_t nx = x.size(), ny = y.size();
    std::size_t i = 0, j = 0;
    double best = 0.0;
    while (i < nx || j < ny) {
        double v;
        if (i < nx && j < ny)
            v = std::min(x[i], y[j]);
        else if (i < nx)
            v = x[i];
        else
            v = y[j];
        while (i < nx && x[i] <= v) ++i;
        while (j < ny && y[j] <= v) ++j;
        const double d = std::abs(static_cast<double>(i) / nx - static_cast<double>(j) / ny);
        best = std::max(best, d);
    }
    return best;
}

// Index-stride subsample of the rows of two clouds under a shared budget;
// choosing candidates by row index (not value) keeps monotone-map results
// exactly invariant.
void append_stride_rows(const Eigen::MatrixXd& cloud, int budget, std::vector<std::vector<double>>& out) {
    const std::int64_t n = cloud.rows();
    const std::int64_t stride = std::max<std::int64_t>(1, (n + budget - 1) / budget);
    for (std::int64_t r = 0; r < n; r += stride) {
        std::vector<double> corner(static_cast<std::size_t>(cloud.cols()));
        for (Eigen::Index c = 0; c < cloud.cols(); ++c) corner[static_cast<std::size_t>(c)] = cloud(r, c);
        out.push_back(std::move(corner));
    }
}

std::vector<std::vector<double>> sorted_columns(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    const int p = static_cast<int>(a.cols());
    std::vector<std::vector<double>> cols(static_cast<std::size_t>(p));
    for (int c = 0; c < p; ++c) {
        auto& col = cols[static_cast<std::size_t>(c)];
        col.reserve(static_cast<std::size_t>(a.rows() + b.rows()));
        for (Eigen::Index r = 0; r < a.rows(); ++r) col.push_back(a(r, c));
        for (Eigen::Index r = 0; r < b.rows(); ++r) col.push_back(b(r, c));
        std::sort(col.begin(), col.end());
    }
    return cols;
}

void append_quantile_diagonal(const std::vector<std::vector<double>>& sorted_cols, int levels,
                              std::vector<std::vector<double>>& out) {
    const int p = static_cast<int>(sorted_cols.size());
    for (int l = 1; l <= levels; ++l) {
        const double prob = static_cast<double>(l) / (levels + 1.0);
        std::vector<double> corner(static_cast<std::size_t>(p));
        for (int c = 0; c < p; ++c) {
            const auto& col = sorted_cols[static_cast<std::size_t>(c)];
            std::int64_t k = static_cast<std::int64_t>(std::ceil(prob * static_cast<double>(col.size())));
            k = std::clamp<std::int64_t>(k, 1, static_cast<std::int64_t>(col.size()));
            corner[static_cast<std::size_t>(c)] = col[static_cast<std::size_t>(k - 1)];
        }
        out.push_back(std::move(corner));
    }
}

double ecdf_at(const Eigen::MatrixXd& cloud, const std::vector<double>& corner) {
    const int p = static_cast<int>(cloud.cols());
    std::int64_t count = 0;
    for (Eigen::Index r = 0; r < cloud.rows(); ++r) {
        bool below = true;
        for (int c = 0; c < p; ++c)
            if (cloud(r, c) > corner[static_cast<std::size_t>(c)]) {
                below = false;
                break;
            }
        if (below) ++count;
    }
    return static_cast<double>(count) / static_cast<double>(cloud.rows());
}

double max_over_candidates(const std::vector<std::vector<double>>& candidates,
                           const std::function<double(const std::vector<double>&)>& score, int threads) {
    const std::int64_t count = static_cast<std::int64_t>(candidates.size());
    const std::int64_t bs = std::max<std::int64_t>(1, (count + 255) / 256);
    std::vector<double> partial(static_cast<std::size_t>(block_count(count, bs)),
                                -std::numeric_limits<double>::infinity());
    parallel_for_blocks(
        count, bs,
        [&](std::int64_t b, std::int64_t lo, std::int64_t hi) {
            double best = -std::numeric_limits<double>::infinity();
            for (std::int64_t k = lo; k < hi; ++k) best = std::max(best, score(candidates[static_cast<std::size_t>(k)]));
            partial[static_cast<std::size_t>(b)] = best;
        },
        threads);
    double out = -std::numeric_limits<double>::infinity();
    for (double v : partial) out = std::max(out, v);
    return out;
}

}  // namespace

DistanceEstimate mu_hat_sums(const Eigen::MatrixXd& sums_x, const Eigen::MatrixXd& sums_y, RectClass rect_class,
                             const DistanceOptions& opts) {
    if (sums_x.cols() != sums_y.cols()) throw ShapeMismatch("sum clouds must share p");
    const int p = static_cast<int>(sums_x.cols());
    const std::int64_t nx = sums_x.rows(), ny = sums_y.rows();

    DistanceEstimate est;
    est.rect_class = rect_class;
    est.n_samples = std::min(nx, ny);
    est.se = dkw_se(est.n_samples);

    if (rect_class == RectClass::one_sided) {
        if (p == 1) {
            std::vector<double> vx(static_cast<std::size_t>(nx)), vy(static_cast<std::size_t>(ny));
            for (std::int64_t r = 0; r < nx; ++r) vx[static_cast<std::size_t>(r)] = sums_x(r, 0);
            for (std::int64_t r = 0; r < ny; ++r) vy[static_cast<std::size_t>(r)] = sums_y(r, 0);
            est.value = exact_ks_1d(std::move(vx), std::move(vy));
            est.n_candidates = nx + ny;
            return est;
        }
        std::vector<std::vector<double>> candidates;
        append_stride_rows(sums_x, opts.candidate_budget / 2, candidates);
        append_stride_rows(sums_y, opts.candidate_budget / 2, candidates);
        append_quantile_diagonal(sorted_columns(sums_x, sums_y), opts.quantile_levels, candidates);
        est.n_candidates = static_cast<std::int64_t>(candidates.size());
        est.value = max_over_candidates(
            candidates,
            [&](const std::vector<double>& r) { return std::abs(ecdf_at(sums_x, r) - ecdf_at(sums_y, r)); },
            opts.threads);
        return est;
    }

    if (p > 8) throw TwoSidedDimTooLarge("two_sided class supports p <= 8");
    const int L = opts.two_sided_levels;
    const auto cols = sorted_columns(sums_x, sums_y);
    // Level 0 is -inf, level L+1 is +inf; candidate boxes take rank-level
    // pairs applied across all coordinates.
    std::vector<std::vector<double>> levels(static_cast<std::size_t>(L));
    for (int l = 1; l <= L; ++l) {
        std::vector<double> corner(static_cast<std::size_t>(p));
        const double prob = static_cast<double>(l) / (L + 1.0);
        for (int c = 0; c < p; ++c) {
            const auto& col = cols[static_cast<std::size_t>(c)];
            std::int64_t k = static_cast<std::int64_t>(std::ceil(prob * static_cast<double>(col.size())));
            k = std::clamp<std::int64_t>(k, 1, static_cast<std::int64_t>(col.size()));
            corner[static_cast<std::size_t>(c)] = col[static_cast<std::size_t>(k - 1)];
        }
        levels[static_cast<std::size_t>(l - 1)] = std::move(corner);
    }

    auto box_mass = [p](const Eigen::MatrixXd& cloud, const std::vector<double>* lo, const std::vector<double>* hi) {
        std::int64_t count = 0;
        for (Eigen::Index r = 0; r < cloud.rows(); ++r) {
            bool inside = true;
            for (int c = 0; c < p && inside; ++c) {
                const double v = cloud(r, c);
                if (lo && v < (*lo)[static_cast<std::size_t>(c)]) inside = false;
                if (hi && v > (*hi)[static_cast<std::size_t>(c)]) inside = false;
            }
            if (inside) ++count;
        }
        return static_cast<double>(count) / static_cast<double>(cloud.rows());
    };

    double best = 0.0;
    std::int64_t n_cand = 0;
    for (int a = 0; a <= L; ++a)
        for (int b = a + 1; b <= L + 1; ++b) {
            const std::vector<double>* lo = a == 0 ? nullptr : &levels[static_cast<std::size_t>(a - 1)];
            const std::vector<double>* hi = b == L + 1 ? nullptr : &levels[static_cast<std::size_t>(b - 1)];
            best = std::max(best, std::abs(box_mass(sums_x, lo, hi) - box_mass(sums_y, lo, hi)));
            ++n_cand;
        }
    est.value = best;
    est.n_candidates = n_cand;
    return est;
}

DistanceEstimate mu_hat(const SampleBatch& batch_x, const SampleBatch& batch_y, RectClass rect_class,
                        const DistanceOptions& opts) {
    if (batch_x.p != batch_y.p) throw ShapeMismatch("batches must share p");
    const Eigen::MatrixXd sx = batch_total_sums(batch_x, opts.normalize);
    const Eigen::MatrixXd sy = batch_total_sums(batch_y, opts.normalize);
    return mu_hat_sums(sx, sy, rect_class, opts);
}

void DiscreteLaw::validate() const {
    if (atoms.empty() || atoms.size() != probs.size()) throw BadParameter("atoms and probs must be nonempty and match");
    const std::size_t p = atoms.front().size();
    double total = 0.0;
    for (std::size_t i = 0; i < atoms.size(); ++i) {
        if (atoms[i].size() != p) throw DimMismatch("atom dimension mismatch");
        if (probs[i] < 0.0) throw BadParameter("probabilities must be nonnegative");
        total += probs[i];
    }
    if (std::abs(total - 1.0) > 1e-12) throw BadParameter("probabilities must sum to 1");
}

double mu_exact(const DiscreteLaw& law, const std::vector<double>& gauss_mean, const std::vector<double>& gauss_sd) {
    law.validate();
    const int p = law.dim();
    if (p > 2) throw DimTooLarge("mu_exact supports p <= 2");
    if (static_cast<int>(gauss_mean.size()) != p || static_cast<int>(gauss_sd.size()) != p)
        throw DimMismatch("gaussian parameter dimension mismatch");
    for (double s : gauss_sd)
        if (!(s > 0.0)) throw BadParameter("gaussian sd must be > 0");

    // Candidate corner coordinates: atom coordinates and their left limits.
    std::vector<std::vector<double>> cand(static_cast<std::size_t>(p));
    for (int k = 0; k < p; ++k) {
        for (const auto& a : law.atoms) {
            cand[static_cast<std::size_t>(k)].push_back(a[static_cast<std::size_t>(k)]);
            cand[static_cast<std::size_t>(k)].push_back(a[static_cast<std::size_t>(k)] - 1e-9);
        }
        auto& v = cand[static_cast<std::size_t>(k)];
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
    }

    auto discrete_cdf = [&](const std::vector<double>& r) {
        double mass = 0.0;
        for (std::size_t i = 0; i < law.atoms.size(); ++i) {
            bool below = true;
            for (int k = 0; k < p; ++k)
                if (law.atoms[i][static_cast<std::size_t>(k)] > r[static_cast<std::size_t>(k)]) {
                    below = false;
                    break;
                }
            if (below) mass += law.probs[i];
        }
        return mass;
    };
    auto gauss_cdf = [&](const std::vector<double>& r) {
        double prod = 1.0;
        for (int k = 0; k < p; ++k)
            prod *= normal_cdf((r[static_cast<std::size_t>(k)] - gauss_mean[static_cast<std::size_t>(k)]) /
                               gauss_sd[static_cast<std::size_t>(k)]);
        return prod;
    };

    double best = 0.0;
    std::vector<double> r(static_cast<std::size_t>(p));
    if (p == 1) {
        for (double c0 : cand[0]) {
            r[0] = c0;
            best = std::max(best, std::abs(discrete_cdf(r) - gauss_cdf(r)));
        }
    } else {
        for (double c0 : cand[0])
            for (double c1 : cand[1]) {
                r[0] = c0;
                r[1] = c1;
                best = std::max(best, std::abs(discrete_cdf(r) - gauss_cdf(r)));
            }
    }
    return best;
}

namespace {

struct AnnulusScan {
    double sup = 0.0;
    std::int64_t n_candidates = 0;
};

AnnulusScan annulus_sup(const Eigen::MatrixXd& cloud, double delta, int budget, int grid_points, int threads) {
    std::vector<std::vector<double>> candidates;
    append_stride_rows(cloud, budget, candidates);
    {
        const int p = static_cast<int>(cloud.cols());
        std::vector<std::vector<double>> cols(static_cast<std::size_t>(p));
        for (int c = 0; c < p; ++c) {
            auto& col = cols[static_cast<std::size_t>(c)];
            col.reserve(static_cast<std::size_t>(cloud.rows()));
            for (Eigen::Index r = 0; r < cloud.rows(); ++r) col.push_back(cloud(r, c));
            std::sort(col.begin(), col.end());
        }
        append_quantile_diagonal(cols, grid_points, candidates);
    }

    AnnulusScan scan;
    scan.n_candidates = static_cast<std::int64_t>(candidates.size());
    const int p = static_cast<int>(cloud.cols());
    scan.sup = max_over_candidates(
        candidates,
        [&](const std::vector<double>& r) {
            std::int64_t hits = 0;
            for (Eigen::Index i = 0; i < cloud.rows(); ++i) {
                bool below_outer = true, below_inner = true;
                for (int c = 0; c < p; ++c) {
                    const double v = cloud(i, c);
                    const double rc = r[static_cast<std::size_t>(c)];
                    if (v > rc + delta) {
                        below_outer = false;
                        break;
                    }
                    if (v > rc - delta) below_inner = false;
                }
                if (below_outer && !below_inner) ++hits;
            }
            return static_cast<double>(hits) / static_cast<double>(cloud.rows());
        },
        threads);
    return scan;
}

}  // namespace

DistanceEstimate kappa_hat_sums(const Eigen::MatrixXd& sums, double delta, const KappaOptions& opts) {
    if (delta < 0.0) throw BadParameter("delta must be >= 0");
    const AnnulusScan scan = annulus_sup(sums, delta, opts.candidate_budget, opts.grid_points, opts.threads);
    DistanceEstimate est;
    est.rect_class = RectClass::one_sided;
    est.value = scan.sup;
    est.n_samples = sums.rows();
    est.n_candidates = scan.n_candidates;
    est.se = std::sqrt(std::max(est.value * (1.0 - est.value), 0.0) / static_cast<double>(sums.rows()));
    return est;
}

DistanceEstimate kappa_hat(const SampleBatch& batch, const IntervalSet& I, double delta, bool conditional,
                           const CovarianceModel* cov, std::uint64_t seed, const KappaOptions& opts) {
    if (delta < 0.0) throw BadParameter("delta must be >= 0");
    DistanceEstimate est;
    est.rect_class = RectClass::one_sided;

    if (!conditional) {
        const Eigen::MatrixXd sums = batch_interval_sums(batch, I);
        const AnnulusScan scan = annulus_sup(sums, delta, opts.candidate_budget, opts.grid_points, opts.threads);
        est.value = scan.sup;
        est.n_samples = batch.N;
        est.n_candidates = scan.n_candidates;
        est.se = std::sqrt(std::max(est.value * (1.0 - est.value), 0.0) / static_cast<double>(batch.N));
        return est;
    }

    if (cov == nullptr) throw MissingCovariance("conditional kappa requires a Gaussian covariance model");
    if (batch.n != cov->n || batch.p != cov->p) throw ShapeMismatch("batch and covariance model disagree in (n, p)");
    const int p = cov->p;
    const SymMatrix joint = expand_dense(*cov, opts.dense_cap);
    const ConditionalModel model = conditional_sum_model(joint, cov->n, p, I);
    const CholFactor cond_factor = cholesky(SymMatrix(model.cond_cov));
    const int comp_dim = static_cast<int>(model.var_comp.rows());
    const bool vacuous = comp_dim == 0;
    CholFactor comp_factor;
    if (!vacuous) comp_factor = cholesky(SymMatrix(model.var_comp));

    const int draws = vacuous ? 1 : opts.cond_draws;
    const PhiloxKey cond_key = derive_key(seed, Stream::conditioning);
    const PhiloxKey cloud_key = derive_key(seed, Stream::conditional_cloud);

    std::vector<double> sups(static_cast<std::size_t>(draws), 0.0);
    std::int64_t n_cand = 0;
    for (int d = 0; d < draws; ++d) {
        Eigen::VectorXd mean_c = Eigen::VectorXd::Zero(p);
        if (!vacuous) {
            Eigen::VectorXd z(comp_dim);
            for (int j = 0; j < comp_dim; ++j)
                z(j) = normal_draw(cond_key, static_cast<std::uint32_t>(d), static_cast<std::uint32_t>(j), 0);
            mean_c = model.regression * (comp_factor.lower * z);
        }
        Eigen::MatrixXd cloud(opts.cond_cloud, p);
        Eigen::VectorXd zp(p);
        for (int i = 0; i < opts.cond_cloud; ++i) {
            for (int c = 0; c < p; ++c)
                zp(c) = normal_draw(cloud_key, static_cast<std::uint32_t>(d), static_cast<std::uint32_t>(i),
                                    static_cast<std::uint32_t>(c));
            cloud.row(i) = (mean_c + cond_factor.lower * zp).transpose();
        }
        const AnnulusScan scan = annulus_sup(cloud, delta, opts.candidate_budget, opts.grid_points, opts.threads);
        sups[static_cast<std::size_t>(d)] = scan.sup;
        n_cand = scan.n_candidates;
    }

    double mean = 0.0;
    for (double s : sups) mean += s;
    mean /= draws;
    double var = 0.0;
    for (double s : sups) var += (s - mean) * (s - mean);
    var = draws > 1 ? var / (draws - 1) : 0.0;

    est.value = mean;
    est.n_samples = static_cast<std::int64_t>(draws) * opts.cond_cloud;
    est.n_candidates = n_cand;
    est.se = std::sqrt(var / draws) + std::sqrt(std::max(mean * (1.0 - mean), 0.0) / opts.cond_cloud);
    return est;
}

std::vector<KappaComparison> kappa_monotonicity_suite(const SampleBatch& batch, const std::vector<KappaPair>& pairs,
                                                      bool conditional, const CovarianceModel* cov,
                                                      std::uint64_t seed, const KappaOptions& opts) {
    std::vector<KappaComparison> out;
    out.reserve(pairs.size());
    for (const auto& pr : pairs) {
        if (!pr.inner.subset_of(pr.outer, batch.n) || pr.delta_inner < pr.delta_outer)
            throw BadNesting("need inner ⊂ outer and delta' >= delta");
        const DistanceEstimate lhs = kappa_hat(batch, pr.outer, pr.delta_outer, conditional, cov, seed, opts);
        const DistanceEstimate rhs = kappa_hat(batch, pr.inner, pr.delta_inner, conditional, cov, seed + 1, opts);
        KappaComparison cmp;
        cmp.lhs = lhs.value;
        cmp.lhs_se = lhs.se;
        cmp.rhs = rhs.value;
        cmp.rhs_se = rhs.se;
        cmp.pass = cmp.lhs <= cmp.rhs + 4.0 * (cmp.lhs_se + cmp.rhs_se);
        out.push_back(cmp);
    }
    return out;
}

}  // namespace rclt
