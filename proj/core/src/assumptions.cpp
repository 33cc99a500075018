#include "rclt/assumptions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "rclt/parallel.hpp"

namespace rclt {

std::vector<IntervalSet> enumerate_intervals(int n, bool ring) {
    if (n < 1) throw BadParameter("n must be >= 1");
    std::vector<IntervalSet> out;
    for (int i = 1; i <= n; ++i)
        for (int j = i; j <= n; ++j) out.push_back(IntervalSet::range(i, j));
    if (ring) {
        // Proper wraps [j,n] u [1,i]; j >= i+2 keeps them distinct from the
        // contiguous family and from the full set.
        for (int i = 1; i <= n; ++i)
            for (int j = i + 2; j <= n; ++j) out.push_back(IntervalSet::wrapped(i, j));
    }
    std::stable_sort(out.begin(), out.end(), [n](const IntervalSet& a, const IntervalSet& b) {
        const int ca = a.cardinality(n), cb = b.cardinality(n);
        if (ca != cb) return ca < cb;
        if (a.lo != b.lo) return a.lo < b.lo;
        if (a.hi != b.hi) return a.hi < b.hi;
        return a.wrap < b.wrap;
    });
    return out;
}

double sigma_min_sq_of(const CovarianceModel& cov, const IntervalSet& I) {
    I.validate(cov.n);
    const auto idx = I.members(cov.n);
    Eigen::MatrixXd var_s = Eigen::MatrixXd::Zero(cov.p, cov.p);
    for (int i : idx)
        for (int j : idx) var_s += cov.block(i, j);
    return var_s.diagonal().minCoeff();
}

namespace {

double minvar_denominator(int card, int m) { return static_cast<double>(card) * std::min(m + 1, card); }

double minev_denominator(int card, int m) {
    const int eff = std::max(card - 2 * m, 0);
    return static_cast<double>(eff) * std::min(m + 1, eff);
}

struct MinSlot {
    double value = std::numeric_limits<double>::infinity();
    std::size_t arg = 0;
    bool any = false;

    void offer(double v, std::size_t i) {
        if (!any || v < value) {
            value = v;
            arg = i;
            any = true;
        }
    }
    void merge(const MinSlot& o) {
        if (!o.any) return;
        // Ties resolve to the earlier interval in enumeration order.
        if (!any || o.value < value || (o.value == value && o.arg < arg)) {
            value = o.value;
            arg = o.arg;
            any = true;
        }
    }
};

}  // namespace

std::pair<double, IntervalSet> fit_sigma_min(const CovarianceModel& cov, int m, int threads) {
    const auto intervals = enumerate_intervals(cov.n, cov.ring);
    const std::int64_t count = static_cast<std::int64_t>(intervals.size());
    const std::int64_t bs = std::max<std::int64_t>(1, (count + 63) / 64);
    std::vector<MinSlot> partial(static_cast<std::size_t>(block_count(count, bs)));
    parallel_for_blocks(
        count, bs,
        [&](std::int64_t b, std::int64_t lo, std::int64_t hi) {
            for (std::int64_t k = lo; k < hi; ++k) {
                const auto& I = intervals[static_cast<std::size_t>(k)];
                const double ratio = sigma_min_sq_of(cov, I) / minvar_denominator(I.cardinality(cov.n), m);
                partial[static_cast<std::size_t>(b)].offer(ratio, static_cast<std::size_t>(k));
            }
        },
        threads);
    MinSlot best;
    for (const auto& s : partial) best.merge(s);
    return {best.value, intervals[best.arg]};
}

SigmaLowerFit fit_sigma_lower(const CovarianceModel& cov, int m, int dense_cap, int threads) {
    const auto intervals = enumerate_intervals(cov.n, cov.ring);
    const SymMatrix joint = expand_dense(cov, dense_cap);

    const std::int64_t count = static_cast<std::int64_t>(intervals.size());
    const std::int64_t bs = std::max<std::int64_t>(1, (count + 63) / 64);
    std::vector<MinSlot> partial(static_cast<std::size_t>(block_count(count, bs)));
    std::vector<long> skipped(static_cast<std::size_t>(block_count(count, bs)), 0);
    parallel_for_blocks(
        count, bs,
        [&](std::int64_t b, std::int64_t lo, std::int64_t hi) {
            for (std::int64_t k = lo; k < hi; ++k) {
                const auto& I = intervals[static_cast<std::size_t>(k)];
                const double denom = minev_denominator(I.cardinality(cov.n), m);
                if (denom <= 0.0) {
                    ++skipped[static_cast<std::size_t>(b)];
                    continue;
                }
                const SymMatrix cond = schur_conditional_cov(joint, cov.n, cov.p, I);
                partial[static_cast<std::size_t>(b)].offer(min_eigenvalue(cond) / denom, static_cast<std::size_t>(k));
            }
        },
        threads);

    SigmaLowerFit fit;
    MinSlot best;
    for (const auto& s : partial) best.merge(s);
    for (long s : skipped) fit.skipped += s;
    if (best.any) {
        fit.value = best.value;
        fit.worst = intervals[best.arg];
    }
    return fit;
}

bool check_var_ev(double sigma_min, double sigma_lower, int p) {
    if (sigma_min < 0.0 || sigma_lower < 0.0) throw BadParameter("sigmas must be nonnegative");
    const double e = std::exp(1.0);
    return sigma_min <= sigma_lower * std::sqrt(std::log(4.0 * e * static_cast<double>(p)) / 2.0);
}

AssumptionReport validate_assumptions(const CovarianceModel& cov, int dense_cap, int threads) {
    AssumptionReport rep;
    rep.n = cov.n;
    rep.p = cov.p;
    rep.m = cov.m;

    auto [sm, worst_mv] = fit_sigma_min(cov, cov.m, threads);
    rep.sigma_min_sq = sm;
    rep.worst_minvar = worst_mv;

    const SigmaLowerFit fit = fit_sigma_lower(cov, cov.m, dense_cap, threads);
    rep.sigma_lower_sq = fit.worst ? fit.value : 0.0;
    rep.worst_minev = fit.worst;
    rep.skipped_intervals = fit.skipped;

    rep.var_ev_holds = check_var_ev(std::sqrt(std::max(rep.sigma_min_sq, 0.0)),
                                    std::sqrt(std::max(rep.sigma_lower_sq, 0.0)), cov.p);
    return rep;
}

std::string AssumptionReport::to_json() const {
    std::ostringstream os;
    os.precision(17);
    os << "{\"sigma_min_sq\":" << sigma_min_sq << ",\"sigma_lower_sq\":" << sigma_lower_sq
       << ",\"worst_minvar\":\"" << worst_minvar.to_string() << "\"";
    if (worst_minev)
        os << ",\"worst_minev\":\"" << worst_minev->to_string() << "\"";
    else
        os << ",\"worst_minev\":null";
    os << ",\"var_ev_holds\":" << (var_ev_holds ? "true" : "false") << ",\"n\":" << n << ",\"p\":" << p
       << ",\"m\":" << m << ",\"skipped_intervals\":" << skipped_intervals << "}";
    return os.str();
}

}  // namespace rclt
