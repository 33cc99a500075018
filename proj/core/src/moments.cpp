#include "rclt/moments.hpp"

#include <cmath>
#include <sstream>

namespace rclt {

MomentSummary combine_moments(const SeriesMomentStats& x_stats, const SeriesMomentStats& y_stats, std::size_t iq) {
    const std::size_t n = x_stats.marginal[iq].size();
    if (y_stats.marginal[iq].size() != n) throw ShapeMismatch("moment stats disagree in n");
    MomentSummary out;
    out.q = x_stats.qs[iq];
    out.N = std::min(x_stats.N, y_stats.N);
    out.per_index_L.resize(n);
    out.per_index_nu.resize(n);
    out.se_L.resize(n);
    out.se_nu.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        out.per_index_L[i] = x_stats.marginal[iq][i] + y_stats.marginal[iq][i];
        out.per_index_nu[i] = x_stats.sup_norm[iq][i] + y_stats.sup_norm[iq][i];
        out.se_L[i] = x_stats.marginal_se[iq][i] + y_stats.marginal_se[iq][i];
        out.se_nu[i] = x_stats.sup_norm_se[iq][i] + y_stats.sup_norm_se[iq][i];
        if (x_stats.top_decile_share[iq][i] > 0.5 || y_stats.top_decile_share[iq][i] > 0.5)
            out.heavy_tail_warning = true;
    }
    return out;
}

MomentSummary estimate_moments(const SampleBatch& batch_x, const SampleBatch& batch_y, double q, int threads) {
    if (batch_x.n != batch_y.n || batch_x.p != batch_y.p) throw ShapeMismatch("batches must share (n, p)");
    if (q < 1.0) throw BadQ("q must be >= 1");
    const std::vector<double> qs = {q};
    const SeriesMomentStats xs = batch_moments(batch_x, qs, threads);
    const SeriesMomentStats ys = batch_moments(batch_y, qs, threads);
    return combine_moments(xs, ys, 0);
}

namespace {

std::pair<double, double> interval_means(const std::vector<double>& a, const std::vector<double>& b,
                                         const IntervalSet& I, int n) {
    const auto idx = I.members(n);
    double sa = 0.0, sb = 0.0;
    for (int i : idx) {
        sa += a[static_cast<std::size_t>(i - 1)];
        sb += b[static_cast<std::size_t>(i - 1)];
    }
    const double card = static_cast<double>(idx.size());
    return {sa / card, sb / card};
}

}  // namespace

std::pair<double, double> averaged(const MomentSummary& summary, const IntervalSet& I) {
    const int n = static_cast<int>(summary.per_index_L.size());
    I.validate(n);
    return interval_means(summary.per_index_L, summary.per_index_nu, I, n);
}

std::pair<double, double> averaged_se(const MomentSummary& summary, const IntervalSet& I) {
    const int n = static_cast<int>(summary.per_index_L.size());
    I.validate(n);
    // Means of the per-index SEs: conservative for positively correlated errors.
    return interval_means(summary.se_L, summary.se_nu, I, n);
}

std::string MomentSummary::to_json() const {
    std::ostringstream os;
    os.precision(17);
    auto arr = [&os](const std::vector<double>& v) {
        os << "[";
        for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
        os << "]";
    };
    os << "{\"q\":" << q << ",\"N\":" << N << ",\"heavy_tail_warning\":" << (heavy_tail_warning ? "true" : "false");
    os << ",\"per_index_L\":";
    arr(per_index_L);
    os << ",\"per_index_nu\":";
    arr(per_index_nu);
    os << ",\"se_L\":";
    arr(se_L);
    os << ",\"se_nu\":";
    arr(se_nu);
    os << "}";
    return os.str();
}

}  // namespace rclt
