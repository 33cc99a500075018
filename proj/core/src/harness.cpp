#include "rclt/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "rclt/assumptions.hpp"
#include "rclt/coupling.hpp"
#include "rclt/moments.hpp"
#include "rclt/numeric.hpp"

namespace rclt {

using nlohmann::json;

ProcessSpec ProcessTemplate::instantiate(int m, int p) const {
    if (duplication) {
        if (m != 1) throw BadParameter("duplication requires m = 1");
        return build_duplication(p);
    }
    if (!coeffs.empty()) {
        if (static_cast<int>(coeffs.size()) != m + 1 || coeffs.front().rows() != p)
            throw BadCoefficients("explicit coefficients do not match the (m, p) cell");
        return build_ma(m, p, coeffs, innovation, student_df, ring, standardize);
    }
    return build_ma_equal(m, p, innovation, student_df, ring, standardize);
}

void SweepConfig::validate() const {
    if (n_grid.empty() || m_grid.empty() || p_grid.empty() || q_grid.empty())
        throw BadParameter("sweep grids must be nonempty");
    if (N < 1000) throw BadParameter("sweep N must be >= 1000");
    for (int n : n_grid)
        for (int m : m_grid)
            if (n < 4 * m) throw BadParameter("every (n, m) cell must satisfy n >= 4m");
}

namespace {

ProcessTemplate template_from_json(const json& j) {
    ProcessTemplate t;
    const std::string kind = j.value("kind", "ma");
    if (kind == "duplication") {
        t.duplication = true;
    } else if (kind == "ring_ma") {
        t.ring = true;
    } else if (kind != "ma" && kind != "heavy_tail_ma") {
        throw BadParameter("unknown process kind: " + kind);
    }
    const std::string innov = j.value("innovation", kind == "heavy_tail_ma" ? "student_t" : "gaussian");
    if (innov == "student_t") {
        t.innovation = Innovation::student_t;
        t.student_df = j.value("df", 3.5);
    } else if (innov != "gaussian") {
        throw BadParameter("unknown innovation: " + innov);
    }
    t.standardize = j.value("standardize", true);
    if (j.contains("coeffs")) {
        for (const auto& mat : j.at("coeffs")) {
            const auto rows = mat.size();
            Eigen::MatrixXd a(rows, rows);
            for (std::size_t r = 0; r < rows; ++r)
                for (std::size_t c = 0; c < rows; ++c) a(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = mat.at(r).at(c).get<double>();
            t.coeffs.push_back(std::move(a));
        }
    }
    return t;
}

json template_to_json(const ProcessTemplate& t) {
    json j;
    j["kind"] = t.duplication ? "duplication"
                : t.ring      ? "ring_ma"
                : t.innovation == Innovation::student_t ? "heavy_tail_ma"
                                                        : "ma";
    j["innovation"] = t.innovation == Innovation::student_t ? "student_t" : "gaussian";
    if (t.innovation == Innovation::student_t) j["df"] = t.student_df;
    j["standardize"] = t.standardize;
    if (!t.coeffs.empty()) {
        json mats = json::array();
        for (const auto& a : t.coeffs) {
            json mat = json::array();
            for (Eigen::Index r = 0; r < a.rows(); ++r) {
                json row = json::array();
                for (Eigen::Index c = 0; c < a.cols(); ++c) row.push_back(a(r, c));
                mat.push_back(row);
            }
            mats.push_back(mat);
        }
        j["coeffs"] = mats;
    }
    return j;
}

}  // namespace

SweepConfig SweepConfig::from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw BadParameter(std::string("config parse error: ") + e.what());
    }
    SweepConfig cfg;
    try {
        if (j.contains("process")) cfg.process = template_from_json(j.at("process"));
        const auto& grid = j.at("grid");
        cfg.n_grid = grid.at("n").get<std::vector<int>>();
        if (grid.contains("m")) cfg.m_grid = grid.at("m").get<std::vector<int>>();
        if (grid.contains("p")) cfg.p_grid = grid.at("p").get<std::vector<int>>();
        if (grid.contains("q")) cfg.q_grid = grid.at("q").get<std::vector<double>>();
        cfg.N = j.value("N", cfg.N);
        cfg.seed = j.value("seed", cfg.seed);
        if (j.contains("rect_class"))
            cfg.rect_class = j.at("rect_class").get<std::string>() == "two_sided" ? RectClass::two_sided
                                                                                  : RectClass::one_sided;
        if (j.contains("bound_formulas")) {
            cfg.bound_formulas.clear();
            for (const auto& f : j.at("bound_formulas")) cfg.bound_formulas.push_back(bound_formula_from_string(f.get<std::string>()));
        }
        cfg.output_path = j.value("output_path", cfg.output_path);
        cfg.threads = j.value("threads", cfg.threads);
        cfg.dense_cap = j.value("dense_cap", cfg.dense_cap);
        cfg.n_fit_cap = j.value("n_fit_cap", cfg.n_fit_cap);
        cfg.moments_N = j.value("moments_N", cfg.moments_N);
        cfg.compute_kappa = j.value("compute_kappa", cfg.compute_kappa);
        cfg.kappa_delta = j.value("kappa_delta", cfg.kappa_delta);
        cfg.record_timing = j.value("record_timing", cfg.record_timing);
        cfg.C = j.value("C", cfg.C);
    } catch (const json::exception& e) {
        throw BadParameter(std::string("config field error: ") + e.what());
    }
    cfg.validate();
    return cfg;
}

SweepConfig SweepConfig::from_json_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw IoError("cannot open config: " + path);
    std::ostringstream buf;
    buf << is.rdbuf();
    return from_json_text(buf.str());
}

std::string SweepConfig::to_json() const {
    json j;
    j["process"] = template_to_json(process);
    j["grid"] = {{"n", n_grid}, {"m", m_grid}, {"p", p_grid}, {"q", q_grid}};
    j["N"] = N;
    j["seed"] = seed;
    j["rect_class"] = rect_class == RectClass::two_sided ? "two_sided" : "one_sided";
    json formulas = json::array();
    for (auto f : bound_formulas) formulas.push_back(to_string(f));
    j["bound_formulas"] = formulas;
    j["output_path"] = output_path;
    j["threads"] = threads;
    j["dense_cap"] = dense_cap;
    j["n_fit_cap"] = n_fit_cap;
    j["moments_N"] = moments_N;
    j["compute_kappa"] = compute_kappa;
    j["kappa_delta"] = kappa_delta;
    j["record_timing"] = record_timing;
    j["C"] = C;
    return j.dump(2);
}

namespace {

struct Cell {
    int n, m, p;
    double q;
    std::size_t index;
};

bool wants(const SweepConfig& cfg, BoundFormula f) {
    return std::find(cfg.bound_formulas.begin(), cfg.bound_formulas.end(), f) != cfg.bound_formulas.end();
}

SweepRow run_cell(const SweepConfig& cfg, const Cell& cell) {
    SweepRow row;
    row.n = cell.n;
    row.m = cell.m;
    row.p = cell.p;
    row.q = cell.q;

    const auto t0 = std::chrono::steady_clock::now();
    const std::uint64_t cell_seed = detail::splitmix64(cfg.seed ^ (0x9E3779B97f4A7C15ull * (cell.index + 1)));

    try {
        const ProcessSpec spec = cfg.process.instantiate(cell.m, cell.p);
        const CovarianceModel cov = implied_covariance(spec, cell.n);

        // Assumption constants from a capped-length model of the same process:
        // interval scans are O(n^2) Schur solves and the fitted constants of a
        // stationary model stabilize quickly in n.
        int n_fit = std::min(cell.n, std::max(cfg.n_fit_cap, 2 * cell.m + 2));
        if (spec.kind == ProcessKind::duplication && n_fit % 2 != 0) --n_fit;
        const CovarianceModel cov_fit = implied_covariance(spec, n_fit);
        const AssumptionReport report = validate_assumptions(cov_fit, cfg.dense_cap, cfg.threads);
        row.sigma_min_sq = report.sigma_min_sq;
        row.sigma_lower_sq = report.sigma_lower_sq;

        // Moments at the requested q plus 3 and 4 for the theorem brackets.
        std::vector<double> qs{3.0, 4.0};
        if (std::find(qs.begin(), qs.end(), cell.q) == qs.end()) qs.push_back(cell.q);
        const std::int64_t n_mom = std::min(cfg.N, cfg.moments_N);
        const SeriesMomentStats xm = series_moments(spec, cell.n, n_mom, cell_seed, qs, cfg.threads);
        const SeriesMomentStats ym = marginal_moments(cov, n_mom, cell_seed, qs, cfg.threads);
        const IntervalSet full = IntervalSet::range(1, cell.n);
        auto avg_at = [&](double qv) {
            const std::size_t iq = static_cast<std::size_t>(std::find(qs.begin(), qs.end(), qv) - qs.begin());
            const MomentSummary summary = combine_moments(xm, ym, iq);
            return averaged(summary, full);
        };
        const auto [L3, nu3] = avg_at(3.0);
        const auto [L4, nu4] = avg_at(4.0);
        const auto [Lq, nuq] = avg_at(cell.q);
        (void)nu3;
        (void)nu4;

        // Sample the process and its coupled Gaussian, sums only.
        const Eigen::MatrixXd sums_x = sample_sums(spec, cell.n, cfg.N, cell_seed, cfg.threads);
        const SumCoupler coupler(cov, cfg.dense_cap);
        const Eigen::MatrixXd sums_y = coupler.sample_sums(cfg.N, cell_seed, cfg.threads);

        const double scale = 1.0 / std::sqrt(static_cast<double>(cell.n));
        DistanceOptions opts;
        opts.threads = cfg.threads;
        const DistanceEstimate mu = mu_hat_sums(sums_x * scale, sums_y * scale, cfg.rect_class, opts);
        row.mu_hat = mu.value;
        row.mu_se = mu.se;

        if (cfg.compute_kappa) {
            KappaOptions kopts;
            kopts.threads = cfg.threads;
            row.kappa_hat = kappa_hat_sums(sums_x, cfg.kappa_delta, kopts).value;
        }

        BoundInputs b;
        b.n = cell.n;
        b.p = cell.p;
        b.m = cell.m;
        b.q = cell.q;
        b.sigma_min = std::sqrt(std::max(report.sigma_min_sq, 0.0));
        b.sigma_lower = std::sqrt(std::max(report.sigma_lower_sq, 0.0));
        b.Lbar3 = L3;
        b.Lbar4 = L4;
        b.nubar_q = nuq;
        b.Lbar_q = Lq;
        b.C = cfg.C;
        auto try_eval = [&](BoundFormula f) -> std::optional<double> {
            if (!wants(cfg, f)) return std::nullopt;
            try {
                return evaluate_bound(f, b).rhs;
            } catch (const UsageError&) {
                return std::nullopt;  // e.g. q < 4 for the fourth-moment bound
            }
        };
        row.rhs_thm31 = try_eval(BoundFormula::thm31_q3);
        row.rhs_thm32 = try_eval(BoundFormula::thm32_q4);
        row.rhs_cor = cell.q >= 4.0 ? try_eval(BoundFormula::cor_q4) : try_eval(BoundFormula::cor_q3);
        row.rhs_shergin = try_eval(BoundFormula::shergin);
    } catch (const std::exception& e) {
        row.error = e.what();
    }

    if (cfg.record_timing) {
        const auto t1 = std::chrono::steady_clock::now();
        row.wall_time_ms = std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0).count();
    }
    return row;
}

}  // namespace

std::vector<SweepRow> run_sweep(const SweepConfig& cfg) {
    cfg.validate();
    std::vector<Cell> cells;
    for (int n : cfg.n_grid)
        for (int m : cfg.m_grid)
            for (int p : cfg.p_grid)
                for (double q : cfg.q_grid) cells.push_back(Cell{n, m, p, q, cells.size()});

    std::vector<SweepRow> rows(cells.size());
    // Cells run in grid order; inner operations are threaded. Per-cell seeds
    // are keyed by (seed, cell index), so the rows are reproducible however
    // the work is scheduled.
    for (const Cell& cell : cells) rows[cell.index] = run_cell(cfg, cell);
    return rows;
}

SlopeAxis slope_axis_from_string(const std::string& s) {
    if (s == "n") return SlopeAxis::n;
    if (s == "m") return SlopeAxis::m;
    if (s == "n_eff") return SlopeAxis::n_eff;
    throw BadParameter("unknown slope axis: " + s);
}

SlopeFit fit_rate_slope(const std::vector<SweepRow>& rows, SlopeAxis axis) {
    std::vector<double> xs, ys;
    for (const auto& r : rows) {
        if (r.failed()) continue;
        if (!(r.mu_hat > 0.0)) throw DegenerateDesign("fit_rate_slope requires mu_hat > 0");
        double x = 0.0;
        switch (axis) {
            case SlopeAxis::n: x = static_cast<double>(r.n); break;
            case SlopeAxis::m: x = static_cast<double>(r.m); break;
            case SlopeAxis::n_eff: x = static_cast<double>(r.n) / static_cast<double>(r.m); break;
        }
        xs.push_back(std::log(x));
        ys.push_back(std::log(r.mu_hat));
    }
    const std::size_t k = xs.size();
    if (k < 3) throw DegenerateDesign("need at least 3 rows");
    double xbar = 0.0, ybar = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        xbar += xs[i];
        ybar += ys[i];
    }
    xbar /= static_cast<double>(k);
    ybar /= static_cast<double>(k);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        sxx += (xs[i] - xbar) * (xs[i] - xbar);
        sxy += (xs[i] - xbar) * (ys[i] - ybar);
    }
    if (sxx <= 0.0) throw DegenerateDesign("axis values do not vary");
    SlopeFit fit;
    fit.slope = sxy / sxx;
    double rss = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        const double e = ys[i] - ybar - fit.slope * (xs[i] - xbar);
        rss += e * e;
    }
    const double s2 = rss / static_cast<double>(k - 2);
    fit.stderr_ = std::sqrt(s2 / sxx);
    return fit;
}

namespace {

std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string opt_field(const std::optional<double>& v) { return v ? fmt17(*v) : std::string(); }

}  // namespace

std::string render_rows(const std::vector<SweepRow>& rows, EmitFormat format) {
    if (format == EmitFormat::csv) {
        std::ostringstream os;
        os << "n,m,p,q,mu_hat,mu_se,kappa_hat,rhs_thm31,rhs_thm32,rhs_cor,rhs_shergin,"
              "sigma_min_sq,sigma_lower_sq,wall_time_ms\n";
        for (const auto& r : rows) {
            os << r.n << ',' << r.m << ',' << r.p << ',' << fmt17(r.q) << ',';
            if (r.failed()) {
                os << ",,,,,,,,," << r.wall_time_ms << '\n';
                continue;
            }
            os << fmt17(r.mu_hat) << ',' << fmt17(r.mu_se) << ',' << opt_field(r.kappa_hat) << ','
               << opt_field(r.rhs_thm31) << ',' << opt_field(r.rhs_thm32) << ',' << opt_field(r.rhs_cor) << ','
               << opt_field(r.rhs_shergin) << ',' << fmt17(r.sigma_min_sq) << ',' << fmt17(r.sigma_lower_sq) << ','
               << r.wall_time_ms << '\n';
        }
        return os.str();
    }

    json arr = json::array();
    for (const auto& r : rows) {
        json j;
        j["n"] = r.n;
        j["m"] = r.m;
        j["p"] = r.p;
        j["q"] = r.q;
        if (r.failed()) {
            j["error"] = r.error;
        } else {
            j["mu_hat"] = r.mu_hat;
            j["mu_se"] = r.mu_se;
            if (r.kappa_hat) j["kappa_hat"] = *r.kappa_hat;
            if (r.rhs_thm31) j["rhs_thm31"] = *r.rhs_thm31;
            if (r.rhs_thm32) j["rhs_thm32"] = *r.rhs_thm32;
            if (r.rhs_cor) j["rhs_cor"] = *r.rhs_cor;
            if (r.rhs_shergin) j["rhs_shergin"] = *r.rhs_shergin;
            j["sigma_min_sq"] = r.sigma_min_sq;
            j["sigma_lower_sq"] = r.sigma_lower_sq;
        }
        j["wall_time_ms"] = r.wall_time_ms;
        arr.push_back(j);
    }
    return arr.dump(2) + "\n";
}

void emit(const std::vector<SweepRow>& rows, EmitFormat format, const std::string& path) {
    std::ofstream os(path, std::ios::binary);  // binary keeps LF endings everywhere
    if (!os) throw IoError("cannot open for writing: " + path);
    os << render_rows(rows, format);
    if (!os) throw IoError("write failed: " + path);
}

std::vector<SweepRow> parse_rows_csv(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw IoError("cannot open for reading: " + path);
    std::string line;
    if (!std::getline(is, line)) throw IoError("empty csv: " + path);
    std::vector<SweepRow> rows;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::string cur;
        for (char ch : line) {
            if (ch == ',') {
                fields.push_back(cur);
                cur.clear();
            } else if (ch != '\r') {
                cur.push_back(ch);
            }
        }
        fields.push_back(cur);
        if (fields.size() != 14) throw IoError("bad csv row: " + line);
        SweepRow r;
        r.n = std::stoi(fields[0]);
        r.m = std::stoi(fields[1]);
        r.p = std::stoi(fields[2]);
        r.q = std::stod(fields[3]);
        if (fields[4].empty()) {
            r.error = "failed";
        } else {
            r.mu_hat = std::stod(fields[4]);
            r.mu_se = std::stod(fields[5]);
            if (!fields[6].empty()) r.kappa_hat = std::stod(fields[6]);
            if (!fields[7].empty()) r.rhs_thm31 = std::stod(fields[7]);
            if (!fields[8].empty()) r.rhs_thm32 = std::stod(fields[8]);
            if (!fields[9].empty()) r.rhs_cor = std::stod(fields[9]);
            if (!fields[10].empty()) r.rhs_shergin = std::stod(fields[10]);
            r.sigma_min_sq = std::stod(fields[11]);
            r.sigma_lower_sq = std::stod(fields[12]);
        }
        r.wall_time_ms = std::stoll(fields[13]);
        rows.push_back(std::move(r));
    }
    return rows;
}

}  // namespace rclt
