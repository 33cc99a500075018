#ifndef RCLT_HARNESS_HPP
#define RCLT_HARNESS_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rclt/bounds.hpp"
#include "rclt/distance.hpp"
#include "rclt/process.hpp"

namespace rclt {

// Process template a sweep instantiates per grid cell (m, p). Explicit
// coefficient matrices are only meaningful for singleton (m, p) grids;
// otherwise equal weights A_k = I/sqrt(m+1) are used.
struct ProcessTemplate {
    bool duplication = false;
    bool ring = false;
    Innovation innovation = Innovation::gaussian;
    double student_df = 3.5;
    bool standardize = true;
    std::vector<Eigen::MatrixXd> coeffs;

    ProcessSpec instantiate(int m, int p) const;
};

struct SweepConfig {
    ProcessTemplate process;
    std::vector<int> n_grid;
    std::vector<int> m_grid{1};
    std::vector<int> p_grid{1};
    std::vector<double> q_grid{3.0};
    std::int64_t N = 1000;
    std::uint64_t seed = 1;
    RectClass rect_class = RectClass::one_sided;
    std::vector<BoundFormula> bound_formulas{BoundFormula::thm31_q3, BoundFormula::thm32_q4, BoundFormula::cor_q3,
                                             BoundFormula::cor_q4, BoundFormula::shergin};
    std::string output_path;

    int threads = 0;
    int dense_cap = kDefaultDenseCap;
    int n_fit_cap = 48;            // assumption fitting runs on min(n, cap) indices
    std::int64_t moments_N = 20000;
    bool compute_kappa = false;
    double kappa_delta = 0.1;
    bool record_timing = true;     // off -> wall_time_ms column prints 0 (reproducible files)
    double C = 1.0;

    static SweepConfig from_json_text(const std::string& text);
    static SweepConfig from_json_file(const std::string& path);
    std::string to_json() const;

    void validate() const;
};

struct SweepRow {
    int n = 0, m = 0, p = 0;
    double q = 0.0;
    double mu_hat = 0.0, mu_se = 0.0;
    std::optional<double> kappa_hat;
    std::optional<double> rhs_thm31, rhs_thm32, rhs_cor, rhs_shergin;
    double sigma_min_sq = 0.0, sigma_lower_sq = 0.0;
    std::int64_t wall_time_ms = 0;
    std::string error;  // empty = success; failed cells leave statistics unset

    bool failed() const { return !error.empty(); }
};

std::vector<SweepRow> run_sweep(const SweepConfig& cfg);

enum class SlopeAxis { n, m, n_eff };
SlopeAxis slope_axis_from_string(const std::string& s);

struct SlopeFit {
    double slope = 0.0;
    double stderr_ = 0.0;
};

// OLS of log(mu_hat) on log(axis) over successful rows.
SlopeFit fit_rate_slope(const std::vector<SweepRow>& rows, SlopeAxis axis);

enum class EmitFormat { csv, json };

// Fixed-header CSV (RFC-4180, LF endings, 17-significant-digit floats) or a
// JSON array of row objects.
void emit(const std::vector<SweepRow>& rows, EmitFormat format, const std::string& path);
std::string render_rows(const std::vector<SweepRow>& rows, EmitFormat format);

std::vector<SweepRow> parse_rows_csv(const std::string& path);

}  // namespace rclt

#endif
