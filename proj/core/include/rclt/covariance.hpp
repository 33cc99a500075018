#ifndef RCLT_COVARIANCE_HPP
#define RCLT_COVARIANCE_HPP

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "rclt/errors.hpp"
#include "rclt/linalg.hpp"

namespace rclt {

// Block covariance of a stacked series (n blocks of size p). Stationary
// processes store one p×p block per lag 0..m (banded, or circulant-banded on
// the ring); irregular processes carry a full dense override instead.
struct CovarianceModel {
    int n = 0;
    int p = 0;
    int m = 0;
    bool ring = false;
    std::vector<Eigen::MatrixXd> lag_blocks;       // lag_blocks[d] = Cov(X_i, X_{i+d})
    std::optional<Eigen::MatrixXd> dense_override; // (n p) × (n p), symmetric

    // Cov(X_i, X_j) for 1-based i, j.
    Eigen::MatrixXd block(int i, int j) const;

    bool stationary() const { return !dense_override.has_value(); }
};

// Default size cap for dense expansion; sweeps may raise it per config.
inline constexpr int kDefaultDenseCap = 4096;

SymMatrix expand_dense(const CovarianceModel& cov, int cap = kDefaultDenseCap);

}  // namespace rclt

#endif
