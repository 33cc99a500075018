#ifndef RCLT_LINALG_HPP
#define RCLT_LINALG_HPP

#include <Eigen/Dense>
#include <cstdint>

#include "rclt/errors.hpp"
#include "rclt/interval.hpp"

namespace rclt {

// Dense symmetric matrix. The upper triangle is mirrored from the lower on
// construction so entries(a,b) == entries(b,a) holds exactly.
class SymMatrix {
  public:
    SymMatrix() : mat_(1, 1) { mat_(0, 0) = 0.0; }

    explicit SymMatrix(Eigen::MatrixXd m);

    static SymMatrix identity(int dim);

    int dim() const { return static_cast<int>(mat_.rows()); }
    double operator()(int a, int b) const { return mat_(a, b); }
    const Eigen::MatrixXd& matrix() const { return mat_; }
    double trace() const { return mat_.trace(); }

  private:
    Eigen::MatrixXd mat_;
};

// Factor L with L Lᵀ equal to the input. For positive definite inputs this is
// the classical Cholesky factor; for PSD rank-deficient inputs it is the
// clamped eigenfactor V diag(sqrt(max(λ,0))) padded to a square matrix.
struct CholFactor {
    Eigen::MatrixXd lower;
    int rank = 0;

    int dim() const { return static_cast<int>(lower.rows()); }
    Eigen::MatrixXd reconstruct() const { return lower * lower.transpose(); }
};

// PSD clamp threshold: scale free, relative to trace/dim.
inline double psd_tolerance(const SymMatrix& m) {
    return 1e-10 * (m.trace() < 0 ? -m.trace() : m.trace()) / m.dim();
}

CholFactor cholesky(const SymMatrix& m);
double min_eigenvalue(const SymMatrix& m);
SymMatrix invert(const SymMatrix& m);

// Moore-Penrose solve helpers used by the conditional-covariance path when
// the complement covariance is singular (clamp threshold 1e-10 * trace/dim).
Eigen::MatrixXd pinv_apply(const Eigen::MatrixXd& sym, const Eigen::MatrixXd& rhs);

// Covariance of the block sum S = Σ_{i∈I} Y_i conditional on the collection
// {Y_i : i∉I}, for a joint covariance of the stacked series (n blocks of
// size p). Empty complement returns the unconditional Var[S].
SymMatrix schur_conditional_cov(const SymMatrix& joint, int n, int p, const IntervalSet& I);

// Full conditional model for the same slicing: conditional covariance, the
// regression map v ↦ E[S | vec(complement)=v], and Var[vec(complement)].
struct ConditionalModel {
    Eigen::MatrixXd cond_cov;    // p × p
    Eigen::MatrixXd regression;  // p × (|complement| p); empty complement -> 0 cols
    Eigen::MatrixXd var_comp;    // (|complement| p)²
};
ConditionalModel conditional_sum_model(const SymMatrix& joint, int n, int p, const IntervalSet& I);

// Unconditional Var[S] block for the same slicing (exposed for validators).
SymMatrix marginal_sum_cov(const SymMatrix& joint, int n, int p, const IntervalSet& I);

}  // namespace rclt

#endif
