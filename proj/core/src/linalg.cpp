#include "rclt/linalg.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <cmath>

namespace rclt {

SymMatrix::SymMatrix(Eigen::MatrixXd m) : mat_(std::move(m)) {
    if (mat_.rows() < 1 || mat_.rows() != mat_.cols()) throw DimMismatch("SymMatrix requires a square matrix, dim >= 1");
    // Mirror the lower triangle so symmetry holds exactly.
    for (Eigen::Index i = 0; i < mat_.rows(); ++i)
        for (Eigen::Index j = 0; j < i; ++j) mat_(j, i) = mat_(i, j);
}

SymMatrix SymMatrix::identity(int dim) { return SymMatrix(Eigen::MatrixXd::Identity(dim, dim)); }

CholFactor cholesky(const SymMatrix& m) {
    const double tol = psd_tolerance(m);

    Eigen::LLT<Eigen::MatrixXd> llt(m.matrix());
    if (llt.info() == Eigen::Success) {
        CholFactor f;
        f.lower = llt.matrixL();
        f.rank = m.dim();
        return f;
    }

    // PSD fallback: clamp the spectrum at zero.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m.matrix());
    const Eigen::VectorXd& ev = es.eigenvalues();
    if (ev.minCoeff() < -tol) throw NotPositiveSemiDefinite("matrix has eigenvalue below -1e-10*trace/dim");

    const int d = m.dim();
    Eigen::MatrixXd factor = Eigen::MatrixXd::Zero(d, d);
    int rank = 0;
    for (int j = 0; j < d; ++j) {
        const double lambda = ev(j);
        if (lambda > tol) {
            factor.col(j) = es.eigenvectors().col(j) * std::sqrt(lambda);
            ++rank;
        }
    }
    return CholFactor{std::move(factor), rank};
}

double min_eigenvalue(const SymMatrix& m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m.matrix(), Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

SymMatrix invert(const SymMatrix& m) {
    Eigen::LLT<Eigen::MatrixXd> llt(m.matrix());
    if (llt.info() != Eigen::Success) throw NotPositiveDefinite("invert requires a positive definite matrix");
    Eigen::MatrixXd inv = llt.solve(Eigen::MatrixXd::Identity(m.dim(), m.dim()));
    return SymMatrix(std::move(inv));
}

Eigen::MatrixXd pinv_apply(const Eigen::MatrixXd& sym, const Eigen::MatrixXd& rhs) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);
    const double tol = 1e-10 * std::abs(sym.trace()) / static_cast<double>(sym.rows());
    const Eigen::VectorXd& ev = es.eigenvalues();
    Eigen::VectorXd inv_ev = Eigen::VectorXd::Zero(ev.size());
    for (Eigen::Index j = 0; j < ev.size(); ++j)
        if (ev(j) > tol) inv_ev(j) = 1.0 / ev(j);
    return es.eigenvectors() * inv_ev.asDiagonal() * (es.eigenvectors().transpose() * rhs);
}

namespace {

// Gathers the p-column blocks of the stacked covariance for the given indices.
void check_slicing(const SymMatrix& joint, int n, int p) {
    if (n < 1 || p < 1 || joint.dim() != n * p) throw BadIndexSet("joint covariance dim must equal n*p");
}

}  // namespace

SymMatrix marginal_sum_cov(const SymMatrix& joint, int n, int p, const IntervalSet& I) {
    check_slicing(joint, n, p);
    I.validate(n);
    const auto idx = I.members(n);
    Eigen::MatrixXd var_s = Eigen::MatrixXd::Zero(p, p);
    for (int i : idx)
        for (int j : idx) var_s += joint.matrix().block((i - 1) * p, (j - 1) * p, p, p);
    return SymMatrix(std::move(var_s));
}

ConditionalModel conditional_sum_model(const SymMatrix& joint, int n, int p, const IntervalSet& I) {
    check_slicing(joint, n, p);
    I.validate(n);
    const auto idx = I.members(n);
    const auto comp = I.complement(n);

    ConditionalModel model;
    Eigen::MatrixXd var_s = marginal_sum_cov(joint, n, p, I).matrix();
    if (comp.empty()) {
        model.cond_cov = std::move(var_s);
        model.regression = Eigen::MatrixXd::Zero(p, 0);
        model.var_comp = Eigen::MatrixXd::Zero(0, 0);
        return model;
    }

    const int cdim = static_cast<int>(comp.size()) * p;
    Eigen::MatrixXd cov_sv(p, cdim);   // Cov[S, vec(complement)]
    Eigen::MatrixXd var_v(cdim, cdim); // Var[vec(complement)]

    for (std::size_t a = 0; a < comp.size(); ++a) {
        Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(p, p);
        for (int i : idx) acc += joint.matrix().block((i - 1) * p, (comp[a] - 1) * p, p, p);
        cov_sv.middleCols(static_cast<int>(a) * p, p) = acc;
        for (std::size_t b = 0; b < comp.size(); ++b)
            var_v.block(static_cast<int>(a) * p, static_cast<int>(b) * p, p, p) =
                joint.matrix().block((comp[a] - 1) * p, (comp[b] - 1) * p, p, p);
    }

    Eigen::MatrixXd solved;
    Eigen::LLT<Eigen::MatrixXd> llt(var_v);
    if (llt.info() == Eigen::Success) {
        solved = llt.solve(cov_sv.transpose());
    } else {
        // Singular complement (e.g. duplicated coordinates): Schur complement
        // is still defined on the range; use the clamped pseudo-inverse.
        solved = pinv_apply(var_v, cov_sv.transpose());
    }
    model.cond_cov = var_s - cov_sv * solved;
    model.regression = solved.transpose();
    model.var_comp = std::move(var_v);
    return model;
}

SymMatrix schur_conditional_cov(const SymMatrix& joint, int n, int p, const IntervalSet& I) {
    return SymMatrix(conditional_sum_model(joint, n, p, I).cond_cov);
}

}  // namespace rclt
