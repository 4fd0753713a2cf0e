#include "nystromkit/approx.hpp"

#include <algorithm>

namespace nystromkit {

Matrix LowRankFactorization::reconstruct() const {
    if (rank() == 0) return Matrix::Zero(U_hat.rows(), U_hat.rows());
    return U_hat * sigma_hat.asDiagonal() * U_hat.transpose();
}

LowRankFactorization LowRankFactorization::zero(Eigen::Index n) {
    return LowRankFactorization{Matrix(n, 0), Vector(0), 0.0};
}

LowRankFactorization nystrom_plain(const SpsdMatrix& A, const Matrix& Omega) {
    const Eigen::Index n = A.dim();
    if (Omega.rows() != n) throw ShapeMismatch("sketch row count does not match A");
    if (Omega.cols() < 1 || Omega.cols() > n)
        throw ShapeMismatch("sketch width must be in [1, n]");

    const Matrix Y = A.entries() * Omega;            // n x m
    const Matrix C = 0.5 * (Omega.transpose() * Y + (Omega.transpose() * Y).transpose());

    // C is PSD; truncated inverse square root through its eigendecomposition.
    Eigen::SelfAdjointEigenSolver<Matrix> es(C);
    if (es.info() != Eigen::Success) throw NonConvergence("eigensolver failed on Omega* A Omega");
    const Vector& ev = es.eigenvalues();
    const double cutoff = 1e-12 * std::max(0.0, ev.cwiseAbs().maxCoeff());

    std::vector<Eigen::Index> keep;
    for (Eigen::Index i = 0; i < ev.size(); ++i)
        if (ev(i) > cutoff) keep.push_back(i);
    if (keep.empty()) return LowRankFactorization::zero(n);

    Matrix M(n, static_cast<Eigen::Index>(keep.size()));
    for (std::size_t j = 0; j < keep.size(); ++j)
        M.col(static_cast<Eigen::Index>(j)) =
            (Y * es.eigenvectors().col(keep[j])) / std::sqrt(ev(keep[j]));

    // A_hat = M M^T; SVD of M gives the factored form directly.
    Eigen::JacobiSVD<Matrix> svd(M, Eigen::ComputeThinU);
    LowRankFactorization F;
    F.U_hat = svd.matrixU();
    F.sigma_hat = svd.singularValues().array().square().matrix();
    return F;
}

LowRankFactorization nystrom_stabilized(const SpsdMatrix& A, const Matrix& Omega,
                                        double eps_machine) {
    const Eigen::Index n = A.dim();
    if (Omega.rows() != n) throw ShapeMismatch("sketch row count does not match A");

    const Matrix Q = orth(Omega);
    if (Q.cols() == 0) return LowRankFactorization::zero(n);
    const Matrix Y = A.entries() * Q;
    const double nu = eps_machine * Y.norm();
    const Matrix Y_nu = Y + nu * Q;
    // the orthonormalized sketch is used consistently after line 2
    const Matrix C = Q.transpose() * Y_nu;
    const Matrix R = chol_spd(C);
    const Matrix B = R.transpose()
                         .triangularView<Eigen::Lower>()
                         .solve(Y_nu.transpose())
                         .transpose();
    Eigen::JacobiSVD<Matrix> svd(B, Eigen::ComputeThinU);
    LowRankFactorization F;
    F.U_hat = svd.matrixU();
    F.sigma_hat = (svd.singularValues().array().square() - nu).max(0.0).matrix();
    F.shift_nu = nu;
    return F;
}

RsvdResult randomized_svd(const Matrix& B, const Matrix& Omega) {
    if (Omega.rows() != B.cols()) throw ShapeMismatch("sketch row count does not match B columns");
    RsvdResult out;
    out.Q = orth(B * Omega);
    out.QtB = out.Q.transpose() * B;
    return out;
}

double approx_error(const SpsdMatrix& A, const LowRankFactorization& F, const SchattenNorm& xi) {
    if (F.U_hat.rows() != 0 && F.U_hat.rows() != A.dim())
        throw ShapeMismatch("factorization dimension does not match A");
    SpsdMatrix residual(A.entries() - F.reconstruct());
    return schatten_norm_from_eigenvalues(residual.eig().eigenvalues, xi);
}

double optimal_error(const SpsdMatrix& A, Eigen::Index k, const SchattenNorm& xi) {
    if (k < 0 || k > A.dim()) throw ShapeMismatch("k must be in [0, n]");
    const Vector& ev = A.eig().eigenvalues;
    if (k == A.dim()) return 0.0;
    return schatten_norm_from_eigenvalues(ev.tail(ev.size() - k), xi);
}

}  // namespace nystromkit
