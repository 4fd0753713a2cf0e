#include "nystromkit/linalg.hpp"

#include <algorithm>
#include <cmath>

namespace nystromkit {

SpsdMatrix::SpsdMatrix(Matrix entries) : cache_(std::make_shared<EigCache>()) {
    if (entries.rows() != entries.cols())
        throw ShapeMismatch("SpsdMatrix requires a square matrix");
    if (entries.rows() > kMaxDim)
        throw ShapeMismatch("matrix dimension exceeds " + std::to_string(kMaxDim));
    if (!entries.allFinite())
        throw ShapeMismatch("SpsdMatrix requires finite entries");
    entries_ = 0.5 * (entries + entries.transpose()).eval();
}

const EigenDecomposition& SpsdMatrix::eig() const {
    std::call_once(cache_->once, [this] {
        Eigen::SelfAdjointEigenSolver<Matrix> solver(entries_);
        if (solver.info() != Eigen::Success)
            throw NonConvergence("symmetric eigensolver failed to converge");
        const Eigen::Index n = entries_.rows();
        EigenDecomposition d;
        d.eigenvalues = solver.eigenvalues().reverse();
        d.eigenvectors = solver.eigenvectors().rowwise().reverse();
        cache_->value = std::move(d);
        (void)n;
    });
    return cache_->value;
}

SchattenNorm SchattenNorm::schatten(double s) {
    if (!(s >= 1.0)) throw ShapeMismatch("Schatten norm requires s >= 1");
    return SchattenNorm(s);
}

double SchattenNorm::from_singular_values(const Vector& sv) const {
    if (sv.size() == 0) return 0.0;
    if (is_operator()) return sv.cwiseAbs().maxCoeff();
    if (is_frobenius()) return sv.norm();
    if (is_nuclear()) return sv.cwiseAbs().sum();
    return std::pow(sv.cwiseAbs().array().pow(s_).sum(), 1.0 / s_);
}

EigenDecomposition eig_sym(const SpsdMatrix& A) { return A.eig(); }

double schatten_norm(const Matrix& M, const SchattenNorm& xi) {
    if (!M.allFinite()) throw ShapeMismatch("schatten_norm requires finite entries");
    if (xi.is_frobenius()) return M.norm();
    if (M.rows() == 0 || M.cols() == 0) return 0.0;
    Eigen::JacobiSVD<Matrix> svd(M);
    return xi.from_singular_values(svd.singularValues());
}

double schatten_norm_from_eigenvalues(const Vector& eigenvalues, const SchattenNorm& xi) {
    return xi.from_singular_values(eigenvalues);
}

SpsdMatrix psd_sqrt(const SpsdMatrix& A) {
    const EigenDecomposition& d = A.eig();
    const double opnorm = d.eigenvalues.size() > 0 ? d.eigenvalues.cwiseAbs().maxCoeff() : 0.0;
    if (d.eigenvalues.size() > 0 && d.eigenvalues.minCoeff() < -kPsdAtol * opnorm)
        throw NotPsd("matrix is not PSD within tolerance");
    Vector sqrt_vals = d.eigenvalues.cwiseMax(0.0).cwiseSqrt();
    return SpsdMatrix(d.eigenvectors * sqrt_vals.asDiagonal() * d.eigenvectors.transpose());
}

Matrix chol_spd(const Matrix& A) {
    if (A.rows() != A.cols()) throw ShapeMismatch("chol_spd requires a square matrix");
    const Matrix S = 0.5 * (A + A.transpose());
    const double base =
        std::numeric_limits<double>::epsilon() * std::abs(S.trace()) / std::max<double>(1, S.rows());
    for (int j = -1; j <= 6; ++j) {
        Matrix shifted = S;
        if (j >= 0) shifted.diagonal().array() += std::pow(10.0, j) * base;
        Eigen::LLT<Matrix> llt(shifted);
        if (llt.info() == Eigen::Success)
            return llt.matrixU();
    }
    throw NotPositiveDefinite("Cholesky failed after jitter escalation");
}

Matrix pinv(const Matrix& M, double rtol) {
    if (!M.allFinite()) throw ShapeMismatch("pinv requires finite entries");
    if (M.rows() == 0 || M.cols() == 0) return Matrix::Zero(M.cols(), M.rows());
    Eigen::JacobiSVD<Matrix> svd(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Vector& sv = svd.singularValues();
    const double cutoff = rtol * sv(0);
    Vector inv = Vector::Zero(sv.size());
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) > cutoff) inv(i) = 1.0 / sv(i);
    return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

Matrix orth(const Matrix& M, double rtol) {
    if (M.rows() == 0 || M.cols() == 0) return Matrix(M.rows(), 0);
    Eigen::ColPivHouseholderQR<Matrix> qr(M);
    qr.setThreshold(rtol);
    const Eigen::Index r = qr.rank();
    if (r == 0) return Matrix(M.rows(), 0);
    Matrix Q = qr.householderQ() * Matrix::Identity(M.rows(), r);
    return Q;
}

}  // namespace nystromkit
