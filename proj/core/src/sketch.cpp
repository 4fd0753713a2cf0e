#include "nystromkit/sketch.hpp"

#include "nystromkit/rng.hpp"

namespace nystromkit {

CovarianceSpec CovarianceSpec::from(SpsdMatrix K) {
    Matrix sqrt_K = psd_sqrt(K).entries();
    return CovarianceSpec{std::move(K), std::move(sqrt_K)};
}

CovarianceSpec CovarianceSpec::identity(Eigen::Index n) {
    return CovarianceSpec{SpsdMatrix(Matrix::Identity(n, n)), Matrix::Identity(n, n)};
}

Matrix draw_sketch(const CovarianceSpec& cov, Eigen::Index cols, std::uint64_t seed) {
    if (cols < 1) throw ShapeMismatch("draw_sketch requires cols >= 1");
    const Eigen::Index n = cov.K.dim();
    return cov.sqrt_K * standard_gaussian(n, cols, seed);
}

PartitionedCovariance partition_covariance(const CovarianceSpec& cov,
                                           const EigenDecomposition& eig_A,
                                           Eigen::Index k) {
    const Eigen::Index n = cov.K.dim();
    if (k < 1 || k >= n) throw ShapeMismatch("partition requires 1 <= k < n");
    if (eig_A.eigenvectors.rows() != n)
        throw ShapeMismatch("eigenbasis dimension does not match covariance");

    const Matrix U1 = eig_A.eigenvectors.leftCols(k);
    const Matrix U2 = eig_A.eigenvectors.rightCols(n - k);
    const Matrix KU1 = cov.K.entries() * U1;
    const Matrix KU2 = cov.K.entries() * U2;

    PartitionedCovariance pc;
    pc.k = k;
    pc.K11 = 0.5 * (U1.transpose() * KU1 + (U1.transpose() * KU1).transpose());
    pc.K21 = U2.transpose() * KU1;
    pc.K22 = 0.5 * (U2.transpose() * KU2 + (U2.transpose() * KU2).transpose());

    Eigen::SelfAdjointEigenSolver<Matrix> es(pc.K11);
    if (es.info() != Eigen::Success) throw NonConvergence("eigensolver failed on K11");
    const double max_ev = es.eigenvalues().cwiseAbs().maxCoeff();
    const double min_ev = es.eigenvalues().minCoeff();
    if (!(min_ev > 1e-12 * max_ev))
        throw SingularK11("K11 is singular: covariance has no energy in the leading eigenspace");

    pc.K11_inv = es.eigenvectors() * es.eigenvalues().cwiseInverse().asDiagonal() *
                 es.eigenvectors().transpose();
    pc.K11_inv = 0.5 * (pc.K11_inv + pc.K11_inv.transpose()).eval();
    pc.inv_K11_opnorm = 1.0 / min_ev;

    Matrix schur = pc.K22 - pc.K21 * pc.K11_inv * pc.K21.transpose();
    // clamp round-off negative eigenvalues of the Schur complement at zero
    SpsdMatrix schur_psd(std::move(schur));
    const EigenDecomposition& sd = schur_psd.eig();
    pc.K22_1 = sd.eigenvectors * sd.eigenvalues.cwiseMax(0.0).asDiagonal() *
               sd.eigenvectors.transpose();
    pc.K22_1 = 0.5 * (pc.K22_1 + pc.K22_1.transpose()).eval();
    return pc;
}

SketchDraw split_sketch(const EigenDecomposition& eig_A, Matrix Omega, Eigen::Index k,
                        std::uint64_t seed) {
    const Eigen::Index n = eig_A.eigenvectors.rows();
    if (Omega.rows() != n) throw ShapeMismatch("sketch row count does not match eigenbasis");
    SketchDraw d;
    d.Omega1 = eig_A.eigenvectors.leftCols(k).transpose() * Omega;
    d.Omega2 = eig_A.eigenvectors.rightCols(n - k).transpose() * Omega;
    d.Omega = std::move(Omega);
    d.seed = seed;
    return d;
}

ConditionalDrawParams conditional_draw_params(const PartitionedCovariance& pc,
                                              const Matrix& Omega1) {
    if (Omega1.rows() != pc.k) throw ShapeMismatch("Omega1 has wrong row count");
    ConditionalDrawParams out;
    out.mean = pc.K21 * (pc.K11_inv * Omega1);
    out.cov_sqrt = psd_sqrt(SpsdMatrix(pc.K22_1)).entries();
    return out;
}

}  // namespace nystromkit
