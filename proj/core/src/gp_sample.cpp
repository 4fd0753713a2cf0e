#include "nystromkit/gp_sample.hpp"

#include <cmath>

#include "nystromkit/rng.hpp"

namespace nystromkit {

GpSampleBatch sample_gp(const LowRankFactorization& F, Eigen::Index batch,
                        std::uint64_t seed) {
    if (batch < 1) throw ShapeMismatch("batch must be >= 1");
    GpSampleBatch out;
    out.rank_used = F.rank();
    out.seed = seed;
    const Eigen::Index n = F.U_hat.rows();
    if (F.rank() == 0) {
        out.samples = Matrix::Zero(n, batch);
        return out;
    }
    const Matrix Z = standard_gaussian(F.rank(), batch, seed);
    out.samples = F.U_hat * (F.sigma_hat.cwiseMax(0.0).cwiseSqrt().asDiagonal() * Z);
    return out;
}

TraceGap wasserstein_trace_check(const KernelOperator& op, const LowRankFactorization& F) {
    SpsdMatrix residual(op.A.entries() - F.reconstruct());
    const Vector& ev = residual.eig().eigenvalues;
    const double opnorm_A = std::abs(op.A.eig().eigenvalues(0));
    TraceGap out;
    out.residual_psd = ev.size() == 0 || ev.minCoeff() >= -1e-8 * opnorm_A;
    if (out.residual_psd) {
        out.trace_gap = op.A.trace() - F.sigma_hat.sum();
    } else {
        out.trace_gap = ev.cwiseAbs().sum();
    }
    return out;
}

CoupledMseReport coupled_mse_mc(const KernelOperator& op, const LowRankFactorization& F,
                                Eigen::Index batch, std::uint64_t seed) {
    if (batch < 2) throw ShapeMismatch("batch must be >= 2");
    const EigenDecomposition& d = op.A.eig();
    const Eigen::Index n = op.A.dim();

    // omega = U diag(sqrt(lambda)) z; the coupled approximation reuses the
    // same z through zeta_hat = U_hat^T U z, which realizes
    // E[zeta_i zeta_hat_j] = <u_i, u_hat_j>.
    const Matrix Z = standard_gaussian(n, batch, seed);
    const Matrix full = d.eigenvectors * (d.eigenvalues.cwiseMax(0.0).cwiseSqrt().asDiagonal() * Z);
    Matrix approx;
    if (F.rank() == 0) {
        approx = Matrix::Zero(n, batch);
    } else {
        const Matrix zeta_hat = F.U_hat.transpose() * (d.eigenvectors * Z);
        approx = F.U_hat * (F.sigma_hat.cwiseMax(0.0).cwiseSqrt().asDiagonal() * zeta_hat);
    }

    const Vector sq = (full - approx).colwise().squaredNorm();
    const double mean = sq.mean();
    const double var = (sq.array() - mean).square().sum() / static_cast<double>(batch - 1);

    CoupledMseReport r;
    r.mse = mean;
    r.stderr_ = std::sqrt(var / static_cast<double>(batch));
    r.trace_gap = wasserstein_trace_check(op, F).trace_gap;
    r.pass = r.mse <= r.trace_gap + 3 * r.stderr_;
    return r;
}

}  // namespace nystromkit
