#pragma once

#include "nystromkit/linalg.hpp"

namespace nystromkit {

// U_hat * diag(sigma_hat) * U_hat^T with orthonormal U_hat and descending
// nonnegative sigma_hat.
struct LowRankFactorization {
    Matrix U_hat;
    Vector sigma_hat;
    double shift_nu = 0.0;   // shift used by the stabilized path, 0 otherwise

    Eigen::Index rank() const { return sigma_hat.size(); }
    Matrix reconstruct() const;

    static LowRankFactorization zero(Eigen::Index n);
};

// A Omega (Omega* A Omega)^dagger Omega* A in factored form.
LowRankFactorization nystrom_plain(const SpsdMatrix& A, const Matrix& Omega);

// Stabilized variant: orthonormalize the sketch, shift by
// nu = eps_machine * ||A Q||_F, Cholesky, triangular solve, SVD, de-shift.
LowRankFactorization nystrom_stabilized(const SpsdMatrix& A, const Matrix& Omega,
                                        double eps_machine = std::numeric_limits<double>::epsilon());

// Basic randomized SVD range capture: Q = orth(B Omega), approximation QQ*B.
struct RsvdResult {
    Matrix Q;
    Matrix QtB;    // Q^T B, so the approximation is Q * QtB

    Matrix approx() const { return Q * QtB; }
};

RsvdResult randomized_svd(const Matrix& B, const Matrix& Omega);

// ||A - U_hat Sigma_hat U_hat^T||_xi via eigendecomposition of the residual.
double approx_error(const SpsdMatrix& A, const LowRankFactorization& F, const SchattenNorm& xi);

// ||diag(sigma_{k+1},...,sigma_n)||_xi, the best rank-k error.
double optimal_error(const SpsdMatrix& A, Eigen::Index k, const SchattenNorm& xi);

}  // namespace nystromkit
