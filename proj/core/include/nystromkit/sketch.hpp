#pragma once

#include <cstdint>

#include "nystromkit/linalg.hpp"

namespace nystromkit {

// Sketch covariance K together with its cached PSD square root. The square
// root is computed by eigendecomposition so PSD-singular covariances (e.g.
// finite-rank projection kernels) are supported.
struct CovarianceSpec {
    SpsdMatrix K;
    Matrix sqrt_K;

    static CovarianceSpec from(SpsdMatrix K);
    static CovarianceSpec identity(Eigen::Index n);
};

// Blocks of K restricted to the eigenbasis of A, split at target rank k.
struct PartitionedCovariance {
    Eigen::Index k = 0;
    Matrix K11;
    Matrix K21;
    Matrix K22;
    Matrix K22_1;            // Schur complement K22 - K21 K11^{-1} K21*
    Matrix K11_inv;          // symmetric inverse of K11
    double inv_K11_opnorm = 0;
};

struct SketchDraw {
    Matrix Omega;
    Matrix Omega1;   // U1* Omega, k x (k+p)
    Matrix Omega2;   // U2* Omega, (n-k) x (k+p)
    std::uint64_t seed = 0;
};

// Omega = sqrt_K * X with X i.i.d. standard normal, deterministic per seed.
Matrix draw_sketch(const CovarianceSpec& cov, Eigen::Index cols, std::uint64_t seed);

PartitionedCovariance partition_covariance(const CovarianceSpec& cov,
                                           const EigenDecomposition& eig_A,
                                           Eigen::Index k);

SketchDraw split_sketch(const EigenDecomposition& eig_A, Matrix Omega, Eigen::Index k,
                        std::uint64_t seed);

// Parameters of Omega2 | Omega1: mean K21 K11^{-1} Omega1, covariance
// square root psd_sqrt(K22_1).
struct ConditionalDrawParams {
    Matrix mean;
    Matrix cov_sqrt;
};

ConditionalDrawParams conditional_draw_params(const PartitionedCovariance& pc,
                                              const Matrix& Omega1);

}  // namespace nystromkit
