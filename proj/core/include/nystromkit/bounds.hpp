#pragma once

#include <cstdint>

#include "nystromkit/approx.hpp"
#include "nystromkit/sketch.hpp"

namespace nystromkit {

// Covariance quality factors beta_k and delta_k in the operator, Frobenius
// and nuclear norms, together with ||K11^{-1}||_2.
struct QualityFactors {
    double beta_op = 0, beta_frob = 0, beta_nuc = 0;
    double delta_op = 0, delta_frob = 0, delta_nuc = 0;
    double inv_K11_opnorm = 0;
    Eigen::Index k = 0;

    double beta(const SchattenNorm& xi) const;
    double delta(const SchattenNorm& xi) const;
};

// Norms of the tail spectrum diag(sigma_{k+1}, ..., sigma_n).
struct Sigma2Norms {
    double op = 0, frob = 0, nuc = 0;

    static Sigma2Norms from(const Vector& sigma2);
    double of(const SchattenNorm& xi) const;
};

struct BoundConstants {
    double c1 = 0, c2 = 0;        // Frobenius expectation constants
    double d1 = 0, d2 = 0, d3 = 0; // tail constants, d3 = sqrt(k) d2
    Eigen::Index k = 0, p = 0;
};

QualityFactors quality_factors(const PartitionedCovariance& pc, const Vector& sigma2);

BoundConstants bound_constants(Eigen::Index k, Eigen::Index p);

// Right-hand side of the expectation bound for the chosen norm.
double expected_bound(const SchattenNorm& xi, const QualityFactors& qf,
                      const BoundConstants& consts, const Sigma2Norms& s2);

struct TailBound {
    double rhs = 0;
    double failure_prob = 0;
};

TailBound tail_bound(const SchattenNorm& xi, const QualityFactors& qf,
                     const BoundConstants& consts, const Sigma2Norms& s2,
                     double t, double u);

enum class RsvdBoundKind { Ours, Prior };

// Bound on E||B - QQ*B||_F^2 for the randomized SVD with covariance K,
// partitioned against the right singular vectors of B.
double rsvd_expected_frob_bound(RsvdBoundKind kind, const Vector& B_singulars,
                                const CovarianceSpec& K, const Matrix& right_singvecs,
                                Eigen::Index k, Eigen::Index p);

struct ExpectationMcReport {
    double mean_err = 0;
    double stderr_ = 0;
    double bound = 0;
    bool pass = false;
};

ExpectationMcReport validate_expectation_mc(const SpsdMatrix& A, const CovarianceSpec& cov,
                                            Eigen::Index k, Eigen::Index p,
                                            const SchattenNorm& xi, long trials,
                                            std::uint64_t seed);

struct TailMcReport {
    double empirical_rate = 0;
    double predicted_failure_prob = 0;
    double rhs = 0;
    bool pass = false;
};

TailMcReport validate_tail_mc(const SpsdMatrix& A, const CovarianceSpec& cov,
                              Eigen::Index k, Eigen::Index p, const SchattenNorm& xi,
                              double t, double u, long trials, std::uint64_t seed);

}  // namespace nystromkit
