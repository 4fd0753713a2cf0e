#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nystromkit/linalg.hpp"

namespace nystromkit {

// Closed-form moments of shifted and scaled Gaussian matrices B + C Psi D
// with standard Gaussian Psi.
enum class ShiftedMoment {
    Frob2,        // E||B + C Psi D||_F^2
    Schatten4_4,  // E||C Psi D||_(4)^4
    Spectral2UB,  // upper bound on E||C Psi D||_2^2
    Frob4,        // E||C Psi D||_F^4
};

double shifted_gaussian_moment(ShiftedMoment which, const Matrix& B, const Matrix& C,
                               const Matrix& D);

// Moments of the pseudoinverse of Omega1 with i.i.d. N(0, K11) columns,
// Omega1 in R^{k x (k+p)}.
enum class PinvMoment {
    Frob2WithB,   // E||Omega1^dagger B||_F^2
    Spectral2UB,  // upper bound on E||Omega1^dagger||_2^2
    Schatten4_4,  // E||Omega1^dagger||_(4)^4
    Frob4,        // E||Omega1^dagger||_F^4
};

double pinv_wishart_moment(PinvMoment which, const Matrix& K11, Eigen::Index k,
                           Eigen::Index p, const Matrix* B = nullptr);

enum class PinvTail { Frob, Spectral, Schatten4 };

struct TailThreshold {
    double threshold = 0;
    double prob_bound = 0;
};

TailThreshold pinv_tail_bound(PinvTail which, const Matrix& K11, Eigen::Index k,
                              Eigen::Index p, double t);

struct MomentReport {
    std::string formula;
    double closed_form = 0;
    double mc_estimate = 0;
    double mc_stderr = 0;
    long trials = 0;
    bool is_inequality = false;
    bool pass = false;
};

// Monte Carlo audits. Equalities pass within 5 standard errors; inequality
// and tail estimates must stay below closed_form + 3 standard errors.
MomentReport mc_validate_shifted(ShiftedMoment which, const Matrix& B, const Matrix& C,
                                 const Matrix& D, long trials, std::uint64_t seed);

MomentReport mc_validate_pinv(PinvMoment which, const Matrix& K11, Eigen::Index k,
                              Eigen::Index p, const Matrix* B, long trials,
                              std::uint64_t seed);

MomentReport mc_validate_pinv_tail(PinvTail which, const Matrix& K11, Eigen::Index k,
                                   Eigen::Index p, double t, long trials,
                                   std::uint64_t seed);

// The catalogue of formula audits run by the validate-lemmas CLI command.
std::vector<MomentReport> default_lemma_suite(std::uint64_t seed, long trials);

}  // namespace nystromkit
