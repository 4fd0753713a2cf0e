#pragma once

#include <cstdint>

#include "nystromkit/approx.hpp"
#include "nystromkit/kernels.hpp"

namespace nystromkit {

// Columns are i.i.d. samples U_hat diag(sqrt(sigma_hat)) z with standard
// normal z.
struct GpSampleBatch {
    Matrix samples;          // grid points x batch
    Eigen::Index rank_used = 0;
    std::uint64_t seed = 0;
};

GpSampleBatch sample_gp(const LowRankFactorization& F, Eigen::Index batch,
                        std::uint64_t seed);

// Trace-norm gap between the operator and its Nystrom approximation. When
// the residual is PSD within tolerance this is trace(A) - trace(Sigma_hat);
// otherwise the absolute-eigenvalue sum is used and warned about.
struct TraceGap {
    double trace_gap = 0;
    bool residual_psd = true;
};

TraceGap wasserstein_trace_check(const KernelOperator& op, const LowRankFactorization& F);

// Monte Carlo estimate of E||omega - omega_hat||^2 under the coupling that
// reuses the full-operator normals for matched eigendirections.
struct CoupledMseReport {
    double mse = 0;
    double stderr_ = 0;
    double trace_gap = 0;
    bool pass = false;   // mse <= trace_gap + 3 stderr
};

CoupledMseReport coupled_mse_mc(const KernelOperator& op, const LowRankFactorization& F,
                                Eigen::Index batch, std::uint64_t seed);

}  // namespace nystromkit
