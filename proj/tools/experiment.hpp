#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "nystromkit/bounds.hpp"
#include "nystromkit/gauss_moments.hpp"
#include "nystromkit/kernels.hpp"

namespace nystromkit::cli {

// Line-oriented `key = value` configuration with `#` comments.
struct ExperimentConfig {
    std::string kernel;            // target kernel spec, required
    std::string cov = "identity";  // sketch covariance spec or "identity"
    int dim = 1;
    std::string rule = "gauss";    // "gauss" | "trapezoid"
    Eigen::Index n = 100;          // quadrature nodes per dimension
    std::vector<Eigen::Index> k_values;  // strictly increasing, required
    Eigen::Index p = 5;
    long trials = 1;
    std::uint64_t seed = 0;
    std::string output;            // CSV path; empty means stdout
};

ExperimentConfig parse_config(std::istream& in);
ExperimentConfig parse_config_file(const std::string& path);

QuadRule parse_rule(const std::string& rule);

KernelOperator make_operator(const std::string& kernel_spec, int dim, QuadRule rule,
                             Eigen::Index n_per_dim);

// Covariance on the same grid as `op`; "identity" gives K = I.
CovarianceSpec make_covariance(const std::string& cov_spec, const KernelOperator& op,
                               QuadRule rule, Eigen::Index n_per_dim);

// Deterministic 17-significant-digit number formatting for CSV output.
std::string format_num(double v);

// Full CSV text, header `k,trial,err_op_rel,err_F_rel,err_Tr_rel,
// optimal_Tr_rel,bound_Tr,bound_F,bound_op`, rows in (k, trial) order.
std::string run_experiment(const ExperimentConfig& cfg);

// CSV for the lemma audit reports; sets *all_pass when non-null.
std::string lemma_suite_csv(const std::vector<MomentReport>& reports, bool* all_pass);

struct BoundsValidationConfig {
    Eigen::Index k = 5;
    Eigen::Index p = 5;
    std::vector<std::pair<double, double>> tu_pairs;
    long trials = 2000;
    long tail_trials = 5000;
    std::uint64_t seed = 0;
};

// CSV with header `norm,k,p,t,u,mean_err,stderr,bound,empirical_rate,
// predicted_rate,pass`: one expectation row per norm, then one tail row per
// (norm, t, u). Sets *all_pass when non-null.
std::string run_bounds_validation(const SpsdMatrix& A, const CovarianceSpec& cov,
                                  const BoundsValidationConfig& cfg, bool* all_pass);

}  // namespace nystromkit::cli
