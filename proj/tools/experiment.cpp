#include "experiment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include "nystromkit/approx.hpp"
#include "nystromkit/parallel.hpp"
#include "nystromkit/rng.hpp"
#include "nystromkit/sketch.hpp"

namespace nystromkit::cli {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<Eigen::Index> parse_k_list(const std::string& value, long line) {
    std::vector<Eigen::Index> out;
    std::stringstream ss(value);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        tok = trim(tok);
        if (tok.empty()) continue;
        try {
            out.push_back(static_cast<Eigen::Index>(std::stol(tok)));
        } catch (const std::exception&) {
            throw ParseError("invalid rank value '" + tok + "' in key 'k'", line);
        }
    }
    return out;
}

}  // namespace

ExperimentConfig parse_config(std::istream& in) {
    ExperimentConfig cfg;
    bool has_kernel = false, has_k = false;
    std::string raw;
    long line = 0;
    while (std::getline(in, raw)) {
        ++line;
        const auto hash = raw.find('#');
        if (hash != std::string::npos) raw.erase(hash);
        const std::string s = trim(raw);
        if (s.empty()) continue;
        const auto eq = s.find('=');
        if (eq == std::string::npos) throw ParseError("expected 'key = value'", line);
        const std::string key = trim(s.substr(0, eq));
        const std::string value = trim(s.substr(eq + 1));
        try {
            if (key == "kernel") { cfg.kernel = value; has_kernel = true; }
            else if (key == "cov") cfg.cov = value;
            else if (key == "dim") cfg.dim = std::stoi(value);
            else if (key == "rule") cfg.rule = value;
            else if (key == "n") cfg.n = std::stol(value);
            else if (key == "k") { cfg.k_values = parse_k_list(value, line); has_k = true; }
            else if (key == "p") cfg.p = std::stol(value);
            else if (key == "trials") cfg.trials = std::stol(value);
            else if (key == "seed") cfg.seed = std::stoull(value);
            else if (key == "output") cfg.output = value;
            else throw ParseError("unknown config key '" + key + "'", line);
        } catch (const ParseError&) {
            throw;
        } catch (const std::exception&) {
            throw ParseError("invalid value for key '" + key + "'", line);
        }
    }

    std::string bad;
    if (!has_kernel) bad += " kernel";
    if (!has_k || cfg.k_values.empty()) bad += " k";
    if (!std::is_sorted(cfg.k_values.begin(), cfg.k_values.end()) ||
        std::adjacent_find(cfg.k_values.begin(), cfg.k_values.end()) != cfg.k_values.end())
        bad += " k(strictly-increasing)";
    if (!cfg.k_values.empty() && cfg.k_values.front() < 1) bad += " k(positive)";
    if (cfg.p < 1) bad += " p";
    if (cfg.trials < 1) bad += " trials";
    if (cfg.dim != 1 && cfg.dim != 2) bad += " dim";
    if (cfg.n < 3) bad += " n";
    const Eigen::Index grid = cfg.dim == 1 ? cfg.n : cfg.n * cfg.n;
    if (!cfg.k_values.empty() && cfg.k_values.back() + cfg.p > grid) bad += " k+p<=grid";
    if (!bad.empty()) throw ParseError("invalid config keys:" + bad);
    return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open config file '" + path + "'");
    return parse_config(in);
}

QuadRule parse_rule(const std::string& rule) {
    if (rule == "gauss") return QuadRule::GaussLegendre;
    if (rule == "trapezoid") return QuadRule::Trapezoid;
    throw ParseError("unknown quadrature rule '" + rule + "'");
}

KernelOperator make_operator(const std::string& kernel_spec, int dim, QuadRule rule,
                             Eigen::Index n_per_dim) {
    return discretize(parse_kernel_spec(kernel_spec, dim), rule, n_per_dim);
}

CovarianceSpec make_covariance(const std::string& cov_spec, const KernelOperator& op,
                               QuadRule rule, Eigen::Index n_per_dim) {
    if (cov_spec == "identity") return CovarianceSpec::identity(op.A.dim());
    const KernelOperator cov_op =
        discretize(parse_kernel_spec(cov_spec, op.kernel.dim), rule, n_per_dim);
    return CovarianceSpec::from(cov_op.A);
}

std::string format_num(double v) {
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

std::string run_experiment(const ExperimentConfig& cfg) {
    const QuadRule rule = parse_rule(cfg.rule);
    const KernelOperator op = make_operator(cfg.kernel, cfg.dim, rule, cfg.n);
    const CovarianceSpec cov = make_covariance(cfg.cov, op, rule, cfg.n);
    const SpsdMatrix& A = op.A;

    const SchattenNorm norms[3] = {SchattenNorm::op(), SchattenNorm::frobenius(),
                                   SchattenNorm::nuclear()};
    double normA[3];
    for (int i = 0; i < 3; ++i)
        normA[i] = schatten_norm_from_eigenvalues(A.eig().eigenvalues, norms[i]);

    const std::size_t nk = cfg.k_values.size();
    const double nan = std::numeric_limits<double>::quiet_NaN();

    // Per-k expectation bounds (relative) and optimal trace error.
    struct PerK {
        double bound_op = 0, bound_F = 0, bound_Tr = 0, optimal_Tr = 0;
    };
    std::vector<PerK> per_k(nk);
    for (std::size_t ki = 0; ki < nk; ++ki) {
        const Eigen::Index k = cfg.k_values[ki];
        PerK& row = per_k[ki];
        row.optimal_Tr = optimal_error(A, k, SchattenNorm::nuclear()) / normA[2];
        try {
            const Vector sigma2 = A.eig().eigenvalues.tail(A.dim() - k).cwiseMax(0.0);
            const PartitionedCovariance pc = partition_covariance(cov, A.eig(), k);
            const QualityFactors qf = quality_factors(pc, sigma2);
            const BoundConstants bc = bound_constants(k, cfg.p);
            const Sigma2Norms s2 = Sigma2Norms::from(sigma2);
            row.bound_op = expected_bound(norms[0], qf, bc, s2) / normA[0];
            row.bound_F = expected_bound(norms[1], qf, bc, s2) / normA[1];
            row.bound_Tr = expected_bound(norms[2], qf, bc, s2) / normA[2];
        } catch (const std::exception&) {
            // Bound undefined here (e.g. singular K11 block or p below the
            // theorem hypothesis); the error columns are still valid.
            row.bound_op = row.bound_F = row.bound_Tr = nan;
        }
    }

    const std::size_t total = nk * static_cast<std::size_t>(cfg.trials);
    struct Row {
        double err[3];
    };
    std::vector<Row> rows(total);
    parallel_for(total, [&](std::size_t idx) {
        const std::size_t ki = idx / cfg.trials;
        const Eigen::Index k = cfg.k_values[ki];
        const std::uint64_t draw_seed = rng::substream(cfg.seed, idx);
        const Matrix Omega = draw_sketch(cov, k + cfg.p, draw_seed);
        const LowRankFactorization F = nystrom_stabilized(A, Omega);
        for (int i = 0; i < 3; ++i)
            rows[idx].err[i] = approx_error(A, F, norms[i]) / normA[i];
    });

    std::ostringstream out;
    out << "k,trial,err_op_rel,err_F_rel,err_Tr_rel,optimal_Tr_rel,bound_Tr,bound_F,bound_op\n";
    for (std::size_t ki = 0; ki < nk; ++ki) {
        for (long t = 0; t < cfg.trials; ++t) {
            const Row& r = rows[ki * cfg.trials + t];
            out << cfg.k_values[ki] << ',' << t << ',' << format_num(r.err[0]) << ','
                << format_num(r.err[1]) << ',' << format_num(r.err[2]) << ','
                << format_num(per_k[ki].optimal_Tr) << ',' << format_num(per_k[ki].bound_Tr)
                << ',' << format_num(per_k[ki].bound_F) << ',' << format_num(per_k[ki].bound_op)
                << '\n';
        }
    }
    return out.str();
}

std::string lemma_suite_csv(const std::vector<MomentReport>& reports, bool* all_pass) {
    std::ostringstream out;
    out << "formula,closed_form,mc_estimate,stderr,trials,pass\n";
    bool ok = true;
    for (const MomentReport& r : reports) {
        ok = ok && r.pass;
        out << r.formula << ',' << format_num(r.closed_form) << ',' << format_num(r.mc_estimate)
            << ',' << format_num(r.mc_stderr) << ',' << r.trials << ','
            << (r.pass ? "true" : "false") << '\n';
    }
    if (all_pass) *all_pass = ok;
    return out.str();
}

std::string run_bounds_validation(const SpsdMatrix& A, const CovarianceSpec& cov,
                                  const BoundsValidationConfig& cfg, bool* all_pass) {
    const struct {
        const char* name;
        SchattenNorm xi;
    } norms[3] = {{"op", SchattenNorm::op()},
                  {"F", SchattenNorm::frobenius()},
                  {"Tr", SchattenNorm::nuclear()}};

    std::ostringstream out;
    out << "norm,k,p,t,u,mean_err,stderr,bound,empirical_rate,predicted_rate,pass\n";
    bool ok = true;
    for (const auto& nm : norms) {
        const ExpectationMcReport er =
            validate_expectation_mc(A, cov, cfg.k, cfg.p, nm.xi, cfg.trials, cfg.seed);
        ok = ok && er.pass;
        out << nm.name << ',' << cfg.k << ',' << cfg.p << ",,," << format_num(er.mean_err) << ','
            << format_num(er.stderr_) << ',' << format_num(er.bound) << ",,,"
            << (er.pass ? "true" : "false") << '\n';
    }
    for (const auto& nm : norms) {
        for (const auto& [t, u] : cfg.tu_pairs) {
            const TailMcReport tr = validate_tail_mc(A, cov, cfg.k, cfg.p, nm.xi, t, u,
                                                     cfg.tail_trials, cfg.seed + 1);
            ok = ok && tr.pass;
            out << nm.name << ',' << cfg.k << ',' << cfg.p << ',' << format_num(t) << ','
                << format_num(u) << ",,," << format_num(tr.rhs) << ','
                << format_num(tr.empirical_rate) << ',' << format_num(tr.predicted_failure_prob)
                << ',' << (tr.pass ? "true" : "false") << '\n';
        }
    }
    if (all_pass) *all_pass = ok;
    return out.str();
}

}  // namespace nystromkit::cli
