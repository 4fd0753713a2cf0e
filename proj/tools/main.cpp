#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <string>

#include "experiment.hpp"
#include "nystromkit/approx.hpp"
#include "nystromkit/gauss_moments.hpp"
#include "nystromkit/gp_sample.hpp"
#include "nystromkit/matrix_io.hpp"
#include "nystromkit/sketch.hpp"

namespace nk = nystromkit;
namespace cli = nystromkit::cli;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidationFailure = 1;
constexpr int kExitUsage = 2;

void write_text(const std::string& path, const std::string& text) {
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw nk::ParseError("cannot open output file '" + path + "'");
    out << text;
}

struct CommonMatrixOpts {
    std::string matrix_file;
    std::string kernel;
    std::string cov = "identity";
    std::string cov_matrix_file;
    std::string rule = "gauss";
    int dim = 1;
    long n = 100;

    void attach(CLI::App* cmd) {
        cmd->add_option("--matrix", matrix_file, "target matrix text file");
        cmd->add_option("--kernel", kernel, "target kernel spec, e.g. sqexp:l=0.1");
        cmd->add_option("--cov", cov, "sketch covariance kernel spec or 'identity'");
        cmd->add_option("--cov-matrix", cov_matrix_file, "sketch covariance matrix text file");
        cmd->add_option("--rule", rule, "quadrature rule: gauss | trapezoid");
        cmd->add_option("--dim", dim, "domain dimension (1 or 2)");
        cmd->add_option("--n", n, "quadrature nodes per dimension");
    }

    nk::SpsdMatrix target() const {
        if (!matrix_file.empty() && !kernel.empty())
            throw nk::ParseError("--matrix and --kernel are mutually exclusive");
        if (!matrix_file.empty()) return nk::SpsdMatrix(nk::read_matrix_file(matrix_file));
        if (kernel.empty()) throw nk::ParseError("one of --matrix or --kernel is required");
        return cli::make_operator(kernel, dim, cli::parse_rule(rule), n).A;
    }

    nk::CovarianceSpec covariance(Eigen::Index n_target) const {
        if (!cov_matrix_file.empty())
            return nk::CovarianceSpec::from(nk::SpsdMatrix(nk::read_matrix_file(cov_matrix_file)));
        if (cov == "identity") return nk::CovarianceSpec::identity(n_target);
        const nk::KernelOperator cov_op =
            cli::make_operator(cov, dim, cli::parse_rule(rule), n);
        if (cov_op.A.dim() != n_target)
            throw nk::ShapeMismatch("covariance grid size differs from target size");
        return nk::CovarianceSpec::from(cov_op.A);
    }
};

int cmd_approximate(const CommonMatrixOpts& mx, long k, long p, std::uint64_t seed,
                    const std::string& algo, const std::string& prefix) {
    if (k < 1) throw nk::ParseError("k must be >= 1");
    if (p < 1) throw nk::ParseError("p must be >= 1");
    const nk::SpsdMatrix A = mx.target();
    if (k + p > A.dim()) throw nk::ParseError("k + p must not exceed the matrix size");
    const nk::CovarianceSpec cov = mx.covariance(A.dim());
    const nk::Matrix Omega = nk::draw_sketch(cov, k + p, seed);

    nk::LowRankFactorization F;
    if (algo == "plain") F = nk::nystrom_plain(A, Omega);
    else if (algo == "stabilized") F = nk::nystrom_stabilized(A, Omega);
    else throw nk::ParseError("unknown algorithm '" + algo + "'");

    nk::write_matrix_file(prefix + "_U.txt", F.U_hat);
    nk::write_matrix_file(prefix + "_sigma.txt", F.sigma_hat);

    const double nTr = nk::schatten_norm_from_eigenvalues(A.eig().eigenvalues,
                                                          nk::SchattenNorm::nuclear());
    const double nF = nk::schatten_norm_from_eigenvalues(A.eig().eigenvalues,
                                                         nk::SchattenNorm::frobenius());
    const double nOp = nk::schatten_norm_from_eigenvalues(A.eig().eigenvalues,
                                                          nk::SchattenNorm::op());
    std::cout << "rank=" << F.rank()
              << " err_Tr_rel=" << cli::format_num(nk::approx_error(A, F, nk::SchattenNorm::nuclear()) / nTr)
              << " err_F_rel=" << cli::format_num(nk::approx_error(A, F, nk::SchattenNorm::frobenius()) / nF)
              << " err_op_rel=" << cli::format_num(nk::approx_error(A, F, nk::SchattenNorm::op()) / nOp)
              << " nu=" << cli::format_num(F.shift_nu) << '\n';
    return kExitOk;
}

int cmd_sample_gp(const std::string& kernel, int dim, const std::string& rule, long n,
                  long r, long batch, std::uint64_t seed, const std::string& output,
                  const std::string& csv_path) {
    const nk::KernelOperator op =
        cli::make_operator(kernel, dim, cli::parse_rule(rule), n);
    if (r < 0 || r > op.A.dim()) throw nk::ParseError("rank r out of range");

    const nk::EigenDecomposition& d = op.A.eig();
    nk::LowRankFactorization F;
    if (r > 0) {
        F.U_hat = d.eigenvectors.leftCols(r);
        F.sigma_hat = d.eigenvalues.head(r).cwiseMax(0.0);
    } else {
        F = nk::LowRankFactorization::zero(op.A.dim());
    }

    const nk::GpSampleBatch samples = nk::sample_gp(F, batch, seed);
    nk::write_matrix_file(output, samples.samples);

    if (!csv_path.empty()) {
        std::ostringstream csv;
        csv << (dim == 1 ? "x" : "x,y");
        for (long b = 0; b < batch; ++b) csv << ",sample_" << b;
        csv << '\n';
        for (Eigen::Index i = 0; i < op.nodes.rows(); ++i) {
            csv << cli::format_num(op.nodes(i, 0));
            if (dim == 2) csv << ',' << cli::format_num(op.nodes(i, 1));
            for (long b = 0; b < batch; ++b)
                csv << ',' << cli::format_num(samples.samples(i, b));
            csv << '\n';
        }
        write_text(csv_path, csv.str());
    }

    const nk::TraceGap gap = nk::wasserstein_trace_check(op, F);
    std::cout << "rank=" << F.rank() << " trace_gap=" << cli::format_num(gap.trace_gap)
              << " residual_psd=" << (gap.residual_psd ? "true" : "false") << '\n';
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Randomized low-rank approximation toolkit"};
    app.require_subcommand(1);

    // approximate
    auto* ap = app.add_subcommand("approximate", "Compute a low-rank factorization");
    CommonMatrixOpts ap_mx;
    ap_mx.attach(ap);
    long ap_k = 10, ap_p = 5;
    std::uint64_t ap_seed = 0;
    std::string ap_algo = "stabilized", ap_prefix = "nystrom";
    ap->add_option("--k", ap_k, "target rank");
    ap->add_option("--p", ap_p, "oversampling (>= 1)");
    ap->add_option("--seed", ap_seed, "random seed");
    ap->add_option("--algo", ap_algo, "plain | stabilized");
    ap->add_option("--output-prefix", ap_prefix, "prefix for factor files");

    // experiment
    auto* ex = app.add_subcommand("experiment", "Run a rank-sweep experiment from a config file");
    std::string ex_config;
    ex->add_option("config", ex_config, "config file (key = value lines)")->required();

    // validate-lemmas
    auto* vl = app.add_subcommand("validate-lemmas", "Monte Carlo audit of the moment formulas");
    std::uint64_t vl_seed = 0;
    long vl_trials = 100000;
    std::string vl_output;
    vl->add_option("--seed", vl_seed, "random seed");
    vl->add_option("--trials", vl_trials, "Monte Carlo trials (>= 10000)");
    vl->add_option("--output", vl_output, "CSV output path (default stdout)");

    // validate-bounds
    auto* vb = app.add_subcommand("validate-bounds", "Monte Carlo audit of the error bounds");
    CommonMatrixOpts vb_mx;
    vb_mx.attach(vb);
    long vb_k = 5, vb_p = 5, vb_trials = 2000, vb_tail_trials = 5000;
    std::uint64_t vb_seed = 0;
    std::vector<double> vb_t, vb_u;
    std::string vb_output;
    vb->add_option("--k", vb_k, "target rank");
    vb->add_option("--p", vb_p, "oversampling");
    vb->add_option("--t", vb_t, "tail parameter t (paired with --u)");
    vb->add_option("--u", vb_u, "tail parameter u (paired with --t)");
    vb->add_option("--trials", vb_trials, "expectation trials (>= 100)");
    vb->add_option("--tail-trials", vb_tail_trials, "tail trials (>= 1000)");
    vb->add_option("--seed", vb_seed, "random seed");
    vb->add_option("--output", vb_output, "CSV output path (default stdout)");

    // sample-gp
    auto* sg = app.add_subcommand("sample-gp", "Sample a Gaussian process from a truncated kernel");
    std::string sg_kernel, sg_rule = "gauss", sg_output = "gp_samples.txt", sg_csv;
    int sg_dim = 1;
    long sg_n = 100, sg_r = 30, sg_batch = 1;
    std::uint64_t sg_seed = 0;
    sg->add_option("--kernel", sg_kernel, "kernel spec")->required();
    sg->add_option("--dim", sg_dim, "domain dimension (1 or 2)");
    sg->add_option("--rule", sg_rule, "quadrature rule: gauss | trapezoid");
    sg->add_option("--n", sg_n, "quadrature nodes per dimension");
    sg->add_option("--r", sg_r, "truncation rank");
    sg->add_option("--batch", sg_batch, "number of samples");
    sg->add_option("--seed", sg_seed, "random seed");
    sg->add_option("--output", sg_output, "sample matrix output file");
    sg->add_option("--csv", sg_csv, "optional per-grid-point CSV of the samples");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (ap->parsed())
            return cmd_approximate(ap_mx, ap_k, ap_p, ap_seed, ap_algo, ap_prefix);

        if (ex->parsed()) {
            const cli::ExperimentConfig cfg = cli::parse_config_file(ex_config);
            write_text(cfg.output, cli::run_experiment(cfg));
            return kExitOk;
        }

        if (vl->parsed()) {
            if (vl_trials < 10000) throw nk::InvalidTrials("--trials must be >= 10000");
            bool all_pass = false;
            write_text(vl_output,
                       cli::lemma_suite_csv(nk::default_lemma_suite(vl_seed, vl_trials), &all_pass));
            return all_pass ? kExitOk : kExitValidationFailure;
        }

        if (vb->parsed()) {
            if (vb_t.size() != vb_u.size())
                throw nk::ParseError("--t and --u must be given the same number of times");
            cli::BoundsValidationConfig cfg;
            cfg.k = vb_k;
            cfg.p = vb_p;
            for (std::size_t i = 0; i < vb_t.size(); ++i)
                cfg.tu_pairs.emplace_back(vb_t[i], vb_u[i]);
            cfg.trials = vb_trials;
            cfg.tail_trials = vb_tail_trials;
            cfg.seed = vb_seed;
            const nk::SpsdMatrix A = vb_mx.target();
            const nk::CovarianceSpec cov = vb_mx.covariance(A.dim());
            bool all_pass = false;
            write_text(vb_output, cli::run_bounds_validation(A, cov, cfg, &all_pass));
            return all_pass ? kExitOk : kExitValidationFailure;
        }

        if (sg->parsed())
            return cmd_sample_gp(sg_kernel, sg_dim, sg_rule, sg_n, sg_r, sg_batch, sg_seed,
                                 sg_output, sg_csv);
    } catch (const nk::ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitValidationFailure;
    }
    return kExitUsage;
}
