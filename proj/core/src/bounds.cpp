#include "nystromkit/bounds.hpp"

#include <cmath>
#include <numeric>
#include <vector>

#include "nystromkit/parallel.hpp"
#include "nystromkit/rng.hpp"

namespace nystromkit {

namespace {

double pick(const SchattenNorm& xi, double op, double frob, double nuc) {
    if (xi.is_operator()) return op;
    if (xi.is_frobenius()) return frob;
    if (xi.is_nuclear()) return nuc;
    throw ShapeMismatch("bounds are defined for the operator, Frobenius and nuclear norms");
}

double sym_norm(const Matrix& S, const SchattenNorm& xi) {
    return schatten_norm_from_eigenvalues(SpsdMatrix(S).eig().eigenvalues, xi);
}

}  // namespace

double QualityFactors::beta(const SchattenNorm& xi) const {
    return pick(xi, beta_op, beta_frob, beta_nuc);
}

double QualityFactors::delta(const SchattenNorm& xi) const {
    return pick(xi, delta_op, delta_frob, delta_nuc);
}

Sigma2Norms Sigma2Norms::from(const Vector& sigma2) {
    Vector s = sigma2.cwiseMax(0.0);
    Sigma2Norms n;
    n.op = s.size() ? s.maxCoeff() : 0.0;
    n.frob = s.norm();
    n.nuc = s.sum();
    return n;
}

double Sigma2Norms::of(const SchattenNorm& xi) const { return pick(xi, op, frob, nuc); }

QualityFactors quality_factors(const PartitionedCovariance& pc, const Vector& sigma2) {
    if (sigma2.size() != pc.K22.rows())
        throw ShapeMismatch("sigma2 length does not match trailing block size");
    const Sigma2Norms s2 = Sigma2Norms::from(sigma2);
    if (s2.op <= 0.0)
        throw ZeroTail("trailing spectrum is zero: rank(A) <= k, quality factors undefined");

    const Vector s2h = sigma2.cwiseMax(0.0).cwiseSqrt();

    const Matrix beta_core = s2h.asDiagonal() * pc.K22_1 * s2h.asDiagonal();

    // delta uses the squared inverse of K11: K21 K11^{-2} K21* = G^T G with
    // G = K11^{-1} K21^T. Solve instead of multiplying by the explicit
    // inverse when K11 is badly conditioned.
    const double cond = pc.inv_K11_opnorm * sym_norm(pc.K11, SchattenNorm::op());
    Matrix G;
    if (cond > 1e8) {
        G = Eigen::LDLT<Matrix>(pc.K11).solve(pc.K21.transpose());
    } else {
        G = pc.K11_inv * pc.K21.transpose();
    }
    const Matrix GS = G * s2h.asDiagonal();
    const Matrix delta_core = GS.transpose() * GS;

    QualityFactors qf;
    qf.k = pc.k;
    qf.inv_K11_opnorm = pc.inv_K11_opnorm;
    qf.beta_op = sym_norm(beta_core, SchattenNorm::op()) / s2.op * pc.inv_K11_opnorm;
    qf.beta_frob = sym_norm(beta_core, SchattenNorm::frobenius()) / s2.frob * pc.inv_K11_opnorm;
    qf.beta_nuc = sym_norm(beta_core, SchattenNorm::nuclear()) / s2.nuc * pc.inv_K11_opnorm;
    qf.delta_op = sym_norm(delta_core, SchattenNorm::op()) / s2.op;
    qf.delta_frob = sym_norm(delta_core, SchattenNorm::frobenius()) / s2.frob;
    qf.delta_nuc = sym_norm(delta_core, SchattenNorm::nuclear()) / s2.nuc;
    return qf;
}

BoundConstants bound_constants(Eigen::Index k, Eigen::Index p) {
    if (p < 4) throw InvalidOversampling("bound constants require p >= 4");
    if (k < 1) throw InvalidOversampling("bound constants require k >= 1");
    const double kd = static_cast<double>(k);
    const double pd = static_cast<double>(p);
    const double e2 = std::exp(2.0);
    BoundConstants c;
    c.k = k;
    c.p = p;
    c.c1 = kd * ((pd - 1) * (kd + 1) + 2) / (pd * (pd - 1) * (pd - 3));
    c.c2 = kd * (kd + pd - 1) / (pd * (pd - 1) * (pd - 3));
    c.d1 = 3 * kd / (pd + 1);
    c.d2 = e2 * (kd + pd) / ((pd + 1) * (pd + 1));
    c.d3 = std::sqrt(kd) * c.d2;
    return c;
}

double expected_bound(const SchattenNorm& xi, const QualityFactors& qf,
                      const BoundConstants& consts, const Sigma2Norms& s2) {
    const double k = static_cast<double>(consts.k);
    const double p = static_cast<double>(consts.p);
    const double e2 = std::exp(2.0);
    if (xi.is_operator()) {
        return (1 + 3 * k / (p - 1) * qf.beta_op + 3 * qf.delta_op) * s2.op +
               3 * e2 * (k + p) / (p * p - 1) * qf.beta_nuc * s2.nuc;
    }
    if (xi.is_nuclear()) {
        return (1 + k / (p - 1) * qf.beta_nuc + qf.delta_nuc) * s2.nuc;
    }
    if (xi.is_frobenius()) {
        return (1 + 2 * qf.delta_frob + 2 * std::sqrt(consts.c1) * qf.beta_frob) * s2.frob +
               2 * std::sqrt(consts.c2) * qf.beta_nuc * s2.nuc;
    }
    throw ShapeMismatch("expected_bound is defined for the operator, Frobenius and nuclear norms");
}

TailBound tail_bound(const SchattenNorm& xi, const QualityFactors& qf,
                     const BoundConstants& consts, const Sigma2Norms& s2,
                     double t, double u) {
    if (!(t >= 1.0) || !(u >= 1.0)) throw std::invalid_argument("tail_bound requires t, u >= 1");
    const double p = static_cast<double>(consts.p);
    const double t2 = t * t;
    const double u2 = u * u;
    TailBound out;
    if (xi.is_operator()) {
        out.rhs = (1 + 4 * qf.delta_op + 4 * (consts.d1 + consts.d2 * u2) * t2 * qf.beta_op) * s2.op +
                  4 * consts.d2 * t2 * qf.beta_nuc * s2.nuc;
        out.failure_prob = 2 * std::pow(t, -p) + std::exp(-u2 / 2);
    } else if (xi.is_nuclear()) {
        out.rhs = (1 + 2 * qf.delta_nuc + consts.d1 * t2 * qf.beta_nuc) * s2.nuc +
                  2 * consts.d2 * t2 * u2 * qf.beta_op * s2.op;
        out.failure_prob = 2 * std::pow(t, -p) + std::exp(-u2 / 2);
    } else if (xi.is_frobenius()) {
        out.rhs = (1 + 4 * qf.delta_frob + 4 * t2 * (consts.d1 + consts.d3) * qf.beta_frob) * s2.frob +
                  4 * t2 * consts.d3 * qf.beta_nuc * s2.nuc +
                  2 * t2 * u2 * consts.d2 * qf.beta_op * s2.op;
        out.failure_prob = 3 * std::pow(t, -p) + std::exp(-u2 / 2);
    } else {
        throw ShapeMismatch("tail_bound is defined for the operator, Frobenius and nuclear norms");
    }
    return out;
}

double rsvd_expected_frob_bound(RsvdBoundKind kind, const Vector& B_singulars,
                                const CovarianceSpec& K, const Matrix& right_singvecs,
                                Eigen::Index k, Eigen::Index p) {
    if (p < 2) throw InvalidOversampling("rSVD bound requires p >= 2");
    const Eigen::Index n = right_singvecs.rows();
    if (right_singvecs.cols() != n)
        throw ShapeMismatch("right_singvecs must be a full orthonormal basis");
    Vector s = Vector::Zero(n);
    s.head(std::min(n, B_singulars.size())) = B_singulars.head(std::min(n, B_singulars.size()));

    EigenDecomposition basis{Vector(), right_singvecs};
    const PartitionedCovariance pc = partition_covariance(K, basis, k);

    const Vector s2 = s.tail(n - k);
    const double s2_frob2 = s2.squaredNorm();
    if (s2_frob2 <= 0.0) throw ZeroTail("trailing singular values are zero");

    const double kd = static_cast<double>(k);
    const double pd = static_cast<double>(p);
    if (kind == RsvdBoundKind::Prior) {
        const double gamma =
            (s2.array().square() * pc.K22.diagonal().array()).sum() * pc.inv_K11_opnorm / s2_frob2;
        return (1 + kd * (kd + pd) / (pd - 1) * gamma) * s2_frob2;
    }
    const double beta =
        (s2.array().square() * pc.K22_1.diagonal().array()).sum() * pc.inv_K11_opnorm / s2_frob2;
    const Matrix G = pc.K11_inv * pc.K21.transpose();
    const Matrix core = G.transpose() * G;  // K21 K11^{-2} K21*
    const double delta = (s2.array().square() * core.diagonal().array()).sum() / s2_frob2;
    return (1 + kd / (pd - 1) * beta + delta) * s2_frob2;
}

ExpectationMcReport validate_expectation_mc(const SpsdMatrix& A, const CovarianceSpec& cov,
                                            Eigen::Index k, Eigen::Index p,
                                            const SchattenNorm& xi, long trials,
                                            std::uint64_t seed) {
    if (trials < 100) throw InvalidTrials("expectation validation requires trials >= 100");
    const EigenDecomposition& eig_A = A.eig();
    const PartitionedCovariance pc = partition_covariance(cov, eig_A, k);
    const Vector sigma2 = eig_A.eigenvalues.tail(A.dim() - k);
    const QualityFactors qf = quality_factors(pc, sigma2);
    const Sigma2Norms s2 = Sigma2Norms::from(sigma2);
    const BoundConstants consts = bound_constants(k, p);

    std::vector<double> errs(static_cast<std::size_t>(trials));
    parallel_for(errs.size(), [&](std::size_t i) {
        const Matrix Omega = draw_sketch(cov, k + p, rng::substream(seed, i));
        errs[i] = approx_error(A, nystrom_plain(A, Omega), xi);
    });

    const double mean = std::accumulate(errs.begin(), errs.end(), 0.0) / trials;
    double var = 0;
    for (double e : errs) var += (e - mean) * (e - mean);
    var /= (trials - 1);

    ExpectationMcReport r;
    r.mean_err = mean;
    r.stderr_ = std::sqrt(var / trials);
    r.bound = expected_bound(xi, qf, consts, s2);
    // the round-off guard matters when the error is deterministic (stderr 0)
    // and the bound is attained exactly
    r.pass = mean - 3 * r.stderr_ <= r.bound + 1e-10 * mean;
    return r;
}

TailMcReport validate_tail_mc(const SpsdMatrix& A, const CovarianceSpec& cov,
                              Eigen::Index k, Eigen::Index p, const SchattenNorm& xi,
                              double t, double u, long trials, std::uint64_t seed) {
    if (trials < 1000) throw InvalidTrials("tail validation requires trials >= 1000");
    const EigenDecomposition& eig_A = A.eig();
    const PartitionedCovariance pc = partition_covariance(cov, eig_A, k);
    const Vector sigma2 = eig_A.eigenvalues.tail(A.dim() - k);
    const QualityFactors qf = quality_factors(pc, sigma2);
    const Sigma2Norms s2 = Sigma2Norms::from(sigma2);
    const TailBound tb = tail_bound(xi, qf, bound_constants(k, p), s2, t, u);

    TailMcReport r;
    r.predicted_failure_prob = tb.failure_prob;
    r.rhs = tb.rhs;
    if (tb.failure_prob >= 1.0) {
        r.pass = true;  // vacuous bound
        return r;
    }

    std::vector<char> exceed(static_cast<std::size_t>(trials));
    parallel_for(exceed.size(), [&](std::size_t i) {
        const Matrix Omega = draw_sketch(cov, k + p, rng::substream(seed, i));
        exceed[i] = approx_error(A, nystrom_plain(A, Omega), xi) > tb.rhs ? 1 : 0;
    });

    const double rate =
        std::accumulate(exceed.begin(), exceed.end(), 0.0) / static_cast<double>(trials);
    const double se = std::sqrt(rate * (1 - rate) / trials);
    r.empirical_rate = rate;
    r.pass = rate <= tb.failure_prob + 3 * se;
    return r;
}

}  // namespace nystromkit
