#include "nystromkit/gauss_moments.hpp"

#include <cmath>
#include <numeric>

#include "nystromkit/parallel.hpp"
#include "nystromkit/rng.hpp"

namespace nystromkit {

namespace {

double frob2(const Matrix& M) { return M.squaredNorm(); }

// ||M||_(4)^4 = ||M^T M||_F^2
double schatten4_pow4(const Matrix& M) { return (M.transpose() * M).squaredNorm(); }

double spectral2(const Matrix& M) {
    if (M.rows() == 0 || M.cols() == 0) return 0.0;
    const Matrix G = M.cols() <= M.rows() ? Matrix(M.transpose() * M) : Matrix(M * M.transpose());
    Eigen::SelfAdjointEigenSolver<Matrix> es(G, Eigen::EigenvaluesOnly);
    return es.eigenvalues().maxCoeff();
}

void check_shifted_shapes(ShiftedMoment which, const Matrix& B, const Matrix& C,
                          const Matrix& D) {
    if (which == ShiftedMoment::Frob2 && (B.rows() != C.rows() || B.cols() != D.cols()))
        throw ShapeMismatch("B must be C.rows() x D.cols()");
}

struct McAccumulator {
    double mean = 0;
    double se = 0;
};

McAccumulator reduce(const std::vector<double>& samples) {
    const double n = static_cast<double>(samples.size());
    const double mean = std::accumulate(samples.begin(), samples.end(), 0.0) / n;
    double var = 0;
    for (double s : samples) var += (s - mean) * (s - mean);
    var /= (n - 1);
    return {mean, std::sqrt(var / n)};
}

MomentReport finish(std::string formula, double closed_form, const McAccumulator& acc,
                    long trials, bool is_inequality) {
    MomentReport r;
    r.formula = std::move(formula);
    r.closed_form = closed_form;
    r.mc_estimate = acc.mean;
    r.mc_stderr = acc.se;
    r.trials = trials;
    r.is_inequality = is_inequality;
    r.pass = is_inequality ? acc.mean <= closed_form + 3 * acc.se
                           : std::abs(closed_form - acc.mean) <= 5 * acc.se;
    return r;
}

Vector omega1_singular_values(const Matrix& sqrt_K11, Eigen::Index k, Eigen::Index p,
                              std::uint64_t seed) {
    const Matrix Omega1 = sqrt_K11 * standard_gaussian(k, k + p, seed);
    Eigen::JacobiSVD<Matrix> svd(Omega1);
    return svd.singularValues();
}

}  // namespace

double shifted_gaussian_moment(ShiftedMoment which, const Matrix& B, const Matrix& C,
                               const Matrix& D) {
    check_shifted_shapes(which, B, C, D);
    const double cf2 = frob2(C), df2 = frob2(D);
    const double c44 = schatten4_pow4(C), d44 = schatten4_pow4(D);
    switch (which) {
        case ShiftedMoment::Frob2:
            return frob2(B) + cf2 * df2;
        case ShiftedMoment::Schatten4_4:
            return c44 * d44 + cf2 * cf2 * d44 + c44 * df2 * df2;
        case ShiftedMoment::Spectral2UB: {
            const double c2 = std::sqrt(spectral2(C)), d2 = std::sqrt(spectral2(D));
            const double s = std::sqrt(cf2) * d2 + c2 * std::sqrt(df2);
            return s * s;
        }
        case ShiftedMoment::Frob4:
            return 2 * c44 * d44 + cf2 * cf2 * df2 * df2;
    }
    throw ShapeMismatch("unknown shifted moment");
}

double pinv_wishart_moment(PinvMoment which, const Matrix& K11, Eigen::Index k,
                           Eigen::Index p, const Matrix* B) {
    if (K11.rows() != k || K11.cols() != k) throw ShapeMismatch("K11 must be k x k");
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (K11 + K11.transpose()));
    if (es.eigenvalues().minCoeff() <= 1e-12 * es.eigenvalues().cwiseAbs().maxCoeff())
        throw SingularK11("K11 must be invertible");
    const Vector inv_ev = es.eigenvalues().cwiseInverse();
    const Matrix K11_inv =
        es.eigenvectors() * inv_ev.asDiagonal() * es.eigenvectors().transpose();
    const double tr_inv = inv_ev.sum();
    const double frob2_inv = inv_ev.squaredNorm();
    const double op_inv = inv_ev.maxCoeff();
    const double pd = static_cast<double>(p);
    const double kd = static_cast<double>(k);

    switch (which) {
        case PinvMoment::Frob2WithB: {
            if (p < 2) throw InvalidOversampling("requires p >= 2");
            if (!B) throw ShapeMismatch("Frob2WithB requires B");
            return (B->transpose() * K11_inv * *B).trace() / (pd - 1);
        }
        case PinvMoment::Spectral2UB:
            if (p < 2 || k < 2) throw InvalidOversampling("requires p, k >= 2");
            return std::exp(2.0) * (kd + pd) / ((pd - 1) * (pd + 1)) * op_inv;
        case PinvMoment::Schatten4_4:
            if (p < 4) throw InvalidOversampling("requires p >= 4");
            return ((pd - 1) * frob2_inv + tr_inv * tr_inv) / (pd * (pd - 1) * (pd - 3));
        case PinvMoment::Frob4:
            if (p < 4) throw InvalidOversampling("requires p >= 4");
            return ((pd - 2) * tr_inv * tr_inv + 2 * frob2_inv) / (pd * (pd - 1) * (pd - 3));
    }
    throw ShapeMismatch("unknown pinv moment");
}

TailThreshold pinv_tail_bound(PinvTail which, const Matrix& K11, Eigen::Index k,
                              Eigen::Index p, double t) {
    if (p < 4) throw InvalidOversampling("pinv tail bounds require p >= 4");
    if (!(t >= 1.0)) throw std::invalid_argument("pinv tail bounds require t >= 1");
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (K11 + K11.transpose()));
    if (es.eigenvalues().minCoeff() <= 1e-12 * es.eigenvalues().cwiseAbs().maxCoeff())
        throw SingularK11("K11 must be invertible");
    const Vector inv_ev = es.eigenvalues().cwiseInverse();
    const double pd = static_cast<double>(p);
    const double kd = static_cast<double>(k);
    TailThreshold out;
    switch (which) {
        case PinvTail::Frob:
            out.threshold = std::sqrt(3 * inv_ev.sum() / (pd + 1)) * t;
            out.prob_bound = std::pow(t, -pd);
            return out;
        case PinvTail::Spectral:
            out.threshold = std::exp(1.0) * std::sqrt((kd + pd) * inv_ev.maxCoeff()) / (pd + 1) * t;
            out.prob_bound = std::pow(t, -(pd + 1));
            return out;
        case PinvTail::Schatten4:
            out.threshold = std::exp(1.0) * std::sqrt((kd + pd) * inv_ev.norm()) / (pd + 1) * t;
            out.prob_bound = std::pow(t, -(pd + 1));
            return out;
    }
    throw ShapeMismatch("unknown pinv tail");
}

MomentReport mc_validate_shifted(ShiftedMoment which, const Matrix& B, const Matrix& C,
                                 const Matrix& D, long trials, std::uint64_t seed) {
    if (trials < 10000) throw InvalidTrials("moment equalities require trials >= 1e4");
    check_shifted_shapes(which, B, C, D);
    std::vector<double> samples(static_cast<std::size_t>(trials));
    parallel_for(samples.size(), [&](std::size_t i) {
        const Matrix Psi = standard_gaussian(C.cols(), D.rows(), rng::substream(seed, i));
        const Matrix Phi = C * Psi * D;
        switch (which) {
            case ShiftedMoment::Frob2: samples[i] = frob2(B + Phi); break;
            case ShiftedMoment::Schatten4_4: samples[i] = schatten4_pow4(Phi); break;
            case ShiftedMoment::Spectral2UB: samples[i] = spectral2(Phi); break;
            case ShiftedMoment::Frob4: samples[i] = frob2(Phi) * frob2(Phi); break;
        }
    });
    static const char* names[] = {"shifted_frob2", "shifted_schatten4_4", "shifted_spectral2_ub",
                                  "shifted_frob4"};
    return finish(names[static_cast<int>(which)], shifted_gaussian_moment(which, B, C, D),
                  reduce(samples), trials, which == ShiftedMoment::Spectral2UB);
}

MomentReport mc_validate_pinv(PinvMoment which, const Matrix& K11, Eigen::Index k,
                              Eigen::Index p, const Matrix* B, long trials,
                              std::uint64_t seed) {
    if (trials < 10000) throw InvalidTrials("moment equalities require trials >= 1e4");
    const double closed = pinv_wishart_moment(which, K11, k, p, B);
    const Matrix sqrt_K11 = psd_sqrt(SpsdMatrix(K11)).entries();
    std::vector<double> samples(static_cast<std::size_t>(trials));
    parallel_for(samples.size(), [&](std::size_t i) {
        const std::uint64_t s = rng::substream(seed, i);
        if (which == PinvMoment::Frob2WithB) {
            const Matrix Omega1 = sqrt_K11 * standard_gaussian(k, k + p, s);
            samples[i] = frob2(pinv(Omega1) * *B);
            return;
        }
        const Vector sv = omega1_singular_values(sqrt_K11, k, p, s);
        const Vector inv2 = sv.cwiseInverse().cwiseAbs2();
        switch (which) {
            case PinvMoment::Spectral2UB: samples[i] = inv2.maxCoeff(); break;
            case PinvMoment::Schatten4_4: samples[i] = inv2.squaredNorm(); break;
            case PinvMoment::Frob4: samples[i] = inv2.sum() * inv2.sum(); break;
            default: break;
        }
    });
    static const char* names[] = {"pinv_frob2_with_B", "pinv_spectral2_ub", "pinv_schatten4_4",
                                  "pinv_frob4"};
    return finish(names[static_cast<int>(which)], closed, reduce(samples), trials,
                  which == PinvMoment::Spectral2UB);
}

MomentReport mc_validate_pinv_tail(PinvTail which, const Matrix& K11, Eigen::Index k,
                                   Eigen::Index p, double t, long trials,
                                   std::uint64_t seed) {
    if (trials < 1000) throw InvalidTrials("tail probabilities require trials >= 1e3");
    const TailThreshold tb = pinv_tail_bound(which, K11, k, p, t);
    const Matrix sqrt_K11 = psd_sqrt(SpsdMatrix(K11)).entries();
    std::vector<char> exceed(static_cast<std::size_t>(trials));
    parallel_for(exceed.size(), [&](std::size_t i) {
        const Vector sv = omega1_singular_values(sqrt_K11, k, p, rng::substream(seed, i));
        const Vector inv2 = sv.cwiseInverse().cwiseAbs2();
        double norm = 0;
        switch (which) {
            case PinvTail::Frob: norm = std::sqrt(inv2.sum()); break;
            case PinvTail::Spectral: norm = std::sqrt(inv2.maxCoeff()); break;
            case PinvTail::Schatten4: norm = std::pow(inv2.squaredNorm(), 0.25); break;
        }
        exceed[i] = norm > tb.threshold ? 1 : 0;
    });
    const double x = std::accumulate(exceed.begin(), exceed.end(), 0.0);
    const double n = static_cast<double>(trials);
    // Wilson-style standard error (z = 3) keeps small-probability audits honest
    const double z2 = 9.0;
    const double centre = (x + z2 / 2) / (n + z2);
    const double se = std::sqrt(centre * (1 - centre) / (n + z2));

    static const char* names[] = {"pinv_tail_frob", "pinv_tail_spectral", "pinv_tail_schatten4"};
    MomentReport r;
    r.formula = std::string(names[static_cast<int>(which)]) + "_t" + std::to_string(t);
    r.closed_form = tb.prob_bound;
    r.mc_estimate = x / n;
    r.mc_stderr = se;
    r.trials = trials;
    r.is_inequality = true;
    r.pass = r.mc_estimate <= tb.prob_bound + 3 * se;
    return r;
}

std::vector<MomentReport> default_lemma_suite(std::uint64_t seed, long trials) {
    std::vector<MomentReport> out;
    const long tail_trials = std::max<long>(trials / 10, 1000);

    for (int cfg = 0; cfg < 5; ++cfg) {
        const std::uint64_t cs = rng::substream(seed, 1000 + cfg);
        const Eigen::Index m1 = 2 + cfg % 3, m2 = 3 + cfg % 2, n1 = 2 + (cfg + 1) % 3,
                           n2 = 3 + cfg % 3;
        const Matrix B = standard_gaussian(m1, n2, rng::substream(cs, 0));
        const Matrix C = standard_gaussian(m1, m2, rng::substream(cs, 1));
        const Matrix D = standard_gaussian(n1, n2, rng::substream(cs, 2));

        out.push_back(mc_validate_shifted(ShiftedMoment::Frob2, B, C, D, trials, rng::substream(cs, 3)));
        out.push_back(mc_validate_shifted(ShiftedMoment::Schatten4_4, B, C, D, trials, rng::substream(cs, 4)));
        out.push_back(mc_validate_shifted(ShiftedMoment::Frob4, B, C, D, trials, rng::substream(cs, 5)));
        out.push_back(mc_validate_shifted(ShiftedMoment::Spectral2UB, B, C, D, trials, rng::substream(cs, 6)));

        const Eigen::Index k = 2 + cfg % 3;
        const Eigen::Index p = 4 + cfg % 3;
        const Matrix W = standard_gaussian(k, k, rng::substream(cs, 7));
        const Matrix K11 = W * W.transpose() + Matrix::Identity(k, k);
        const Matrix Bp = standard_gaussian(k, 3, rng::substream(cs, 8));

        // The fourth-moment sample variance is finite only when p > 7 (it
        // involves eighth inverse moments), so those audits oversample more.
        const Eigen::Index p4 = 8 + cfg % 3;
        out.push_back(mc_validate_pinv(PinvMoment::Frob2WithB, K11, k, p, &Bp, trials, rng::substream(cs, 9)));
        out.push_back(mc_validate_pinv(PinvMoment::Schatten4_4, K11, k, p4, nullptr, trials, rng::substream(cs, 10)));
        out.push_back(mc_validate_pinv(PinvMoment::Frob4, K11, k, p4, nullptr, trials, rng::substream(cs, 11)));
        out.push_back(mc_validate_pinv(PinvMoment::Spectral2UB, K11, k, p, nullptr, trials, rng::substream(cs, 12)));

        int tail_stream = 13;
        for (double t : {1.25, 2.0}) {
            out.push_back(mc_validate_pinv_tail(PinvTail::Frob, K11, k, p, t, tail_trials, rng::substream(cs, tail_stream++)));
            out.push_back(mc_validate_pinv_tail(PinvTail::Spectral, K11, k, p, t, tail_trials, rng::substream(cs, tail_stream++)));
            out.push_back(mc_validate_pinv_tail(PinvTail::Schatten4, K11, k, p, t, tail_trials, rng::substream(cs, tail_stream++)));
        }
    }
    return out;
}

}  // namespace nystromkit
