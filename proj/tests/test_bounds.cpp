#include <doctest.h>

#include <cmath>

#include "nystromkit/bounds.hpp"
#include "nystromkit/rng.hpp"

using namespace nystromkit;

namespace {

SpsdMatrix random_spsd(Eigen::Index n, std::uint64_t seed, double ridge = 0.0) {
    const Matrix W = standard_gaussian(n, n, seed);
    return SpsdMatrix(W * W.transpose() + ridge * Matrix::Identity(n, n));
}

QualityFactors identity_factors(Eigen::Index n, Eigen::Index k, const SpsdMatrix& A) {
    const PartitionedCovariance pc =
        partition_covariance(CovarianceSpec::identity(n), A.eig(), k);
    const Vector sigma2 = A.eig().eigenvalues.tail(n - k).cwiseMax(0.0);
    return quality_factors(pc, sigma2);
}

}  // namespace

TEST_CASE("identity covariance has unit beta and zero delta") {
    const SpsdMatrix A = random_spsd(8, 5, 0.1);
    const QualityFactors qf = identity_factors(8, 3, A);
    for (const SchattenNorm& xi :
         {SchattenNorm::op(), SchattenNorm::frobenius(), SchattenNorm::nuclear()}) {
        CHECK(qf.beta(xi) == doctest::Approx(1.0).epsilon(1e-10));
        CHECK(qf.delta(xi) == doctest::Approx(0.0).epsilon(1e-10));
    }
}

TEST_CASE("eigen-aligned diagonal covariance factors") {
    const SpsdMatrix A = random_spsd(6, 9, 0.1);
    const Matrix U = A.eig().eigenvectors;
    Vector lam(6);
    lam << 3, 2, 5, 1, 4, 2;
    const CovarianceSpec cov =
        CovarianceSpec::from(SpsdMatrix(U * lam.asDiagonal() * U.transpose()));
    const Eigen::Index k = 2;
    const PartitionedCovariance pc = partition_covariance(cov, A.eig(), k);
    const Vector sig = A.eig().eigenvalues;
    const Vector sigma2 = sig.tail(6 - k).cwiseMax(0.0);
    const QualityFactors qf = quality_factors(pc, sigma2);

    CHECK(qf.delta(SchattenNorm::op()) == doctest::Approx(0.0).epsilon(1e-9));
    double num = 0;
    for (Eigen::Index i = k; i < 6; ++i) num = std::max(num, lam(i) * sig(i));
    const double inv_op = 1.0 / lam.head(k).minCoeff();
    CHECK(qf.beta(SchattenNorm::op()) == doctest::Approx(num / sig(k) * inv_op).epsilon(1e-9));
}

TEST_CASE("quality factors match an independent block evaluation") {
    const SpsdMatrix A = random_spsd(6, 11, 0.1);
    const SpsdMatrix K = random_spsd(6, 12, 0.2);
    const Eigen::Index k = 2, n = 6;
    const CovarianceSpec cov = CovarianceSpec::from(K);
    const Vector sigma2 = A.eig().eigenvalues.tail(n - k).cwiseMax(0.0);
    const QualityFactors qf = quality_factors(partition_covariance(cov, A.eig(), k), sigma2);

    const Matrix U = A.eig().eigenvectors;
    const Matrix Kt = U.transpose() * K.entries() * U;
    const Matrix K11 = Kt.topLeftCorner(k, k);
    const Matrix K21 = Kt.bottomLeftCorner(n - k, k);
    const Matrix K22 = Kt.bottomRightCorner(n - k, n - k);
    const Matrix K11i = K11.inverse();
    const Matrix S2h = sigma2.cwiseSqrt().asDiagonal();
    const Matrix Bm = S2h * (K22 - K21 * K11i * K21.transpose()) * S2h;
    const Matrix Dm = S2h * K21 * K11i * K11i * K21.transpose() * S2h;
    const double invop = schatten_norm(K11i, SchattenNorm::op());

    for (const SchattenNorm& xi :
         {SchattenNorm::op(), SchattenNorm::frobenius(), SchattenNorm::nuclear()}) {
        const double s2 = schatten_norm_from_eigenvalues(sigma2, xi);
        CHECK(qf.beta(xi) == doctest::Approx(schatten_norm(Bm, xi) / s2 * invop).epsilon(1e-10));
        CHECK(qf.delta(xi) == doctest::Approx(schatten_norm(Dm, xi) / s2).epsilon(1e-10));
    }
}

TEST_CASE("quality factors are invariant under covariance scaling") {
    const SpsdMatrix A = random_spsd(7, 21, 0.1);
    const SpsdMatrix K = random_spsd(7, 22, 0.2);
    const Eigen::Index k = 3;
    const Vector sigma2 = A.eig().eigenvalues.tail(4).cwiseMax(0.0);
    const QualityFactors q1 =
        quality_factors(partition_covariance(CovarianceSpec::from(K), A.eig(), k), sigma2);
    const QualityFactors q2 = quality_factors(
        partition_covariance(CovarianceSpec::from(SpsdMatrix(37.0 * K.entries())), A.eig(), k),
        sigma2);
    for (const SchattenNorm& xi :
         {SchattenNorm::op(), SchattenNorm::frobenius(), SchattenNorm::nuclear()}) {
        CHECK(q1.beta(xi) == doctest::Approx(q2.beta(xi)).epsilon(1e-8));
        CHECK(q1.delta(xi) == doctest::Approx(q2.delta(xi)).epsilon(1e-8));
    }
}

TEST_CASE("quality factors reject a rank-k matrix") {
    Matrix D = Vector{{3.0, 2.0, 0.0, 0.0}}.asDiagonal();
    const SpsdMatrix A(D);
    const PartitionedCovariance pc =
        partition_covariance(CovarianceSpec::identity(4), A.eig(), 2);
    CHECK_THROWS_AS(quality_factors(pc, Vector::Zero(2)), ZeroTail);
}

TEST_CASE("bound constants at reference points") {
    const BoundConstants b = bound_constants(2, 4);
    CHECK(b.c1 == doctest::Approx(11.0 / 6.0));
    CHECK(b.c2 == doctest::Approx(5.0 / 6.0));
    CHECK(b.d1 == doctest::Approx(1.2));
    CHECK(b.d2 == doctest::Approx(6.0 * std::exp(2.0) / 25.0));
    CHECK(b.d3 == doctest::Approx(std::sqrt(2.0) * b.d2));

    CHECK(bound_constants(10, 5).d1 == doctest::Approx(5.0));
    CHECK_THROWS_AS(bound_constants(2, 3), InvalidOversampling);
}

TEST_CASE("expectation bound reference values with identity covariance") {
    // beta = 1, delta = 0, k = 2, p = 4, all tail norms equal to 1
    QualityFactors qf;
    qf.beta_op = qf.beta_frob = qf.beta_nuc = 1.0;
    qf.k = 2;
    const BoundConstants bc = bound_constants(2, 4);
    Sigma2Norms s2;
    s2.op = s2.frob = s2.nuc = 1.0;

    CHECK(expected_bound(SchattenNorm::nuclear(), qf, bc, s2) == doctest::Approx(5.0 / 3.0));
    CHECK(expected_bound(SchattenNorm::op(), qf, bc, s2) ==
          doctest::Approx(3.0 + 1.2 * std::exp(2.0)));
}

TEST_CASE("ideal covariance collapses every bound to the tail norm") {
    QualityFactors qf;  // all betas and deltas zero
    qf.k = 2;
    const BoundConstants bc = bound_constants(2, 4);
    Sigma2Norms s2;
    s2.op = 2.0;
    s2.frob = 3.0;
    s2.nuc = 5.0;
    CHECK(expected_bound(SchattenNorm::op(), qf, bc, s2) == doctest::Approx(2.0));
    CHECK(expected_bound(SchattenNorm::frobenius(), qf, bc, s2) == doctest::Approx(3.0));
    CHECK(expected_bound(SchattenNorm::nuclear(), qf, bc, s2) == doctest::Approx(5.0));
    for (const SchattenNorm& xi :
         {SchattenNorm::op(), SchattenNorm::frobenius(), SchattenNorm::nuclear()}) {
        const TailBound tb = tail_bound(xi, qf, bc, s2, 3.0, 2.0);
        CHECK(tb.rhs == doctest::Approx(xi.is_operator() ? 2.0 : (xi.is_frobenius() ? 3.0 : 5.0)));
    }
}

TEST_CASE("tail bound reference value and failure probabilities") {
    QualityFactors qf;
    qf.beta_op = qf.beta_frob = qf.beta_nuc = 1.0;
    qf.k = 2;
    const BoundConstants bc = bound_constants(2, 4);
    Sigma2Norms s2;
    s2.op = s2.frob = s2.nuc = 1.0;

    const TailBound sp = tail_bound(SchattenNorm::op(), qf, bc, s2, 1.0, 1.0);
    const double d2 = 6.0 * std::exp(2.0) / 25.0;
    CHECK(sp.rhs == doctest::Approx(1.0 + 4.0 * (1.2 + d2) + 4.0 * d2));
    CHECK(sp.rhs == doctest::Approx(19.987).epsilon(1e-3));
    CHECK(sp.failure_prob == doctest::Approx(2.0 + std::exp(-0.5)));

    const TailBound fr = tail_bound(SchattenNorm::frobenius(), qf, bc, s2, 2.0, 3.0);
    CHECK(fr.failure_prob == doctest::Approx(3.0 * std::pow(2.0, -4) + std::exp(-4.5)));

    // monotone in t and u
    const SchattenNorm xi = SchattenNorm::nuclear();
    double prev_rhs = 0, prev_prob = 10;
    for (double t : {1.0, 1.5, 2.0, 3.0}) {
        const TailBound tb = tail_bound(xi, qf, bc, s2, t, t);
        CHECK(tb.rhs >= prev_rhs);
        CHECK(tb.failure_prob <= prev_prob);
        prev_rhs = tb.rhs;
        prev_prob = tb.failure_prob;
    }
}

TEST_CASE("expectation bound dominates the tail norm") {
    const SpsdMatrix A = random_spsd(9, 31, 0.05);
    const SpsdMatrix K = random_spsd(9, 32, 0.1);
    const Eigen::Index k = 3, p = 5;
    const Vector sigma2 = A.eig().eigenvalues.tail(6).cwiseMax(0.0);
    const QualityFactors qf =
        quality_factors(partition_covariance(CovarianceSpec::from(K), A.eig(), k), sigma2);
    const BoundConstants bc = bound_constants(k, p);
    const Sigma2Norms s2 = Sigma2Norms::from(sigma2);
    for (const SchattenNorm& xi :
         {SchattenNorm::op(), SchattenNorm::frobenius(), SchattenNorm::nuclear()}) {
        CHECK(qf.beta(xi) >= 0.0);
        CHECK(qf.delta(xi) >= 0.0);
        CHECK(expected_bound(xi, qf, bc, s2) >= s2.of(xi));
    }
}

TEST_CASE("rsvd bound anchors and ordering") {
    const Eigen::Index n = 8, k = 3, p = 4;
    Vector sv(n);
    for (Eigen::Index i = 0; i < n; ++i) sv(i) = std::pow(1.7, -double(i));
    const Matrix V = orth(standard_gaussian(n, n, 61));
    const double s2f2 = sv.tail(n - k).squaredNorm();

    SUBCASE("identity covariance recovers the classic constant") {
        const double ours = rsvd_expected_frob_bound(RsvdBoundKind::Ours, sv,
                                                     CovarianceSpec::identity(n), V, k, p);
        CHECK(ours == doctest::Approx((1.0 + double(k) / (p - 1)) * s2f2).epsilon(1e-9));
    }

    SUBCASE("ours never exceeds the prior bound") {
        for (std::uint64_t s = 0; s < 10; ++s) {
            const CovarianceSpec K = CovarianceSpec::from(random_spsd(n, 70 + s, 0.1));
            const double ours = rsvd_expected_frob_bound(RsvdBoundKind::Ours, sv, K, V, k, p);
            const double prior = rsvd_expected_frob_bound(RsvdBoundKind::Prior, sv, K, V, k, p);
            CHECK(ours <= prior * (1 + 1e-10));
            CHECK(ours >= s2f2 * (1 - 1e-10));
        }
    }
}

TEST_CASE("monte carlo expectation validator") {
    Vector lam(20);
    for (int i = 0; i < 20; ++i) lam(i) = std::pow(2.0, -i);
    const SpsdMatrix A(Matrix(lam.asDiagonal()));

    SUBCASE("identity covariance passes the nuclear bound") {
        const ExpectationMcReport r = validate_expectation_mc(
            A, CovarianceSpec::identity(20), 5, 5, SchattenNorm::nuclear(), 400, 17);
        CHECK(r.pass);
        CHECK(r.mean_err > 0.0);
        CHECK(r.bound > 0.0);
    }

    SUBCASE("ideal covariance pins the error at the tail norm") {
        Vector kd = Vector::Zero(20);
        kd.head(5).setOnes();
        const CovarianceSpec cov = CovarianceSpec::from(SpsdMatrix(Matrix(kd.asDiagonal())));
        const ExpectationMcReport r =
            validate_expectation_mc(A, cov, 5, 5, SchattenNorm::nuclear(), 200, 19);
        const double tail = lam.tail(15).sum();
        CHECK(r.pass);
        CHECK(r.mean_err == doctest::Approx(tail).epsilon(1e-8));
    }

    SUBCASE("too few trials is rejected") {
        CHECK_THROWS_AS(validate_expectation_mc(A, CovarianceSpec::identity(20), 5, 5,
                                                SchattenNorm::nuclear(), 50, 1),
                        InvalidTrials);
    }
}

TEST_CASE("monte carlo tail validator") {
    Vector lam(20);
    for (int i = 0; i < 20; ++i) lam(i) = std::pow(2.0, -i);
    const SpsdMatrix A(Matrix(lam.asDiagonal()));

    SUBCASE("reference predicted probability") {
        const TailMcReport r = validate_tail_mc(A, CovarianceSpec::identity(20), 3, 6,
                                                SchattenNorm::op(), 2.0, 3.0, 1000, 23);
        CHECK(r.predicted_failure_prob ==
              doctest::Approx(2.0 * std::pow(2.0, -6) + std::exp(-4.5)));
        CHECK(r.pass);
    }

    SUBCASE("vacuous bound passes by definition") {
        const TailMcReport r = validate_tail_mc(A, CovarianceSpec::identity(20), 3, 4,
                                                SchattenNorm::op(), 1.0, 1.0, 1000, 29);
        CHECK(r.predicted_failure_prob >= 1.0);
        CHECK(r.pass);
    }

    SUBCASE("too few trials is rejected") {
        CHECK_THROWS_AS(validate_tail_mc(A, CovarianceSpec::identity(20), 3, 4,
                                         SchattenNorm::op(), 2.0, 2.0, 500, 1),
                        InvalidTrials);
    }
}
