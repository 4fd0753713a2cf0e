#include <doctest.h>

#include "nystromkit/rng.hpp"
#include "nystromkit/sketch.hpp"

using namespace nystromkit;

namespace {

SpsdMatrix random_spsd(Eigen::Index n, std::uint64_t seed, double ridge = 0.0) {
    const Matrix W = standard_gaussian(n, n, seed);
    return SpsdMatrix(W * W.transpose() + ridge * Matrix::Identity(n, n));
}

}  // namespace

TEST_CASE("zero covariance gives a zero sketch") {
    const CovarianceSpec cov = CovarianceSpec::from(SpsdMatrix(Matrix::Zero(4, 4)));
    CHECK(draw_sketch(cov, 6, 5).norm() == 0.0);
}

TEST_CASE("identity covariance sample second moment") {
    const CovarianceSpec cov = CovarianceSpec::identity(3);
    const Matrix Omega = draw_sketch(cov, 100000, 8);
    const Matrix S = Omega * Omega.transpose() / static_cast<double>(Omega.cols());
    CHECK((S - Matrix::Identity(3, 3)).norm() <= 0.05 * Matrix::Identity(3, 3).norm());
}

TEST_CASE("rank-deficient covariance zeroes the dead direction") {
    Matrix K = Vector{{4.0, 0.0}}.asDiagonal();
    const CovarianceSpec cov = CovarianceSpec::from(SpsdMatrix(K));
    const Matrix Omega = draw_sketch(cov, 10000, 12);
    CHECK(Omega.row(1).norm() == 0.0);
    const double var = Omega.row(0).squaredNorm() / static_cast<double>(Omega.cols());
    CHECK(var == doctest::Approx(4.0).epsilon(0.05));
}

TEST_CASE("sketch draws are deterministic per seed") {
    const CovarianceSpec cov = CovarianceSpec::from(random_spsd(5, 1));
    CHECK(draw_sketch(cov, 7, 3) == draw_sketch(cov, 7, 3));
    CHECK(draw_sketch(cov, 7, 3) != draw_sketch(cov, 7, 4));
}

TEST_CASE("partition of the identity covariance") {
    const SpsdMatrix A = random_spsd(6, 2);
    const PartitionedCovariance pc =
        partition_covariance(CovarianceSpec::identity(6), A.eig(), 2);
    CHECK((pc.K11 - Matrix::Identity(2, 2)).norm() <= 1e-12);
    CHECK(pc.K21.norm() <= 1e-12);
    CHECK((pc.K22_1 - Matrix::Identity(4, 4)).norm() <= 1e-10);
    CHECK(pc.inv_K11_opnorm == doctest::Approx(1.0));
}

TEST_CASE("partition of an eigen-aligned diagonal covariance") {
    const SpsdMatrix A = random_spsd(6, 4);
    const Matrix U = A.eig().eigenvectors;
    Vector lam(6);
    lam << 6, 5, 4, 3, 2, 1;
    const CovarianceSpec cov =
        CovarianceSpec::from(SpsdMatrix(U * lam.asDiagonal() * U.transpose()));
    const PartitionedCovariance pc = partition_covariance(cov, A.eig(), 2);
    CHECK(pc.K21.norm() <= 1e-8);
    CHECK((pc.K22_1 - Vector(lam.tail(4)).asDiagonal().toDenseMatrix()).norm() <= 1e-8);
}

TEST_CASE("schur complement matches the brute-force block formula") {
    const SpsdMatrix A = random_spsd(5, 7);
    const SpsdMatrix K = random_spsd(5, 8, 0.1);
    const CovarianceSpec cov = CovarianceSpec::from(K);
    const Eigen::Index k = 2;
    const PartitionedCovariance pc = partition_covariance(cov, A.eig(), k);

    const Matrix U = A.eig().eigenvectors;
    const Matrix Kt = U.transpose() * K.entries() * U;
    const Matrix K11 = Kt.topLeftCorner(k, k);
    const Matrix K21 = Kt.bottomLeftCorner(5 - k, k);
    const Matrix K22 = Kt.bottomRightCorner(5 - k, 5 - k);
    const Matrix S = K22 - K21 * K11.inverse() * K21.transpose();

    CHECK((pc.K11 - K11).norm() <= 1e-10 * K11.norm());
    CHECK((pc.K21 - K21).norm() <= 1e-10 * Kt.norm());
    CHECK((pc.K22 - K22).norm() <= 1e-10 * Kt.norm());
    CHECK((pc.K22_1 - S).norm() <= 1e-9 * Kt.norm());

    // Schur complement of a PSD matrix is PSD
    const EigenDecomposition d = eig_sym(SpsdMatrix(pc.K22_1));
    CHECK(d.eigenvalues.minCoeff() >= -1e-10 * d.eigenvalues.maxCoeff());
}

TEST_CASE("partition rejects a covariance with no leading-space energy") {
    const SpsdMatrix A = random_spsd(5, 11);
    const Matrix U = A.eig().eigenvectors;
    Vector lam(5);
    lam << 0, 0, 1, 1, 1;  // leading 2x2 block of K-tilde is zero
    const CovarianceSpec cov =
        CovarianceSpec::from(SpsdMatrix(U * lam.asDiagonal() * U.transpose()));
    CHECK_THROWS_AS(partition_covariance(cov, A.eig(), 2), SingularK11);
}

TEST_CASE("split_sketch rows reassemble the rotated sketch") {
    const SpsdMatrix A = random_spsd(6, 13);
    const CovarianceSpec cov = CovarianceSpec::from(random_spsd(6, 14, 0.1));
    const Matrix Omega = draw_sketch(cov, 5, 9);
    const SketchDraw sd = split_sketch(A.eig(), Omega, 2, 9);
    Matrix stacked(6, 5);
    stacked << sd.Omega1, sd.Omega2;
    CHECK((stacked - A.eig().eigenvectors.transpose() * Omega).norm() <= 1e-12);
}

TEST_CASE("conditional draw parameters") {
    const SpsdMatrix A = random_spsd(6, 21);

    SUBCASE("identity covariance gives independent halves") {
        const PartitionedCovariance pc =
            partition_covariance(CovarianceSpec::identity(6), A.eig(), 2);
        const Matrix Omega1 = standard_gaussian(2, 6, 3);
        const ConditionalDrawParams cp = conditional_draw_params(pc, Omega1);
        CHECK(cp.mean.norm() <= 1e-10);
        CHECK((cp.cov_sqrt - Matrix::Identity(4, 4)).norm() <= 1e-8);
    }

    SUBCASE("resampled conditional mean matches the formula") {
        const CovarianceSpec cov = CovarianceSpec::from(random_spsd(6, 22, 0.2));
        const Eigen::Index k = 2, cols = 6;
        const PartitionedCovariance pc = partition_covariance(cov, A.eig(), k);
        const Matrix Omega1 = standard_gaussian(k, cols, 5);
        const ConditionalDrawParams cp = conditional_draw_params(pc, Omega1);

        const long trials = 10000;
        Matrix sum = Matrix::Zero(6 - k, cols);
        for (long i = 0; i < trials; ++i)
            sum += cp.mean + cp.cov_sqrt * standard_gaussian(6 - k, cols, rng::substream(77, i));
        const Matrix emp = sum / static_cast<double>(trials);
        // entrywise 5-standard-error envelope
        const double se = schatten_norm(cp.cov_sqrt, SchattenNorm::op()) / std::sqrt(double(trials));
        CHECK((emp - cp.mean).cwiseAbs().maxCoeff() <= 5 * se * 3);
    }
}
