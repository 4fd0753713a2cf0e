#pragma once

#include <Eigen/Dense>
#include <limits>
#include <memory>
#include <mutex>

#include "nystromkit/errors.hpp"

namespace nystromkit {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

inline constexpr int kMaxDim = 4096;
inline constexpr double kPsdAtol = 1e-10;

// Eigenvalues sorted descending, eigenvectors in matching column order.
struct EigenDecomposition {
    Vector eigenvalues;
    Matrix eigenvectors;
};

// Dense symmetric PSD matrix. Construction symmetrizes (A+A*)/2 so the
// stored entries are bit-exactly symmetric; the eigendecomposition is
// computed once on demand and shared across copies.
class SpsdMatrix {
public:
    explicit SpsdMatrix(Matrix entries);

    Eigen::Index dim() const { return entries_.rows(); }
    const Matrix& entries() const { return entries_; }

    // Cached full eigendecomposition (descending eigenvalues).
    const EigenDecomposition& eig() const;

    double trace() const { return entries_.trace(); }

private:
    Matrix entries_;
    struct EigCache {
        std::once_flag once;
        EigenDecomposition value;
    };
    std::shared_ptr<EigCache> cache_;
};

// Schatten s-norm selector; s = inf is the operator norm, s = 2 Frobenius,
// s = 1 nuclear.
class SchattenNorm {
public:
    static SchattenNorm op() { return SchattenNorm(std::numeric_limits<double>::infinity()); }
    static SchattenNorm frobenius() { return SchattenNorm(2.0); }
    static SchattenNorm nuclear() { return SchattenNorm(1.0); }
    static SchattenNorm schatten(double s);

    double s() const { return s_; }
    bool is_operator() const { return std::isinf(s_); }
    bool is_frobenius() const { return s_ == 2.0; }
    bool is_nuclear() const { return s_ == 1.0; }

    // Norm of a matrix with the given singular values.
    double from_singular_values(const Vector& sv) const;

private:
    explicit SchattenNorm(double s) : s_(s) {}
    double s_;
};

EigenDecomposition eig_sym(const SpsdMatrix& A);

double schatten_norm(const Matrix& M, const SchattenNorm& xi);

// Norm of a symmetric matrix given through its eigenvalues (singular values
// are the absolute eigenvalues).
double schatten_norm_from_eigenvalues(const Vector& eigenvalues, const SchattenNorm& xi);

SpsdMatrix psd_sqrt(const SpsdMatrix& A);

// Upper-triangular R with A = R^T R. Escalating jitter
// eps_j = 10^j * eps * trace(A)/dim for j = 0..6 on leading-minor failure.
Matrix chol_spd(const Matrix& A);

Matrix pinv(const Matrix& M, double rtol = 1e-12);

// Thin orthonormal basis of range(M) via column-pivoted QR; columns past
// the numerical rank are dropped.
Matrix orth(const Matrix& M, double rtol = 1e-12);

}  // namespace nystromkit
