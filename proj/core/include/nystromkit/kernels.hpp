#pragma once

#include <string>

#include "nystromkit/linalg.hpp"

namespace nystromkit {

// Catalogue of PSD kernels on [-1,1]^d, d in {1,2}.
struct Kernel {
    enum class Id { SquaredExp, Matern12, Matern32, Matern52, Pretty, LegendreProj };

    Id id = Id::SquaredExp;
    int dim = 1;
    double length_scale = 1.0;  // SquaredExp
    int degree = 1;             // LegendreProj: polynomials per dimension

    static Kernel squared_exp(double length_scale, int dim = 1);
    static Kernel matern(double nu, int dim = 1);  // nu in {0.5, 1.5, 2.5}
    static Kernel pretty();
    static Kernel legendre_proj(int degree, int dim = 1);

    double eval(const double* x, const double* y) const;
    double eval1d(double x, double y) const;
};

// CLI string ids: "sqexp:l=0.01", "matern:nu=1.5", "pretty", "legproj:deg=25".
Kernel parse_kernel_spec(const std::string& spec, int dim = 1);

enum class QuadRule { Trapezoid, GaussLegendre };

// Nodes and weights of the rule on [-1,1].
struct Quadrature1d {
    Vector nodes;
    Vector weights;
};

Quadrature1d quadrature_1d(QuadRule rule, Eigen::Index n);

// Kernel discretized into a weighted SPSD matrix A_ij = sqrt(w_i) G(x_i, x_j)
// sqrt(w_j), so Schatten norms of A estimate the operator norms.
struct KernelOperator {
    Kernel kernel;
    Matrix nodes;     // N x d
    Vector weights;   // N, positive
    SpsdMatrix A;
};

KernelOperator discretize(const Kernel& kernel, QuadRule rule, Eigen::Index n_per_dim);

// Projection covariance onto the orthonormal tensor-Legendre basis with
// degree_per_dim polynomials per dimension.
KernelOperator legendre_projection_cov(int degree_per_dim, int dim, QuadRule rule,
                                       Eigen::Index n_per_dim);

// Rank-r spectral truncation of the operator in the same weighted geometry.
KernelOperator mercer_truncation(const KernelOperator& op, Eigen::Index r);

// Orthonormal Legendre polynomial values p_0..p_{degree-1} at x in [-1,1].
Vector legendre_orthonormal(int degree, double x);

}  // namespace nystromkit
