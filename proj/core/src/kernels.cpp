#include "nystromkit/kernels.hpp"

#include <cmath>

namespace nystromkit {

namespace {

double matern_1d(double r, double nu) {
    if (nu == 0.5) return std::exp(-r);
    if (nu == 1.5) {
        const double a = std::sqrt(3.0) * r;
        return (1 + a) * std::exp(-a);
    }
    const double a = std::sqrt(5.0) * r;
    return (1 + a + a * a / 3.0) * std::exp(-a);
}

double kernel_param(const std::string& spec, const std::string& key) {
    const auto pos = spec.find(key + "=");
    if (pos == std::string::npos)
        throw ParseError("kernel spec '" + spec + "' is missing parameter '" + key + "'");
    return std::stod(spec.substr(pos + key.size() + 1));
}

}  // namespace

Kernel Kernel::squared_exp(double length_scale, int dim) {
    if (!(length_scale > 0)) throw OutOfDomain("length scale must be positive");
    Kernel k;
    k.id = Id::SquaredExp;
    k.length_scale = length_scale;
    k.dim = dim;
    return k;
}

Kernel Kernel::matern(double nu, int dim) {
    Kernel k;
    k.dim = dim;
    if (nu == 0.5) k.id = Id::Matern12;
    else if (nu == 1.5) k.id = Id::Matern32;
    else if (nu == 2.5) k.id = Id::Matern52;
    else throw OutOfDomain("Matern smoothness must be 0.5, 1.5 or 2.5");
    return k;
}

Kernel Kernel::pretty() {
    Kernel k;
    k.id = Id::Pretty;
    k.dim = 1;
    return k;
}

Kernel Kernel::legendre_proj(int degree, int dim) {
    if (degree < 1) throw OutOfDomain("projection degree must be >= 1");
    Kernel k;
    k.id = Id::LegendreProj;
    k.degree = degree;
    k.dim = dim;
    return k;
}

double Kernel::eval(const double* x, const double* y) const {
    for (int i = 0; i < dim; ++i)
        if (std::abs(x[i]) > 1 + 1e-12 || std::abs(y[i]) > 1 + 1e-12)
            throw OutOfDomain("kernel arguments must lie in [-1,1]^d");
    switch (id) {
        case Id::SquaredExp: {
            double v = 1.0;
            for (int i = 0; i < dim; ++i) {
                const double d = x[i] - y[i];
                v *= std::exp(-d * d / (2 * length_scale * length_scale));
            }
            return v;
        }
        case Id::Matern12:
        case Id::Matern32:
        case Id::Matern52: {
            double r2 = 0;
            for (int i = 0; i < dim; ++i) r2 += (x[i] - y[i]) * (x[i] - y[i]);
            const double nu = id == Id::Matern12 ? 0.5 : (id == Id::Matern32 ? 1.5 : 2.5);
            return matern_1d(std::sqrt(r2), nu);
        }
        case Id::Pretty: {
            const double d = x[0] * x[0] - y[0] * y[0];
            return 1.0 / (1.0 + 100.0 * d * d);
        }
        case Id::LegendreProj: {
            double v = 1.0;
            for (int i = 0; i < dim; ++i) {
                const Vector px = legendre_orthonormal(degree, x[i]);
                const Vector py = legendre_orthonormal(degree, y[i]);
                v *= px.dot(py);
            }
            return v;
        }
    }
    throw OutOfDomain("unknown kernel");
}

double Kernel::eval1d(double x, double y) const { return eval(&x, &y); }

Kernel parse_kernel_spec(const std::string& spec, int dim) {
    if (spec == "pretty") return Kernel::pretty();
    if (spec.rfind("sqexp", 0) == 0) {
        double l = 1.0;
        if (spec.find('=') != std::string::npos) {
            try {
                l = kernel_param(spec, "l");
            } catch (const ParseError&) {
                l = kernel_param(spec, "ell");
            }
        }
        return Kernel::squared_exp(l, dim);
    }
    if (spec.rfind("matern", 0) == 0) return Kernel::matern(kernel_param(spec, "nu"), dim);
    if (spec.rfind("legproj", 0) == 0)
        return Kernel::legendre_proj(static_cast<int>(kernel_param(spec, "deg")), dim);
    throw ParseError("unknown kernel spec '" + spec + "'");
}

Vector legendre_orthonormal(int degree, double x) {
    Vector p(degree);
    double p0 = 1.0, p1 = x;
    for (int n = 0; n < degree; ++n) {
        double pn;
        if (n == 0) pn = p0;
        else if (n == 1) pn = p1;
        else {
            pn = ((2 * n - 1) * x * p1 - (n - 1) * p0) / n;
            p0 = p1;
            p1 = pn;
        }
        p(n) = std::sqrt((2 * n + 1) / 2.0) * pn;
    }
    return p;
}

Quadrature1d quadrature_1d(QuadRule rule, Eigen::Index n) {
    if (n < 3) throw TooManyNodes("quadrature requires n >= 3");
    Quadrature1d q;
    q.nodes = Vector(n);
    q.weights = Vector(n);
    if (rule == QuadRule::Trapezoid) {
        const double h = 2.0 / static_cast<double>(n - 1);
        for (Eigen::Index i = 0; i < n; ++i) {
            q.nodes(i) = -1.0 + h * static_cast<double>(i);
            q.weights(i) = (i == 0 || i == n - 1) ? h / 2 : h;
        }
        return q;
    }
    // Golub-Welsch: nodes are eigenvalues of the Jacobi matrix, weights
    // 2 * (first eigenvector component)^2.
    Matrix J = Matrix::Zero(n, n);
    for (Eigen::Index i = 1; i < n; ++i) {
        const double b = static_cast<double>(i) / std::sqrt(4.0 * i * i - 1.0);
        J(i - 1, i) = b;
        J(i, i - 1) = b;
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(J);
    q.nodes = es.eigenvalues();
    for (Eigen::Index i = 0; i < n; ++i) {
        const double v = es.eigenvectors()(0, i);
        q.weights(i) = 2.0 * v * v;
    }
    return q;
}

namespace {

// Tensor-product grid for d in {1,2}; nodes N x d, weights length N.
void tensor_grid(const Quadrature1d& q, int dim, Matrix& nodes, Vector& weights) {
    const Eigen::Index n = q.nodes.size();
    if (dim == 1) {
        nodes = q.nodes;
        weights = q.weights;
        return;
    }
    const Eigen::Index N = n * n;
    nodes.resize(N, 2);
    weights.resize(N);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            const Eigen::Index idx = i * n + j;
            nodes(idx, 0) = q.nodes(i);
            nodes(idx, 1) = q.nodes(j);
            weights(idx) = q.weights(i) * q.weights(j);
        }
    }
}

}  // namespace

KernelOperator discretize(const Kernel& kernel, QuadRule rule, Eigen::Index n_per_dim) {
    if (kernel.dim != 1 && kernel.dim != 2) throw OutOfDomain("dimension must be 1 or 2");
    const Eigen::Index total =
        kernel.dim == 1 ? n_per_dim : n_per_dim * n_per_dim;
    if (total > kMaxDim) throw TooManyNodes("grid exceeds the node budget");

    const Quadrature1d q = quadrature_1d(rule, n_per_dim);
    Matrix nodes;
    Vector weights;
    tensor_grid(q, kernel.dim, nodes, weights);

    const Eigen::Index N = weights.size();
    const Vector sw = weights.cwiseSqrt();
    Matrix A(N, N);
    for (Eigen::Index i = 0; i < N; ++i) {
        const double xi[2] = {nodes(i, 0), kernel.dim == 2 ? nodes(i, 1) : 0.0};
        for (Eigen::Index j = 0; j <= i; ++j) {
            const double xj[2] = {nodes(j, 0), kernel.dim == 2 ? nodes(j, 1) : 0.0};
            const double g = kernel.eval(xi, xj);
            A(i, j) = A(j, i) = sw(i) * g * sw(j);
        }
    }
    return KernelOperator{kernel, std::move(nodes), weights, SpsdMatrix(std::move(A))};
}

KernelOperator legendre_projection_cov(int degree_per_dim, int dim, QuadRule rule,
                                       Eigen::Index n_per_dim) {
    if (dim != 1 && dim != 2) throw OutOfDomain("dimension must be 1 or 2");
    const Eigen::Index total = dim == 1 ? n_per_dim : n_per_dim * n_per_dim;
    if (total > kMaxDim) throw TooManyNodes("grid exceeds the node budget");

    const Quadrature1d q = quadrature_1d(rule, n_per_dim);
    Matrix nodes;
    Vector weights;
    tensor_grid(q, dim, nodes, weights);

    const Eigen::Index N = weights.size();
    const int m1 = degree_per_dim;
    const Eigen::Index m = dim == 1 ? m1 : static_cast<Eigen::Index>(m1) * m1;

    // B_ij = sqrt(w_i) p_j(x_i); A = B B^T is the projection in the
    // weighted geometry.
    Matrix B(N, m);
    for (Eigen::Index i = 0; i < N; ++i) {
        const Vector p0 = legendre_orthonormal(m1, nodes(i, 0));
        if (dim == 1) {
            B.row(i) = std::sqrt(weights(i)) * p0.transpose();
        } else {
            const Vector p1 = legendre_orthonormal(m1, nodes(i, 1));
            Eigen::Index c = 0;
            for (int a = 0; a < m1; ++a)
                for (int b = 0; b < m1; ++b) B(i, c++) = std::sqrt(weights(i)) * p0(a) * p1(b);
        }
    }
    Matrix A = B * B.transpose();
    return KernelOperator{Kernel::legendre_proj(degree_per_dim, dim), std::move(nodes),
                          std::move(weights), SpsdMatrix(std::move(A))};
}

KernelOperator mercer_truncation(const KernelOperator& op, Eigen::Index r) {
    if (r < 0 || r > op.A.dim()) throw ShapeMismatch("truncation rank out of range");
    const EigenDecomposition& d = op.A.eig();
    Matrix Ar = Matrix::Zero(op.A.dim(), op.A.dim());
    if (r > 0) {
        const Matrix V = d.eigenvectors.leftCols(r);
        Ar = V * d.eigenvalues.head(r).cwiseMax(0.0).asDiagonal() * V.transpose();
    }
    return KernelOperator{op.kernel, op.nodes, op.weights, SpsdMatrix(std::move(Ar))};
}

}  // namespace nystromkit
