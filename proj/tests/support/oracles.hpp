#pragma once

// Test-only reference computations. Nothing here calls into the power
// iteration or the balancing code it is used to check.

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

namespace oracle {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Rng = std::mt19937_64;

/// Spectral abscissa from a dense nonsymmetric QR eigensolver.
inline double abscissa(const Matrix& a) {
    Eigen::EigenSolver<Matrix> solver(a, false);
    return solver.eigenvalues().real().maxCoeff();
}

inline double uniform(Rng& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

/// Irreducible Metzler matrix: a random Hamiltonian cycle guarantees strong
/// connectivity, extra edges appear with probability `density`.
inline Matrix random_irreducible_metzler(int n, Rng& rng, double density = 0.4, double diag_lo = -3.0,
                                         double diag_hi = 3.0) {
    Matrix a = Matrix::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        a(i, i) = uniform(rng, diag_lo, diag_hi);
        for (int j = 0; j < n; ++j)
            if (i != j && uniform(rng, 0.0, 1.0) < density) a(i, j) = uniform(rng, 0.05, 1.0);
    }
    std::vector<int> perm(n);
    for (int i = 0; i < n; ++i) perm[i] = i;
    std::shuffle(perm.begin(), perm.end(), rng);
    for (int k = 0; k < n && n > 1; ++k) {
        const int from = perm[k];
        const int to = perm[(k + 1) % n];
        a(to, from) = std::max(a(to, from), uniform(rng, 0.1, 1.0));
    }
    return a;
}

inline Matrix random_irreducible_tridiagonal(int n, Rng& rng, double diag_lo = -2.0, double diag_hi = 2.0) {
    Matrix a = Matrix::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        a(i, i) = uniform(rng, diag_lo, diag_hi);
        if (i + 1 < n) {
            a(i, i + 1) = uniform(rng, 0.1, 5.0);
            a(i + 1, i) = uniform(rng, 0.1, 5.0);
        }
    }
    return a;
}

inline Vector random_positive(int n, Rng& rng, double lo = 0.1, double hi = 10.0) {
    Vector v(n);
    for (int i = 0; i < n; ++i) v(i) = uniform(rng, lo, hi);
    return v;
}

/// Gradient of g -> sum_ij a_ij exp(g_j - g_i): column sum minus row sum of
/// the scaled off-diagonal part.
inline Vector log_potential_gradient(const Matrix& a, const Vector& d) {
    const int n = static_cast<int>(a.rows());
    Vector grad = Vector::Zero(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (i != j) {
                const double term = a(i, j) * d(j) / d(i);
                grad(j) += term;
                grad(i) -= term;
            }
    return grad;
}

inline double potential(const Matrix& a, const Vector& d) {
    double s = 0.0;
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) s += a(i, j) * d(j) / d(i);
    return s;
}

/// Minimizes w^T l subject to alpha(A - diag l) <= target by exact coordinate
/// line search on the convex reduced cost
///   g(u) = w^T u + (sum w) alpha(A - diag u),  u_0 = 0,
/// then sets l = u + (alpha(A - diag u) - target) 1. Uses only the QR
/// eigensolver. Intended for n <= 4.
inline Vector stabilization_by_search(const Matrix& a, const Vector& w, double target) {
    const int n = static_cast<int>(a.rows());
    const double wsum = w.sum();
    auto alpha_of = [&](const Vector& u) {
        Matrix c = a;
        c.diagonal() -= u;
        return abscissa(c);
    };
    auto cost = [&](const Vector& u) { return w.dot(u) + wsum * alpha_of(u); };
    Vector u = Vector::Zero(n);
    const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double width = 10.0 * (1.0 + a.cwiseAbs().maxCoeff());
    for (int cycle = 0; cycle < 400; ++cycle) {
        Vector before = u;
        for (int k = 1; k < n; ++k) {
            double lo = u(k) - width, hi = u(k) + width;
            Vector p = u, q = u;
            double x1 = hi - phi * (hi - lo), x2 = lo + phi * (hi - lo);
            p(k) = x1;
            q(k) = x2;
            double f1 = cost(p), f2 = cost(q);
            while (hi - lo > 1e-12 * (1.0 + std::abs(u(k)))) {
                if (f1 < f2) {
                    hi = x2;
                    x2 = x1;
                    f2 = f1;
                    x1 = hi - phi * (hi - lo);
                    p(k) = x1;
                    f1 = cost(p);
                } else {
                    lo = x1;
                    x1 = x2;
                    f1 = f2;
                    x2 = lo + phi * (hi - lo);
                    q(k) = x2;
                    f2 = cost(q);
                }
            }
            u(k) = 0.5 * (lo + hi);
        }
        const double moved = (u - before).cwiseAbs().maxCoeff();
        width = std::max(10.0 * moved, 1e-6);
        if (moved < 1e-11) break;
    }
    Vector ell = u;
    ell.array() += alpha_of(u) - target;
    return ell;
}

/// Stationarity residual of w^T l at a point on the boundary alpha(A - diag l)
/// = target: the gradient of alpha with respect to -l is y o x / (y^T x) for
/// left and right Perron vectors y, x, so an optimum has w proportional to
/// y o x. Returns max_i |w_i / sum(w) - y_i x_i / y^T x|.
inline double stationarity_residual(const Matrix& a, const Vector& w, const Vector& ell) {
    Matrix c = a;
    c.diagonal() -= ell;
    auto perron = [](const Matrix& m) {
        Eigen::EigenSolver<Matrix> solver(m, true);
        Eigen::Index k = 0;
        solver.eigenvalues().real().maxCoeff(&k);
        Vector v = solver.eigenvectors().col(k).real();
        return Vector(v.sum() < 0 ? Vector(-v) : v);
    };
    const Vector x = perron(c);
    const Vector y = perron(c.transpose());
    const Vector share = x.cwiseProduct(y) / y.dot(x);
    return (w / w.sum() - share).cwiseAbs().maxCoeff();
}

/// exp(A t) x0 for the linear system x' = A x.
inline Matrix propagator(const Matrix& a, double dt) { return (a * dt).exp(); }

} // namespace oracle
