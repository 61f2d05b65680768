#pragma once

#include <cstddef>
#include <optional>

#include "netcontract/matrix_core.hpp"

namespace netcontract {

/// Largest off-diagonal row/column sum mismatch,
///   max_i |r_i - c_i| / (1 + max_i (|r_i| + |c_i|)),
/// where r_i and c_i are the off-diagonal sums of row i and column i.
/// Zero exactly when the matrix is balanced.
double imbalance(const Matrix& a);

/// D^-1 A D for D = diag(d).
Matrix diagonal_similarity(const Matrix& a, const Vector& d);

struct BalanceOptions {
    double tol = 1e-10;
    std::size_t max_sweeps = 100000;
    /// Starting scaling; defaults to the all-ones vector.
    std::optional<Vector> initial;
};

struct BalancingResult {
    Vector d;          ///< positive scaling, d(0) == 1 (first index of each block for block input)
    Matrix balanced;   ///< D^-1 A D
    std::size_t iterations = 0; ///< sweeps, summed over diagonal blocks
    double residual = 0.0;      ///< imbalance(balanced)
    bool clamped = false;       ///< some scaling hit the [1e-150, 1e150] guard
};

/// Osborne-style cyclic balancing of an irreducible or completely reducible
/// Metzler matrix. Each coordinate update
///   d_i <- d_i * sqrt(r_i / c_i)
/// equalizes row i and column i of D^-1 A D and strictly decreases the
/// potential sum_ij a_ij d_j / d_i. Completely reducible input is balanced
/// block by block.
///
/// Throws Error(NotBalancable) for reducible input without a block diagonal
/// form and Error(NoConvergence) with the final imbalance when the sweep cap
/// is reached.
BalancingResult balance(const MetzlerMatrix& a, const BalanceOptions& options = {});

/// Closed-form balancing of an irreducible tridiagonal Metzler matrix:
/// d_1 = 1, d_{i+1} = d_i * sqrt(a_{i+1,i} / a_{i,i+1}); D^-1 A D is symmetric.
Vector balance_tridiagonal(const MetzlerMatrix& a);

/// f(d) = 1^T D^-1 A D 1 = sum_ij a_ij d_j / d_i. Convex in log(d) and
/// invariant under positive rescaling of d; minimized exactly at balancing
/// scalings.
double potential(const MetzlerMatrix& a, const Vector& d);

} // namespace netcontract
