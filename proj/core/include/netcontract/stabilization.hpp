#pragma once

#include <optional>

#include "netcontract/balancing.hpp"
#include "netcontract/matrix_core.hpp"

namespace netcontract {

struct StabilizeOptions {
    BalanceOptions balance;
    PerronOptions perron;
};

/// Minimal weighted diagonal perturbation l* placing the spectral abscissa of
/// A - diag(l*) at `target`, together with its certificate fields.
struct StabilizationResult {
    Vector ell_star;
    Vector d_star;        ///< Perron eigenvector of the closed loop, d_star(0) == 1
    double target = 0.0;
    double achieved = 0.0; ///< independently recomputed abscissa of A - diag(ell_star)
    double cost = 0.0;     ///< w^T ell_star
    bool positive_gains = false;
    std::size_t balance_iterations = 0;
    double balance_residual = 0.0;
    double eigen_residual = 0.0; ///< ||(A - diag l*) d* - target d*||_inf / ||d*||_inf
    bool per_block = false;      ///< produced by stabilize_per_block

    /// |achieved - target| <= 1e-8 (1 + |target|)
    bool target_met() const;
};

/// Balances diag(w) A to obtain d*, then sets
///   l* = D*^-1 A D* 1 - target 1.
/// By construction (A - diag l*) d* = target d*, so d* is the Perron vector of
/// the closed loop; balancing is what makes w^T l* minimal among all l with
/// alpha(A - diag l) <= target. `target` may exceed alpha(A), which yields
/// negative entries.
///
/// Throws Error(NonIrreducible) for reducible A (see stabilize_per_block for
/// completely reducible input) and propagates balancing failures.
StabilizationResult minimal_effort_stabilize(const MetzlerMatrix& a, const Vector& w, double target,
                                             const StabilizeOptions& options = {});

/// Extension to completely reducible A: each irreducible diagonal block is
/// stabilized to the same target and the results are concatenated.
StabilizationResult stabilize_per_block(const MetzlerMatrix& a, const Vector& w, double target,
                                        const StabilizeOptions& options = {});

struct MarginalCertificate {
    double abscissa = 0.0;
    /// Perron eigenvector d > 0 with A d = abscissa * d <= 0; absent when the
    /// abscissa exceeds the tolerance.
    std::optional<Vector> d;
    /// A d, elementwise (empty when d is absent).
    Vector slack;
};

/// Certificate that an irreducible Metzler matrix is (marginally) Hurwitz:
/// returned iff the computed abscissa is <= tol.
MarginalCertificate marginal_stability_certificate(const MetzlerMatrix& a, double tol = 1e-10,
                                                   const PerronOptions& options = {});

struct OptimalityReport {
    double abscissa = 0.0;       ///< alpha(A - diag(ell))
    double cost = 0.0;           ///< w^T ell
    bool feasible = false;       ///< abscissa <= target + tolerance
    bool balanced = false;       ///< condition (i)
    double balance_residual = 0.0;
    bool eigen_equation = false; ///< condition (ii)
    double eigen_residual = 0.0;

    bool passed() const { return feasible && balanced && eigen_equation; }
};

/// Checks the optimality conditions for a candidate perturbation `ell`:
///   (i)  diag(w) D^-1 (A - diag ell) D is balanced, with D built from the
///        closed loop's Perron eigenvector;
///   (ii) (A - diag ell) d = target d.
/// Never throws on a negative verdict; only on malformed input.
OptimalityReport verify_optimality(const MetzlerMatrix& a, const Vector& w, double target, const Vector& ell,
                                   double tol = 1e-8, const PerronOptions& options = {});

} // namespace netcontract
