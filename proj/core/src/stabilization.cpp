#include "netcontract/stabilization.hpp"

#include <cmath>
#include <limits>

namespace netcontract {

namespace {

void check_weights(const MetzlerMatrix& a, const Vector& w, const char* who) {
    if (w.size() != static_cast<Eigen::Index>(a.size()))
        throw Error(ErrorKind::DimensionMismatch, std::string(who) + ": weight vector has wrong length");
    if (!(w.array() > 0.0).all() || !w.allFinite())
        throw Error(ErrorKind::InvalidArgument, std::string(who) + ": weights must be positive and finite");
}

Matrix closed_loop(const MetzlerMatrix& a, const Vector& ell) {
    Matrix c = a.entries();
    c.diagonal() -= ell;
    return c;
}

double relative_eigen_residual(const Matrix& c, const Vector& d, double value) {
    return (c * d - value * d).cwiseAbs().maxCoeff() / d.cwiseAbs().maxCoeff();
}

} // namespace

bool StabilizationResult::target_met() const {
    return std::abs(achieved - target) <= 1e-8 * (1.0 + std::abs(target));
}

StabilizationResult minimal_effort_stabilize(const MetzlerMatrix& a, const Vector& w, double target,
                                             const StabilizeOptions& options) {
    check_weights(a, w, "minimal_effort_stabilize");
    const auto& cls = a.classification();
    if (cls.kind != StructureKind::Irreducible) {
        std::string hint = cls.kind == StructureKind::CompletelyReducible
                               ? "; use stabilize_per_block for completely reducible input"
                               : "";
        throw Error(ErrorKind::NonIrreducible,
                    std::string("minimal_effort_stabilize: matrix is ") + to_string(cls.kind) + hint);
    }

    // Diagonal entries do not affect balancing, so diag(w) A is balanced by
    // the same d* as diag(w) (A - target I).
    MetzlerMatrix weighted(w.asDiagonal() * a.entries());
    auto balanced = balance(weighted, options.balance);

    StabilizationResult out;
    out.d_star = balanced.d;
    out.target = target;
    out.balance_iterations = balanced.iterations;
    out.balance_residual = balanced.residual;
    out.ell_star = diagonal_similarity(a.entries(), out.d_star).rowwise().sum();
    out.ell_star.array() -= target;
    out.cost = w.dot(out.ell_star);
    out.positive_gains = (out.ell_star.array() > 0.0).all();

    const Matrix c = closed_loop(a, out.ell_star);
    out.eigen_residual = relative_eigen_residual(c, out.d_star, target);
    out.achieved = spectral_abscissa(MetzlerMatrix(c), options.perron);
    return out;
}

StabilizationResult stabilize_per_block(const MetzlerMatrix& a, const Vector& w, double target,
                                        const StabilizeOptions& options) {
    check_weights(a, w, "stabilize_per_block");
    const auto& cls = a.classification();
    if (cls.kind == StructureKind::Irreducible) return minimal_effort_stabilize(a, w, target, options);
    if (cls.kind != StructureKind::CompletelyReducible)
        throw Error(ErrorKind::NotBalancable, std::string("stabilize_per_block: matrix is ") + to_string(cls.kind) +
                                                  "; per-block stabilization needs a block diagonal form");

    const auto n = static_cast<Eigen::Index>(a.size());
    StabilizationResult out;
    out.ell_star.resize(n);
    out.d_star.resize(n);
    out.target = target;
    out.per_block = true;
    out.achieved = -std::numeric_limits<double>::infinity();
    for (const auto& block : cls.blocks) {
        const auto m = static_cast<Eigen::Index>(block.size());
        Matrix sub(m, m);
        Vector sub_w(m);
        for (Eigen::Index r = 0; r < m; ++r) {
            sub_w(r) = w(static_cast<Eigen::Index>(block[r]));
            for (Eigen::Index c = 0; c < m; ++c) sub(r, c) = a(block[r], block[c]);
        }
        auto part = minimal_effort_stabilize(MetzlerMatrix(std::move(sub)), sub_w, target, options);
        for (Eigen::Index r = 0; r < m; ++r) {
            out.ell_star(static_cast<Eigen::Index>(block[r])) = part.ell_star(r);
            out.d_star(static_cast<Eigen::Index>(block[r])) = part.d_star(r);
        }
        out.achieved = std::max(out.achieved, part.achieved);
        out.balance_iterations += part.balance_iterations;
        out.balance_residual = std::max(out.balance_residual, part.balance_residual);
    }
    out.cost = w.dot(out.ell_star);
    out.positive_gains = (out.ell_star.array() > 0.0).all();
    out.eigen_residual = relative_eigen_residual(closed_loop(a, out.ell_star), out.d_star, target);
    return out;
}

MarginalCertificate marginal_stability_certificate(const MetzlerMatrix& a, double tol, const PerronOptions& options) {
    auto pp = perron_pair(a, options);
    MarginalCertificate out;
    out.abscissa = pp.abscissa;
    if (pp.abscissa <= tol) {
        out.slack = a.entries() * pp.eigenvector;
        out.d = std::move(pp.eigenvector);
    }
    return out;
}

OptimalityReport verify_optimality(const MetzlerMatrix& a, const Vector& w, double target, const Vector& ell,
                                   double tol, const PerronOptions& options) {
    check_weights(a, w, "verify_optimality");
    if (ell.size() != w.size())
        throw Error(ErrorKind::DimensionMismatch, "verify_optimality: perturbation has wrong length");
    const Matrix c = closed_loop(a, ell);
    auto pp = perron_pair(MetzlerMatrix(c), options);

    OptimalityReport out;
    const double slack = tol * (1.0 + std::abs(target));
    out.abscissa = pp.abscissa;
    out.cost = w.dot(ell);
    out.feasible = pp.abscissa <= target + slack;
    out.balance_residual = imbalance(w.asDiagonal() * diagonal_similarity(c, pp.eigenvector));
    out.balanced = out.balance_residual <= tol;
    out.eigen_residual = relative_eigen_residual(c, pp.eigenvector, target);
    out.eigen_equation = out.eigen_residual <= slack;
    return out;
}

} // namespace netcontract
