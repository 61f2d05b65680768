#include "netcontract/balancing.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace netcontract {

namespace {

constexpr double kMinScale = 1e-150;
constexpr double kMaxScale = 1e150;

struct SweepResult {
    std::size_t sweeps = 0;
    bool clamped = false;
};

double imbalance_scaled(const Matrix& a, const Vector& d) {
    const Eigen::Index n = a.rows();
    double worst = 0.0;
    double scale = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        double r = 0.0;
        double c = 0.0;
        for (Eigen::Index j = 0; j < n; ++j) {
            if (j == i) continue;
            r += a(i, j) * d(j) / d(i);
            c += a(j, i) * d(i) / d(j);
        }
        worst = std::max(worst, std::abs(r - c));
        scale = std::max(scale, std::abs(r) + std::abs(c));
    }
    return worst / (1.0 + scale);
}

// Balances an irreducible block in place; d is renormalized to d(0) = 1 after
// every sweep so the overall scale cannot drift.
SweepResult osborne(const Matrix& a, Vector& d, const BalanceOptions& options, double& residual) {
    const Eigen::Index n = a.rows();
    SweepResult out;
    d /= d(0);
    residual = imbalance_scaled(a, d);
    if (n == 1 || residual <= options.tol) return out;

    while (out.sweeps < options.max_sweeps) {
        ++out.sweeps;
        for (Eigen::Index i = 0; i < n; ++i) {
            double r = 0.0;
            double c = 0.0;
            for (Eigen::Index j = 0; j < n; ++j) {
                if (j == i) continue;
                r += a(i, j) * d(j);
                c += a(j, i) / d(j);
            }
            // r = d_i * rowsum_i, c = colsum_i / d_i of the scaled matrix.
            if (r <= 0.0 || c <= 0.0) continue;
            double next = std::sqrt(r / c);
            if (next < kMinScale || next > kMaxScale) {
                next = std::clamp(next, kMinScale, kMaxScale);
                out.clamped = true;
            }
            d(i) = next;
        }
        d /= d(0);
        residual = imbalance_scaled(a, d);
        if (residual <= options.tol) return out;
    }
    std::ostringstream os;
    os << "balance: imbalance " << residual << " above tolerance " << options.tol << " after " << out.sweeps
       << " sweeps";
    throw Error(ErrorKind::NoConvergence, os.str(), residual);
}

} // namespace

double imbalance(const Matrix& a) {
    if (a.rows() != a.cols()) throw Error(ErrorKind::DimensionMismatch, "imbalance: matrix must be square");
    return imbalance_scaled(a, Vector::Ones(a.rows()));
}

Matrix diagonal_similarity(const Matrix& a, const Vector& d) {
    if (a.rows() != a.cols() || d.size() != a.rows())
        throw Error(ErrorKind::DimensionMismatch, "diagonal_similarity: dimension mismatch");
    Matrix out(a.rows(), a.cols());
    for (Eigen::Index j = 0; j < a.cols(); ++j)
        for (Eigen::Index i = 0; i < a.rows(); ++i) out(i, j) = i == j ? a(i, j) : a(i, j) * d(j) / d(i);
    return out;
}

BalancingResult balance(const MetzlerMatrix& a, const BalanceOptions& options) {
    if (!(options.tol > 0.0)) throw Error(ErrorKind::InvalidArgument, "balance: tolerance must be positive");
    const auto n = static_cast<Eigen::Index>(a.size());
    Vector d = Vector::Ones(n);
    if (options.initial) {
        if (options.initial->size() != n)
            throw Error(ErrorKind::DimensionMismatch, "balance: initial scaling has wrong length");
        if (!(options.initial->array() > 0.0).all())
            throw Error(ErrorKind::InvalidArgument, "balance: initial scaling must be positive");
        d = *options.initial;
    }

    const auto& cls = a.classification();
    BalancingResult out;
    switch (cls.kind) {
    case StructureKind::Irreducible: {
        double residual = 0.0;
        auto sweep = osborne(a.entries(), d, options, residual);
        out.iterations = sweep.sweeps;
        out.clamped = sweep.clamped;
        break;
    }
    case StructureKind::CompletelyReducible: {
        for (const auto& block : cls.blocks) {
            const auto m = static_cast<Eigen::Index>(block.size());
            Matrix sub(m, m);
            Vector sub_d(m);
            for (Eigen::Index r = 0; r < m; ++r) {
                sub_d(r) = d(static_cast<Eigen::Index>(block[r]));
                for (Eigen::Index c = 0; c < m; ++c)
                    sub(r, c) = a(block[r], block[c]);
            }
            double residual = 0.0;
            auto sweep = osborne(sub, sub_d, options, residual);
            out.iterations += sweep.sweeps;
            out.clamped = out.clamped || sweep.clamped;
            for (Eigen::Index r = 0; r < m; ++r) d(static_cast<Eigen::Index>(block[r])) = sub_d(r);
        }
        break;
    }
    default:
        throw Error(ErrorKind::NotBalancable,
                    std::string("balance: matrix is ") + to_string(cls.kind) +
                        "; only irreducible or completely reducible Metzler matrices admit a balancing scaling");
    }
    out.d = std::move(d);
    out.balanced = diagonal_similarity(a.entries(), out.d);
    out.residual = imbalance(out.balanced);
    return out;
}

Vector balance_tridiagonal(const MetzlerMatrix& a) {
    const auto n = static_cast<Eigen::Index>(a.size());
    const Matrix& m = a.entries();
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            const auto gap = i > j ? i - j : j - i;
            if (gap > 1 && m(i, j) != 0.0) {
                std::ostringstream os;
                os << "balance_tridiagonal: entry (" << i << "," << j << ") = " << m(i, j)
                   << " lies outside the tridiagonal band";
                throw Error(ErrorKind::InvalidArgument, os.str());
            }
            if (gap == 1 && !(m(i, j) > kStructuralZero)) {
                std::ostringstream os;
                os << "balance_tridiagonal: off-diagonal entry (" << i << "," << j
                   << ") must be positive for an irreducible tridiagonal matrix";
                throw Error(ErrorKind::NonIrreducible, os.str());
            }
        }
    }
    Vector d(n);
    d(0) = 1.0;
    for (Eigen::Index i = 0; i + 1 < n; ++i) d(i + 1) = d(i) * std::sqrt(m(i + 1, i) / m(i, i + 1));
    return d;
}

double potential(const MetzlerMatrix& a, const Vector& d) {
    const auto n = static_cast<Eigen::Index>(a.size());
    if (d.size() != n) throw Error(ErrorKind::DimensionMismatch, "potential: scaling has wrong length");
    if (!(d.array() > 0.0).all()) throw Error(ErrorKind::InvalidArgument, "potential: scaling must be positive");
    double sum = 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) sum += a(i, j) * d(j) / d(i);
    return sum;
}

} // namespace netcontract
