#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "netcontract/error.hpp"

namespace netcontract {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Off-diagonal magnitudes below this are structural zeros for graph analysis.
inline constexpr double kStructuralZero = 1e-14;

enum class NormKind { One, Two, Inf };

const char* to_string(NormKind norm) noexcept;
/// Accepts "1", "one", "2", "two", "inf", "infinity" (case-insensitive).
NormKind parse_norm_kind(const std::string& text);

enum class StructureKind { NotMetzler, Irreducible, CompletelyReducible, ReducibleOther };

const char* to_string(StructureKind kind) noexcept;

/// Graph-structure classification of a square matrix. `blocks` holds the
/// strongly connected components (sorted index sets, ordered by smallest
/// index) for every Metzler input; for CompletelyReducible they are the
/// irreducible diagonal blocks.
struct Classification {
    StructureKind kind = StructureKind::NotMetzler;
    std::vector<std::vector<std::size_t>> blocks;
};

bool is_metzler(const Matrix& a) noexcept;

/// Strongly connected components of the digraph with edge j -> i whenever
/// |a(i, j)| > kStructuralZero, i != j.
std::vector<std::vector<std::size_t>> strongly_connected_components(const Matrix& a);

Classification classify(const Matrix& a);

/// Dense square matrix with a validated Metzler sign pattern. The
/// classification is computed on first request and cached.
class MetzlerMatrix {
public:
    /// Throws Error(NotMetzler) on a negative off-diagonal entry and
    /// Error(DimensionMismatch) on non-square input.
    explicit MetzlerMatrix(Matrix entries);

    std::size_t size() const noexcept { return static_cast<std::size_t>(entries_.rows()); }
    const Matrix& entries() const noexcept { return entries_; }
    double operator()(std::size_t i, std::size_t j) const {
        return entries_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }

    const Classification& classification() const;
    bool is_irreducible() const { return classification().kind == StructureKind::Irreducible; }

private:
    Matrix entries_;
    mutable std::optional<Classification> classification_;
};

struct PerronOptions {
    double tol = 1e-10;
    std::size_t max_iterations = 100000;
};

/// Perron root and positive eigenvector of an irreducible Metzler matrix.
/// The eigenvector is normalized so that its first entry is 1.
struct PerronPair {
    double abscissa = 0.0;
    Vector eigenvector;
    std::size_t iterations = 0;
    double residual = 0.0; ///< ||A d - abscissa d||_inf / ||d||_inf
};

/// Throws Error(NonIrreducible) for reducible input and Error(NoConvergence)
/// when the iteration cap is reached.
PerronPair perron_pair(const MetzlerMatrix& a, const PerronOptions& options = {});

struct AbscissaReport {
    double value = 0.0;
    std::size_t iterations = 0;
    /// Set when the input was neither irreducible nor completely reducible and
    /// the value came from the strongly connected components of a block
    /// triangular form.
    bool reducible_fallback = false;
};

AbscissaReport spectral_abscissa_report(const MetzlerMatrix& a, const PerronOptions& options = {});

inline double spectral_abscissa(const MetzlerMatrix& a, const PerronOptions& options = {}) {
    return spectral_abscissa_report(a, options).value;
}

/// Logarithmic norm of `a` for the chosen vector norm. With a positive
/// diagonal `scaling` T the measure is the one induced by |x| = |T x|, i.e.
/// the plain measure of T A T^-1.
double matrix_measure(const Matrix& a, NormKind norm, const std::optional<Vector>& scaling = std::nullopt);

/// Largest eigenvalue of a symmetric matrix.
double symmetric_max_eigenvalue(const Matrix& s);

/// Operator norm of `a` from (R^cols, |.|_from) to (R^rows, |.|_to).
/// Exact for every pair except inf->1, inf->2 and 2->1, which are exact by
/// vertex enumeration up to kExactVertexDim columns (resp. rows for 2->1)
/// and otherwise replaced by a guaranteed upper bound.
double induced_norm(const Matrix& a, NormKind from, NormKind to);

inline constexpr std::size_t kExactVertexDim = 16;

} // namespace netcontract
