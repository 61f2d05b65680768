#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "netcontract/matrix_core.hpp"
#include "netcontract/stabilization.hpp"

namespace netcontract {

/// Norm on one block of the state: |z| = |T z|_kind with T = diag(scaling).
struct BlockNorm {
    NormKind kind = NormKind::Two;
    std::optional<Vector> scaling;
};

/// Split of R^n into m consecutive blocks, each with its own norm.
class BlockPartition {
public:
    BlockPartition(std::vector<std::size_t> sizes, std::vector<BlockNorm> norms);
    /// Same norm on every block.
    BlockPartition(std::vector<std::size_t> sizes, NormKind norm);

    std::size_t blocks() const noexcept { return sizes_.size(); }
    std::size_t dimension() const noexcept { return dimension_; }
    std::size_t size(std::size_t block) const { return sizes_.at(block); }
    std::size_t offset(std::size_t block) const { return offsets_.at(block); }
    const BlockNorm& norm(std::size_t block) const { return norms_.at(block); }

    /// Parses "2,2,3" style sizes and "2,2,inf" style norm lists. A single
    /// norm is broadcast to every block.
    static BlockPartition parse(const std::string& sizes, const std::string& norms);

private:
    std::vector<std::size_t> sizes_;
    std::vector<std::size_t> offsets_;
    std::vector<BlockNorm> norms_;
    std::size_t dimension_ = 0;
};

/// Reduced m x m matrix with B_ii = mu_i(A^ii) and B_ij = ||A^ij||_ij, the
/// operator norm from block j's norm to block i's norm. mu(A) <= mu_0(B) for
/// the composite norm built from the block norms and any monotonic outer
/// norm. Metzler by construction.
MetzlerMatrix block_bound_matrix(const Matrix& a, const BlockPartition& partition);

/// Axis-aligned box in state space.
struct Box {
    Vector lower;
    Vector upper;
};

struct JacobianBound {
    enum class Provenance { ClosedForm, Sampled };

    Matrix j_hat;
    Provenance provenance = Provenance::ClosedForm;
    std::size_t sample_count = 0;
    std::optional<Box> domain;

    /// Sampled bounds estimate the supremum from below and certify nothing.
    bool certified() const { return provenance == Provenance::ClosedForm; }
};

/// Wraps a bound that the caller derived analytically.
JacobianBound closed_form_bound(Matrix j_hat);

using JacobianSampler = std::function<Matrix(double t, const Vector& x)>;

struct SamplingOptions {
    std::size_t samples = 10000;
    std::vector<double> t_grid{0.0};
    std::uint64_t seed = 0;
    /// Box corners are added when the dimension is at most this value.
    std::size_t max_corner_dimension = 16;
};

/// Elementwise max of block_bound_matrix(J(t, x)) over uniform samples of the
/// box, its center and (for small dimension) its corners, at every time in
/// the grid. The sampler returns the full n x n Jacobian.
JacobianBound jacobian_sup_estimate(const JacobianSampler& sampler, const BlockPartition& partition, const Box& domain,
                                    const SamplingOptions& options = {});

struct GainSynthesisResult {
    Vector v_star;  ///< local gains u_i = v_i
    Vector d;       ///< balancing scaling of diag(w) J_hat
    double rate = 0.0;
    double cost = 0.0;
    double closed_loop_abscissa = 0.0; ///< alpha(J_hat - diag v*), equals -rate
};

/// Minimal w^T v with alpha(J_hat - diag v) <= -eta:
///   v* = D^-1 J_hat D 1 + eta 1,
/// with D balancing diag(w) J_hat. Requires J_hat irreducible and
/// J_hat + eta I >= 0 (Error(HypothesisViolated) otherwise), which makes
/// every gain positive.
GainSynthesisResult synthesize_gains(const MetzlerMatrix& j_hat, const Vector& w, double eta,
                                     const StabilizeOptions& options = {});

/// Closed form of synthesize_gains for tridiagonal J_hat and w = 1:
///   v*_i = eta + J_ii + sqrt(J_{i,i+1} J_{i+1,i}) + sqrt(J_{i-1,i} J_{i,i-1}),
/// with the missing neighbour term dropped at either end.
Vector tridiagonal_gains(const MetzlerMatrix& j_hat, double eta);

/// |x| = max_i |x^i|_i / weights_i, the weighted max-norm over block norms.
/// With weights equal to the Perron vector of an irreducible B its induced
/// measure of B equals alpha(B).
double composite_norm(const Vector& x, const BlockPartition& partition, const Vector& weights);

} // namespace netcontract
