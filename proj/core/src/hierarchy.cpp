#include "netcontract/hierarchy.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace netcontract {

namespace {

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(text);
    while (std::getline(in, item, ',')) {
        item.erase(std::remove_if(item.begin(), item.end(), [](unsigned char c) { return std::isspace(c); }),
                   item.end());
        out.push_back(item);
    }
    return out;
}

double block_vector_norm(const Vector& z, const BlockNorm& norm) {
    Vector s = norm.scaling ? Vector(norm.scaling->cwiseProduct(z)) : z;
    switch (norm.kind) {
    case NormKind::One: return s.cwiseAbs().sum();
    case NormKind::Two: return s.norm();
    case NormKind::Inf: return s.cwiseAbs().maxCoeff();
    }
    return 0.0;
}

void check_hypothesis(const MetzlerMatrix& j_hat, double eta, const char* who) {
    if (!(eta > 0.0)) throw Error(ErrorKind::InvalidArgument, std::string(who) + ": rate must be positive");
    for (std::size_t i = 0; i < j_hat.size(); ++i) {
        if (j_hat(i, i) + eta < 0.0) {
            std::ostringstream os;
            os << who << ": J_hat + eta I >= 0 violated at (" << i << "," << i << "): " << j_hat(i, i) << " + " << eta
               << " < 0";
            throw Error(ErrorKind::HypothesisViolated, os.str());
        }
    }
}

} // namespace

BlockPartition::BlockPartition(std::vector<std::size_t> sizes, std::vector<BlockNorm> norms)
    : sizes_(std::move(sizes)), norms_(std::move(norms)) {
    if (sizes_.empty()) throw Error(ErrorKind::InvalidArgument, "BlockPartition: no blocks");
    if (norms_.size() != sizes_.size())
        throw Error(ErrorKind::DimensionMismatch, "BlockPartition: need one norm per block");
    offsets_.reserve(sizes_.size());
    for (std::size_t b = 0; b < sizes_.size(); ++b) {
        if (sizes_[b] == 0) throw Error(ErrorKind::InvalidArgument, "BlockPartition: empty block");
        const auto& scaling = norms_[b].scaling;
        if (scaling) {
            if (static_cast<std::size_t>(scaling->size()) != sizes_[b])
                throw Error(ErrorKind::DimensionMismatch, "BlockPartition: scaling does not match block size");
            if (!(scaling->array() > 0.0).all())
                throw Error(ErrorKind::InvalidArgument, "BlockPartition: scaling must be positive");
        }
        offsets_.push_back(dimension_);
        dimension_ += sizes_[b];
    }
}

BlockPartition::BlockPartition(std::vector<std::size_t> sizes, NormKind norm)
    : BlockPartition(sizes, std::vector<BlockNorm>(sizes.size(), BlockNorm{norm, std::nullopt})) {}

BlockPartition BlockPartition::parse(const std::string& sizes, const std::string& norms) {
    std::vector<std::size_t> parsed_sizes;
    for (const auto& item : split_list(sizes)) {
        std::size_t pos = 0;
        long value = 0;
        try {
            value = std::stol(item, &pos);
        } catch (const std::exception&) {
            pos = 0;
        }
        if (pos != item.size() || item.empty() || value <= 0)
            throw Error(ErrorKind::Parse, "partition: '" + item + "' is not a positive block size");
        parsed_sizes.push_back(static_cast<std::size_t>(value));
    }
    std::vector<BlockNorm> parsed_norms;
    for (const auto& item : split_list(norms)) parsed_norms.push_back({parse_norm_kind(item), std::nullopt});
    if (parsed_norms.size() == 1 && parsed_sizes.size() > 1) parsed_norms.resize(parsed_sizes.size(), parsed_norms[0]);
    return BlockPartition(std::move(parsed_sizes), std::move(parsed_norms));
}

MetzlerMatrix block_bound_matrix(const Matrix& a, const BlockPartition& partition) {
    if (a.rows() != a.cols() || static_cast<std::size_t>(a.rows()) != partition.dimension()) {
        std::ostringstream os;
        os << "block_bound_matrix: partition covers " << partition.dimension() << " states, matrix is " << a.rows()
           << "x" << a.cols();
        throw Error(ErrorKind::DimensionMismatch, os.str());
    }
    const auto m = static_cast<Eigen::Index>(partition.blocks());
    Matrix b(m, m);
    for (Eigen::Index i = 0; i < m; ++i) {
        const auto bi = static_cast<std::size_t>(i);
        const auto ri = static_cast<Eigen::Index>(partition.offset(bi));
        const auto ni = static_cast<Eigen::Index>(partition.size(bi));
        const auto& norm_i = partition.norm(bi);
        for (Eigen::Index j = 0; j < m; ++j) {
            const auto bj = static_cast<std::size_t>(j);
            const auto cj = static_cast<Eigen::Index>(partition.offset(bj));
            const auto nj = static_cast<Eigen::Index>(partition.size(bj));
            Matrix block = a.block(ri, cj, ni, nj);
            if (i == j) {
                b(i, i) = matrix_measure(block, norm_i.kind, norm_i.scaling);
                continue;
            }
            // |z|_k = |T_k z| turns the operator norm into that of T_i A^ij T_j^-1.
            const auto& norm_j = partition.norm(bj);
            if (norm_i.scaling) block = norm_i.scaling->asDiagonal() * block;
            if (norm_j.scaling) block = block * norm_j.scaling->cwiseInverse().asDiagonal();
            b(i, j) = induced_norm(block, norm_j.kind, norm_i.kind);
        }
    }
    return MetzlerMatrix(std::move(b));
}

JacobianBound closed_form_bound(Matrix j_hat) {
    JacobianBound out;
    out.j_hat = MetzlerMatrix(std::move(j_hat)).entries();
    out.provenance = JacobianBound::Provenance::ClosedForm;
    return out;
}

JacobianBound jacobian_sup_estimate(const JacobianSampler& sampler, const BlockPartition& partition, const Box& domain,
                                    const SamplingOptions& options) {
    const auto n = static_cast<Eigen::Index>(partition.dimension());
    if (domain.lower.size() != n || domain.upper.size() != n)
        throw Error(ErrorKind::DimensionMismatch, "jacobian_sup_estimate: box dimension does not match partition");
    if (!(domain.lower.array() <= domain.upper.array()).all())
        throw Error(ErrorKind::InvalidArgument, "jacobian_sup_estimate: box lower bound exceeds upper bound");
    if (options.t_grid.empty()) throw Error(ErrorKind::InvalidArgument, "jacobian_sup_estimate: empty time grid");

    std::vector<Vector> points;
    points.push_back(0.5 * (domain.lower + domain.upper));
    if (static_cast<std::size_t>(n) <= options.max_corner_dimension) {
        const std::uint64_t corners = std::uint64_t{1} << n;
        for (std::uint64_t mask = 0; mask < corners; ++mask) {
            Vector x(n);
            for (Eigen::Index k = 0; k < n; ++k) x(k) = (mask >> k) & 1U ? domain.upper(k) : domain.lower(k);
            points.push_back(std::move(x));
        }
    }
    std::mt19937_64 rng(options.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (std::size_t s = 0; s < options.samples; ++s) {
        Vector x(n);
        for (Eigen::Index k = 0; k < n; ++k)
            x(k) = domain.lower(k) + unit(rng) * (domain.upper(k) - domain.lower(k));
        points.push_back(std::move(x));
    }

    JacobianBound out;
    out.provenance = JacobianBound::Provenance::Sampled;
    out.domain = domain;
    bool first = true;
    for (double t : options.t_grid) {
        for (const auto& x : points) {
            const Matrix jac = sampler(t, x);
            const Matrix b = block_bound_matrix(jac, partition).entries();
            if (first) {
                out.j_hat = b;
                first = false;
            } else {
                out.j_hat = out.j_hat.cwiseMax(b);
            }
            ++out.sample_count;
        }
    }
    return out;
}

GainSynthesisResult synthesize_gains(const MetzlerMatrix& j_hat, const Vector& w, double eta,
                                     const StabilizeOptions& options) {
    check_hypothesis(j_hat, eta, "synthesize_gains");
    auto stab = minimal_effort_stabilize(j_hat, w, -eta, options);
    GainSynthesisResult out;
    out.v_star = std::move(stab.ell_star);
    out.d = std::move(stab.d_star);
    out.rate = eta;
    out.cost = stab.cost;
    out.closed_loop_abscissa = stab.achieved;
    return out;
}

Vector tridiagonal_gains(const MetzlerMatrix& j_hat, double eta) {
    balance_tridiagonal(j_hat); // structure checks
    check_hypothesis(j_hat, eta, "tridiagonal_gains");
    const auto m = static_cast<Eigen::Index>(j_hat.size());
    const Matrix& j = j_hat.entries();
    Vector v(m);
    for (Eigen::Index i = 0; i < m; ++i) {
        double value = eta + j(i, i);
        if (i + 1 < m) value += std::sqrt(j(i, i + 1) * j(i + 1, i));
        if (i > 0) value += std::sqrt(j(i - 1, i) * j(i, i - 1));
        v(i) = value;
    }
    return v;
}

double composite_norm(const Vector& x, const BlockPartition& partition, const Vector& weights) {
    if (static_cast<std::size_t>(x.size()) != partition.dimension() ||
        static_cast<std::size_t>(weights.size()) != partition.blocks())
        throw Error(ErrorKind::DimensionMismatch, "composite_norm: dimension mismatch");
    double out = 0.0;
    for (std::size_t b = 0; b < partition.blocks(); ++b) {
        const Vector xb = x.segment(static_cast<Eigen::Index>(partition.offset(b)),
                                    static_cast<Eigen::Index>(partition.size(b)));
        out = std::max(out, block_vector_norm(xb, partition.norm(b)) / weights(static_cast<Eigen::Index>(b)));
    }
    return out;
}

} // namespace netcontract
