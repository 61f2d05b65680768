#include "netcontract/matrix_core.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <sstream>

namespace netcontract {

const char* to_string(ErrorKind kind) noexcept {
    switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::NotMetzler: return "NotMetzler";
    case ErrorKind::NonIrreducible: return "NonIrreducible";
    case ErrorKind::NotBalancable: return "NotBalancable";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::HypothesisViolated: return "HypothesisViolated";
    case ErrorKind::Diverged: return "Diverged";
    case ErrorKind::Parse: return "Parse";
    case ErrorKind::Io: return "Io";
    }
    return "Unknown";
}

const char* to_string(NormKind norm) noexcept {
    switch (norm) {
    case NormKind::One: return "1";
    case NormKind::Two: return "2";
    case NormKind::Inf: return "inf";
    }
    return "?";
}

NormKind parse_norm_kind(const std::string& text) {
    std::string t;
    for (char ch : text) {
        if (!std::isspace(static_cast<unsigned char>(ch)))
            t.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
    }
    if (t == "1" || t == "one" || t == "l1") return NormKind::One;
    if (t == "2" || t == "two" || t == "l2") return NormKind::Two;
    if (t == "inf" || t == "infinity" || t == "linf" || t == "max") return NormKind::Inf;
    throw Error(ErrorKind::Parse, "unknown norm '" + text + "' (expected 1, 2 or inf)");
}

const char* to_string(StructureKind kind) noexcept {
    switch (kind) {
    case StructureKind::NotMetzler: return "NotMetzler";
    case StructureKind::Irreducible: return "Irreducible";
    case StructureKind::CompletelyReducible: return "CompletelyReducible";
    case StructureKind::ReducibleOther: return "ReducibleOther";
    }
    return "?";
}

namespace {

void require_square(const Matrix& a, const char* what) {
    if (a.rows() != a.cols()) {
        std::ostringstream os;
        os << what << ": matrix must be square, got " << a.rows() << "x" << a.cols();
        throw Error(ErrorKind::DimensionMismatch, os.str());
    }
}

bool has_edge(const Matrix& a, Eigen::Index i, Eigen::Index j) {
    return i != j && std::abs(a(i, j)) > kStructuralZero;
}

// Iterative DFS over `succ`, appending vertices to `order` in post-order.
void dfs_postorder(std::size_t root, const std::vector<std::vector<std::size_t>>& succ,
                   std::vector<char>& seen, std::vector<std::size_t>& order) {
    std::vector<std::pair<std::size_t, std::size_t>> stack{{root, 0}};
    seen[root] = 1;
    while (!stack.empty()) {
        auto& [v, next] = stack.back();
        if (next < succ[v].size()) {
            std::size_t u = succ[v][next++];
            if (!seen[u]) {
                seen[u] = 1;
                stack.emplace_back(u, 0);
            }
        } else {
            order.push_back(v);
            stack.pop_back();
        }
    }
}

Matrix principal_submatrix(const Matrix& a, const std::vector<std::size_t>& idx) {
    const auto m = static_cast<Eigen::Index>(idx.size());
    Matrix sub(m, m);
    for (Eigen::Index r = 0; r < m; ++r)
        for (Eigen::Index c = 0; c < m; ++c)
            sub(r, c) = a(static_cast<Eigen::Index>(idx[r]), static_cast<Eigen::Index>(idx[c]));
    return sub;
}

} // namespace

bool is_metzler(const Matrix& a) noexcept {
    if (a.rows() != a.cols()) return false;
    for (Eigen::Index j = 0; j < a.cols(); ++j)
        for (Eigen::Index i = 0; i < a.rows(); ++i)
            if (i != j && !(a(i, j) >= 0.0)) return false;
    return true;
}

// Kosaraju: post-order on the forward graph, then sweep the transpose graph in
// reverse post-order.
std::vector<std::vector<std::size_t>> strongly_connected_components(const Matrix& a) {
    require_square(a, "strongly_connected_components");
    const auto n = static_cast<std::size_t>(a.rows());
    std::vector<std::vector<std::size_t>> succ(n), pred(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (has_edge(a, static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))) {
                succ[j].push_back(i);
                pred[i].push_back(j);
            }
        }
    }
    std::vector<char> seen(n, 0);
    std::vector<std::size_t> order;
    order.reserve(n);
    for (std::size_t v = 0; v < n; ++v)
        if (!seen[v]) dfs_postorder(v, succ, seen, order);

    std::fill(seen.begin(), seen.end(), 0);
    std::vector<std::vector<std::size_t>> components;
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        if (seen[*it]) continue;
        std::vector<std::size_t> comp;
        dfs_postorder(*it, pred, seen, comp);
        std::sort(comp.begin(), comp.end());
        components.push_back(std::move(comp));
    }
    std::sort(components.begin(), components.end(),
              [](const auto& x, const auto& y) { return x.front() < y.front(); });
    return components;
}

Classification classify(const Matrix& a) {
    require_square(a, "classify");
    if (a.rows() == 0) throw Error(ErrorKind::InvalidArgument, "classify: empty matrix");
    Classification out;
    if (!is_metzler(a)) return out;

    out.blocks = strongly_connected_components(a);
    if (out.blocks.size() == 1) {
        out.kind = StructureKind::Irreducible;
        return out;
    }
    std::vector<std::size_t> owner(static_cast<std::size_t>(a.rows()));
    for (std::size_t b = 0; b < out.blocks.size(); ++b)
        for (std::size_t v : out.blocks[b]) owner[v] = b;
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            if (has_edge(a, i, j) && owner[static_cast<std::size_t>(i)] != owner[static_cast<std::size_t>(j)]) {
                out.kind = StructureKind::ReducibleOther;
                return out;
            }
        }
    }
    out.kind = StructureKind::CompletelyReducible;
    return out;
}

MetzlerMatrix::MetzlerMatrix(Matrix entries) : entries_(std::move(entries)) {
    require_square(entries_, "MetzlerMatrix");
    if (entries_.rows() == 0) throw Error(ErrorKind::InvalidArgument, "MetzlerMatrix: empty matrix");
    for (Eigen::Index j = 0; j < entries_.cols(); ++j) {
        for (Eigen::Index i = 0; i < entries_.rows(); ++i) {
            if (i != j && !(entries_(i, j) >= 0.0)) {
                std::ostringstream os;
                os << "MetzlerMatrix: off-diagonal entry (" << i << "," << j << ") = " << entries_(i, j)
                   << " is negative";
                throw Error(ErrorKind::NotMetzler, os.str());
            }
        }
    }
}

const Classification& MetzlerMatrix::classification() const {
    if (!classification_) classification_ = classify(entries_);
    return *classification_;
}

namespace {

// Power iteration on A + rI, r = 1 + max|a_ii|. The shifted matrix is
// nonnegative, irreducible and has a positive diagonal, hence primitive.
// Stops on the Collatz-Wielandt bracket min_i (Sx)_i/x_i <= rho <= max_i (Sx)_i/x_i
// or, when tiny Perron components make the bracket noisy, on the residual.
PerronPair perron_power_iteration(const Matrix& a, const PerronOptions& options) {
    const Eigen::Index n = a.rows();
    PerronPair out;
    if (n == 1) {
        out.abscissa = a(0, 0);
        out.eigenvector = Vector::Ones(1);
        return out;
    }
    const double shift = 1.0 + a.diagonal().cwiseAbs().maxCoeff();
    Matrix s = a;
    s.diagonal().array() += shift;

    Vector x = Vector::Ones(n);
    Vector y(n);
    double rho = 0.0;
    double residual = std::numeric_limits<double>::infinity();
    for (std::size_t it = 1; it <= options.max_iterations; ++it) {
        y.noalias() = s * x;
        double lo = std::numeric_limits<double>::infinity();
        double hi = -std::numeric_limits<double>::infinity();
        for (Eigen::Index i = 0; i < n; ++i) {
            const double ratio = y(i) / x(i);
            lo = std::min(lo, ratio);
            hi = std::max(hi, ratio);
        }
        // ||x||_inf = 1, so ||Sx||_inf estimates rho.
        const double ymax = y.maxCoeff();
        const double estimate = ymax;
        const double scale = std::max(1.0, std::abs(estimate));
        residual = (y - estimate * x).cwiseAbs().maxCoeff();
        out.iterations = it;
        const bool bracketed = std::isfinite(lo) && hi - lo <= options.tol * scale;
        if (bracketed) {
            rho = 0.5 * (lo + hi);
        } else {
            rho = estimate;
        }
        if (!(ymax > 0.0) || !std::isfinite(ymax)) {
            throw Error(ErrorKind::NoConvergence, "perron_pair: iteration produced a non-positive or non-finite vector",
                        residual);
        }
        x = y / ymax;
        if (bracketed || residual <= 0.1 * options.tol * scale) break;
        if (it == options.max_iterations) {
            std::ostringstream os;
            os << "perron_pair: no convergence after " << it << " iterations (residual " << residual << ")";
            throw Error(ErrorKind::NoConvergence, os.str(), residual);
        }
    }
    out.abscissa = rho - shift;
    out.eigenvector = x / x(0);
    out.residual = (a * out.eigenvector - out.abscissa * out.eigenvector).cwiseAbs().maxCoeff() /
                   out.eigenvector.cwiseAbs().maxCoeff();
    return out;
}

} // namespace

PerronPair perron_pair(const MetzlerMatrix& a, const PerronOptions& options) {
    if (!a.is_irreducible()) {
        throw Error(ErrorKind::NonIrreducible,
                    std::string("perron_pair: matrix is ") + to_string(a.classification().kind) +
                        ", a positive Perron eigenvector requires an irreducible matrix");
    }
    return perron_power_iteration(a.entries(), options);
}

AbscissaReport spectral_abscissa_report(const MetzlerMatrix& a, const PerronOptions& options) {
    AbscissaReport out;
    const auto& cls = a.classification();
    if (cls.kind == StructureKind::Irreducible) {
        auto pp = perron_power_iteration(a.entries(), options);
        out.value = pp.abscissa;
        out.iterations = pp.iterations;
        return out;
    }
    // Any Metzler matrix is permutation-similar to a block triangular form
    // whose diagonal blocks are its strongly connected components.
    out.value = -std::numeric_limits<double>::infinity();
    for (const auto& block : cls.blocks) {
        auto pp = perron_power_iteration(principal_submatrix(a.entries(), block), options);
        out.value = std::max(out.value, pp.abscissa);
        out.iterations += pp.iterations;
    }
    out.reducible_fallback = cls.kind == StructureKind::ReducibleOther;
    return out;
}

double symmetric_max_eigenvalue(const Matrix& s) {
    require_square(s, "symmetric_max_eigenvalue");
    if (s.rows() == 0) throw Error(ErrorKind::InvalidArgument, "symmetric_max_eigenvalue: empty matrix");
    if (s.rows() == 1) return s(0, 0);
    Eigen::SelfAdjointEigenSolver<Matrix> solver(s, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success)
        throw Error(ErrorKind::NoConvergence, "symmetric_max_eigenvalue: eigensolver failed");
    return solver.eigenvalues().maxCoeff();
}

double matrix_measure(const Matrix& a, NormKind norm, const std::optional<Vector>& scaling) {
    require_square(a, "matrix_measure");
    if (a.rows() == 0) throw Error(ErrorKind::InvalidArgument, "matrix_measure: empty matrix");
    Matrix m = a;
    if (scaling) {
        if (scaling->size() != a.rows())
            throw Error(ErrorKind::DimensionMismatch, "matrix_measure: scaling length does not match matrix");
        if (!(scaling->array() > 0.0).all())
            throw Error(ErrorKind::InvalidArgument, "matrix_measure: scaling must be positive");
        m = scaling->asDiagonal() * a * scaling->cwiseInverse().asDiagonal();
    }
    const Eigen::Index n = m.rows();
    switch (norm) {
    case NormKind::One: {
        double best = -std::numeric_limits<double>::infinity();
        for (Eigen::Index j = 0; j < n; ++j)
            best = std::max(best, m(j, j) + m.col(j).cwiseAbs().sum() - std::abs(m(j, j)));
        return best;
    }
    case NormKind::Inf: {
        double best = -std::numeric_limits<double>::infinity();
        for (Eigen::Index i = 0; i < n; ++i)
            best = std::max(best, m(i, i) + m.row(i).cwiseAbs().sum() - std::abs(m(i, i)));
        return best;
    }
    case NormKind::Two: {
        Matrix sym = 0.5 * (m + m.transpose());
        return symmetric_max_eigenvalue(sym);
    }
    }
    throw Error(ErrorKind::InvalidArgument, "matrix_measure: unknown norm");
}

namespace {

double vector_norm(const Vector& v, NormKind norm) {
    switch (norm) {
    case NormKind::One: return v.cwiseAbs().sum();
    case NormKind::Two: return v.norm();
    case NormKind::Inf: return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff();
    }
    return 0.0;
}

// max over z in {-1,1}^cols of |a z|_to; z and -z give the same norm so the
// first sign is fixed.
double max_over_cube_vertices(const Matrix& a, NormKind to) {
    const Eigen::Index cols = a.cols();
    const std::uint64_t count = std::uint64_t{1} << (cols - 1);
    Vector z = Vector::Ones(cols);
    Vector az = a * z;
    double best = vector_norm(az, to);
    // Gray-code walk: one sign flip per step.
    for (std::uint64_t k = 1; k < count; ++k) {
        const auto bit = static_cast<Eigen::Index>(std::countr_zero(k)) + 1;
        z(bit) = -z(bit);
        az += 2.0 * z(bit) * a.col(bit);
        best = std::max(best, vector_norm(az, to));
    }
    return best;
}

} // namespace

double induced_norm(const Matrix& a, NormKind from, NormKind to) {
    if (a.rows() == 0 || a.cols() == 0) return 0.0;
    if (from == NormKind::One) {
        double best = 0.0;
        for (Eigen::Index j = 0; j < a.cols(); ++j) best = std::max(best, vector_norm(a.col(j), to));
        return best;
    }
    if (to == NormKind::Inf) {
        // Row-wise dual norm of the source norm.
        const NormKind dual = from == NormKind::Two ? NormKind::Two : NormKind::One;
        double best = 0.0;
        for (Eigen::Index i = 0; i < a.rows(); ++i)
            best = std::max(best, vector_norm(a.row(i).transpose(), dual));
        return best;
    }
    if (from == NormKind::Two && to == NormKind::Two) {
        Eigen::JacobiSVD<Matrix> svd(a);
        return svd.singularValues()(0);
    }
    if (from == NormKind::Two && to == NormKind::One) {
        // Duality: ||A||_{2->1} = ||A^T||_{inf->2}.
        return induced_norm(a.transpose(), NormKind::Inf, NormKind::Two);
    }
    // from == Inf, to in {One, Two}: convex in z, so attained at a cube vertex.
    if (static_cast<std::size_t>(a.cols()) <= kExactVertexDim) return max_over_cube_vertices(a, to);
    if (to == NormKind::One) return a.cwiseAbs().sum();
    return a.cwiseAbs().rowwise().sum().norm();
}

} // namespace netcontract
