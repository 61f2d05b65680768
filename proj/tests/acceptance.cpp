// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure. Each criterion also enforces its runtime budget.

#include <chrono>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "netcontract/balancing.hpp"
#include "netcontract/fhn.hpp"
#include "netcontract/hierarchy.hpp"
#include "netcontract/stabilization.hpp"
#include "support/oracles.hpp"

using namespace netcontract;

namespace {

struct Outcome {
    bool ok = true;
    std::string detail;

    void require(bool condition, const std::string& what) {
        if (!condition && ok) {
            ok = false;
            detail = what;
        }
    }
};

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

Matrix closed_loop(const Matrix& a, const Vector& ell) {
    Matrix c = a;
    c.diagonal() -= ell;
    return c;
}

Outcome flow_example() {
    Outcome out;
    Matrix a(2, 2);
    a << -1, 1, 1, -1;
    Vector w(2);
    w << 1, 4;
    auto r = minimal_effort_stabilize(MetzlerMatrix(a), w, -1.0);
    out.require(std::abs(r.ell_star(0) - 2.0) <= 1e-9 && std::abs(r.ell_star(1) - 0.5) <= 1e-9,
                "l* = [" + fmt(r.ell_star(0)) + ", " + fmt(r.ell_star(1)) + "]");
    Eigen::EigenSolver<Matrix> es(closed_loop(a, r.ell_star), false);
    double lo = std::min(es.eigenvalues()(0).real(), es.eigenvalues()(1).real());
    double hi = std::max(es.eigenvalues()(0).real(), es.eigenvalues()(1).real());
    out.require(std::abs(lo + 3.5) <= 1e-8 && std::abs(hi + 1.0) <= 1e-8, "eigenvalues " + fmt(lo) + ", " + fmt(hi));

    auto equal = minimal_effort_stabilize(MetzlerMatrix(a), Vector::Ones(2), -1.25);
    out.require((equal.ell_star - Vector::Constant(2, 1.25)).cwiseAbs().maxCoeff() <= 1e-9, "equal-weight case");
    return out;
}

Outcome balancing_fixed_point() {
    Outcome out;
    oracle::Rng rng(1001);
    const int sizes[] = {5, 20, 100};
    double worst_imbalance = 0.0, worst_agreement = 0.0;
    for (int k = 0; k < 100; ++k) {
        const int n = sizes[k % 3];
        Matrix a = oracle::random_irreducible_metzler(n, rng, n == 100 ? 0.1 : 0.4);
        MetzlerMatrix ma(a);
        auto r = balance(ma);
        const double imb = imbalance(diagonal_similarity(a, r.d));
        worst_imbalance = std::max(worst_imbalance, imb);

        BalanceOptions other;
        other.initial = oracle::random_positive(n, rng, 1e-3, 1e3);
        auto r2 = balance(ma, other);
        const Vector d1 = r.d / r.d(0), d2 = r2.d / r2.d(0);
        const double agreement = ((d1 - d2).array().abs() / d1.array()).maxCoeff();
        worst_agreement = std::max(worst_agreement, agreement);

        if (n <= 8) {
            const double best = oracle::potential(a, r.d);
            for (int s = 0; s < 1000; ++s) {
                Vector d(n);
                for (int i = 0; i < n; ++i)
                    d(i) = r.d(i) * std::exp(oracle::uniform(rng, -1.0, 1.0) * (s < 500 ? 3.0 : 1e-3));
                if (oracle::potential(a, d) < best - 1e-12 * std::abs(best)) {
                    out.require(false, "random scaling beats the balanced potential");
                    break;
                }
            }
        }
    }
    out.require(worst_imbalance <= 1e-10, "imbalance " + fmt(worst_imbalance));
    out.require(worst_agreement <= 1e-6, "initializations disagree by " + fmt(worst_agreement));
    if (out.ok) out.detail = "max imbalance " + fmt(worst_imbalance) + ", init spread " + fmt(worst_agreement);
    return out;
}

Outcome stabilization_certificate() {
    Outcome out;
    oracle::Rng rng(2002);
    const double margins[] = {0.1, 1.0, 10.0};
    double worst_target = 0.0, worst_eigen = 0.0, worst_cost = -1e300;
    for (int k = 0; k < 100; ++k) {
        const int n = 2 + k % 11;
        Matrix a = oracle::random_irreducible_metzler(n, rng);
        Vector w = oracle::random_positive(n, rng);
        const double target = oracle::abscissa(a) - margins[k % 3];
        auto r = minimal_effort_stabilize(MetzlerMatrix(a), w, target);

        const double achieved = oracle::abscissa(closed_loop(a, r.ell_star));
        worst_target = std::max({worst_target, std::abs(achieved - target), std::abs(r.achieved - target)});
        const Vector residual = closed_loop(a, r.ell_star) * r.d_star - target * r.d_star;
        worst_eigen = std::max(worst_eigen, residual.cwiseAbs().maxCoeff() / r.d_star.cwiseAbs().maxCoeff());

        int collected = 0;
        for (int draw = 0; collected < 1000 && draw < 200000; ++draw) {
            Vector ell(n);
            for (int i = 0; i < n; ++i) ell(i) = r.ell_star(i) + oracle::uniform(rng, -1.0, 1.0);
            // Half of the candidates are pushed onto the feasibility boundary,
            // where the cheapest competitors live.
            if (draw % 2 == 0) ell.array() += oracle::abscissa(closed_loop(a, ell)) - target;
            if (oracle::abscissa(closed_loop(a, ell)) > target) continue;
            ++collected;
            worst_cost = std::max(worst_cost, r.cost - w.dot(ell));
        }
        out.require(collected == 1000, "could not collect 1000 feasible samples");
    }
    out.require(worst_target <= 1e-8, "abscissa off target by " + fmt(worst_target));
    out.require(worst_eigen <= 1e-8, "eigen equation residual " + fmt(worst_eigen));
    out.require(worst_cost <= 1e-7, "feasible sample cheaper by " + fmt(worst_cost));
    if (out.ok)
        out.detail = "target err " + fmt(worst_target) + ", eigen residual " + fmt(worst_eigen) +
                     ", best competitor margin " + fmt(-worst_cost);
    return out;
}

Outcome tridiagonal_agreement() {
    Outcome out;
    Matrix worked(3, 3);
    worked << 1, 2, 0, 8, 1, 3, 0, 12, 1;
    Vector expected(3);
    expected << 5.5, 11.5, 7.5;
    Vector closed = tridiagonal_gains(MetzlerMatrix(worked), 0.5);
    Vector general = synthesize_gains(MetzlerMatrix(worked), Vector::Ones(3), 0.5).v_star;
    out.require((closed - expected).cwiseAbs().maxCoeff() <= 1e-9, "worked instance (closed form)");
    out.require((general - expected).cwiseAbs().maxCoeff() <= 1e-9, "worked instance (balancing)");

    oracle::Rng rng(4004);
    double worst = 0.0;
    for (int k = 0; k < 100; ++k) {
        const int n = 2 + k % 40;
        Matrix t = oracle::random_irreducible_tridiagonal(n, rng);
        const double eta = std::max(0.0, -t.diagonal().minCoeff()) + oracle::uniform(rng, 0.05, 2.0);
        Vector c = tridiagonal_gains(MetzlerMatrix(t), eta);
        Vector g = synthesize_gains(MetzlerMatrix(t), Vector::Ones(n), eta).v_star;
        worst = std::max(worst, (c - g).cwiseAbs().maxCoeff() / (1.0 + c.cwiseAbs().maxCoeff()));
    }
    out.require(worst <= 1e-9, "relative disagreement " + fmt(worst));
    if (out.ok) out.detail = "max relative gap " + fmt(worst);
    return out;
}

Outcome measure_monotonicity() {
    Outcome out;
    oracle::Rng rng(5005);
    double worst = -1e300;
    for (int k = 0; k < 1000; ++k) {
        const int n = 1 + k % 8;
        Matrix a(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                a(i, j) = i == j ? oracle::uniform(rng, -5, 5) : (oracle::uniform(rng, 0, 1) < 0.5 ? 0.0 : oracle::uniform(rng, 0, 3));
        Matrix b = a;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                if (oracle::uniform(rng, 0, 1) < 0.5) b(i, j) += oracle::uniform(rng, 0, k % 2 ? 1e-6 : 2.0);
        for (NormKind norm : {NormKind::One, NormKind::Two, NormKind::Inf})
            worst = std::max(worst, matrix_measure(a, norm) - matrix_measure(b, norm));
    }
    out.require(worst <= 1e-12, "mu(A) - mu(B) reached " + fmt(worst));
    if (out.ok) out.detail = "max mu(A) - mu(B) " + fmt(worst);
    return out;
}

Outcome fhn_gains_criterion() {
    Outcome out;
    const auto cfg = fhn::reference_network();
    const Matrix l = fhn::laplacian(cfg.adjacency);
    Vector g = fhn::fhn_gains(l, cfg.c, cfg.gamma, cfg.eta);
    Vector expected(6);
    expected << 6.025, 6.05, 6.05, 6.05, 6.075, 6.05;
    out.require((g - expected).cwiseAbs().maxCoeff() <= 1e-12, "gains differ from the expected vector");
    const double alpha = oracle::abscissa(closed_loop(fhn::voltage_block_bound(l, cfg.c, cfg.gamma), g));
    out.require(std::abs(alpha + cfg.eta) <= 1e-8, "closed-loop abscissa " + fmt(alpha));

    Matrix ring = Matrix::Zero(6, 6);
    for (int i = 0; i < 6; ++i) ring(i, (i + 1) % 6) = ring((i + 1) % 6, i) = 1;
    Vector sym = fhn::fhn_gains(fhn::laplacian(ring), cfg.c, cfg.gamma, cfg.eta);
    out.require((sym.array() == cfg.c + cfg.eta).all(), "symmetric graph gains are not exactly (c + eta) 1");
    return out;
}

Outcome fhn_entrainment() {
    Outcome out;
    const auto cfg = fhn::reference_network();
    auto x = fhn::simulate(cfg, fhn::random_initial_state(6, 1), cfg.t_end, cfg.step);
    auto y = fhn::simulate(cfg, fhn::random_initial_state(6, 2), cfg.t_end, cfg.step);
    fhn::EntrainmentOptions options;
    options.rate_fraction = 0.9;
    auto r = fhn::entrainment_check(cfg, {x, y}, 1.0, options);
    out.require(r.contraction_ok, "gap bound factor " + fmt(r.contraction_factor) + " > 1.05");
    out.require(r.fitted_rate >= 0.045, "fitted rate " + fmt(r.fitted_rate));
    out.require(r.periodicity_residual <= 1e-3, "periodicity residual " + fmt(r.periodicity_residual));
    if (out.ok)
        out.detail = "gap factor " + fmt(r.contraction_factor) + ", rate " + fmt(r.fitted_rate) + ", periodicity " +
                     fmt(r.periodicity_residual);
    return out;
}

Outcome marginal_certificate() {
    Outcome out;
    oracle::Rng rng(8008);
    int present = 0;
    for (int k = 0; k < 200; ++k) {
        const int n = 2 + k % 15;
        Matrix a = oracle::random_irreducible_metzler(n, rng);
        if (k % 4 == 0) {
            // Zero row sums put the abscissa exactly at 0.
            a.diagonal().setZero();
            a.diagonal() = -a.rowwise().sum();
        } else {
            a.diagonal().array() -= oracle::abscissa(a) + oracle::uniform(rng, -1.0, 1.0);
        }
        MetzlerMatrix ma(a);
        const double alpha = spectral_abscissa(ma);
        auto cert = marginal_stability_certificate(ma);
        if (cert.d.has_value() != (alpha <= 1e-10)) {
            out.require(false, "certificate presence disagrees with abscissa " + fmt(alpha));
            break;
        }
        const double reference = oracle::abscissa(a);
        out.require(!(reference > 1e-8 && cert.d), "certificate for an unstable matrix");
        out.require(!(reference < -1e-8 && !cert.d), "no certificate for a Hurwitz matrix");
        if (cert.d) {
            ++present;
            const Vector ad = a * *cert.d;
            out.require((cert.d->array() > 0.0).all(), "certificate vector not positive");
            out.require(ad.maxCoeff() <= 1e-9 * cert.d->cwiseAbs().maxCoeff(), "A d exceeds tolerance");
        }
    }
    if (out.ok) out.detail = std::to_string(present) + " of 200 certified";
    return out;
}

Outcome block_bound_soundness() {
    Outcome out;
    oracle::Rng rng(9009);
    const double dt = 0.05;
    const int steps = 80;
    double worst_rate = -1e300, worst_factor = 0.0;
    int trajectories = 0;
    for (int k = 0; k < 50; ++k) {
        std::vector<std::size_t> sizes;
        std::vector<BlockNorm> norms;
        const int blocks = 2 + k % 3;
        std::size_t n = 0;
        for (int b = 0; b < blocks; ++b) {
            sizes.push_back(1 + static_cast<std::size_t>(oracle::uniform(rng, 0, 3)));
            n += sizes.back();
            const NormKind kinds[] = {NormKind::One, NormKind::Two, NormKind::Inf};
            BlockNorm norm{kinds[(k + b) % 3], std::nullopt};
            if ((k + b) % 2) norm.scaling = oracle::random_positive(static_cast<int>(sizes.back()), rng, 0.5, 2.0);
            norms.push_back(norm);
        }
        BlockPartition p(sizes, norms);
        const auto dim = static_cast<int>(n);
        Matrix a(dim, dim);
        for (int i = 0; i < dim; ++i)
            for (int j = 0; j < dim; ++j) a(i, j) = oracle::uniform(rng, -1.0, 1.0);
        a.diagonal().array() -= spectral_abscissa(block_bound_matrix(a, p)) + oracle::uniform(rng, 0.1, 1.0);
        auto b = block_bound_matrix(a, p);
        auto perron = perron_pair(b);
        if (!(perron.abscissa < 0.0)) {
            out.require(false, "bound matrix not Hurwitz");
            break;
        }
        const Matrix step = oracle::propagator(a, dt);
        for (int s = 0; s < 3; ++s) {
            Vector x(dim);
            for (int i = 0; i < dim; ++i) x(i) = oracle::uniform(rng, -1.0, 1.0);
            const double n0 = composite_norm(x, p, perron.eigenvector);
            double st = 0, sy = 0, stt = 0, sty = 0;
            for (int m = 0; m <= steps; ++m) {
                const double t = m * dt;
                const double nt = composite_norm(x, p, perron.eigenvector);
                worst_factor = std::max(worst_factor, nt / (std::exp(perron.abscissa * t) * n0));
                const double y = std::log(nt);
                st += t;
                sy += y;
                stt += t * t;
                sty += t * y;
                x = step * x;
            }
            const double cnt = steps + 1;
            const double slope = (cnt * sty - st * sy) / (cnt * stt - st * st);
            worst_rate = std::max(worst_rate, slope - perron.abscissa);
            ++trajectories;
        }
    }
    out.require(worst_rate <= 1e-3, "decay slower than alpha(B) by " + fmt(worst_rate));
    out.require(worst_factor <= 1.0 + 1e-6, "pointwise bound factor " + fmt(worst_factor));
    if (out.ok)
        out.detail = std::to_string(trajectories) + " trajectories, slope - alpha(B) <= " + fmt(worst_rate) +
                     ", factor " + fmt(worst_factor);
    return out;
}

struct Criterion {
    int id;
    const char* name;
    double budget_s;
    std::function<Outcome()> run;
};

} // namespace

int main() {
    const std::vector<Criterion> criteria{
        {1, "two-node flow stabilization", 1.0, flow_example},
        {2, "balancing fixed point", 30.0, balancing_fixed_point},
        {3, "minimal-effort certificate", 60.0, stabilization_certificate},
        {4, "tridiagonal agreement", 5.0, tridiagonal_agreement},
        {5, "measure monotonicity", 5.0, measure_monotonicity},
        {6, "FHN gains", 1.0, fhn_gains_criterion},
        {7, "FHN entrainment", 60.0, fhn_entrainment},
        {8, "marginal stability certificate", 10.0, marginal_certificate},
        {9, "block bound soundness", 60.0, block_bound_soundness},
    };
    int failures = 0;
    for (const auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome outcome;
        try {
            outcome = c.run();
        } catch (const std::exception& e) {
            outcome.ok = false;
            outcome.detail = std::string("exception: ") + e.what();
        }
        const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (outcome.ok && elapsed > c.budget_s) {
            outcome.ok = false;
            outcome.detail = "runtime " + fmt(elapsed) + " s over budget " + fmt(c.budget_s) + " s";
        }
        if (!outcome.ok) ++failures;
        std::printf("%s [%d] %s (%.2f s)%s%s\n", outcome.ok ? "PASS" : "FAIL", c.id, c.name, elapsed,
                    outcome.detail.empty() ? "" : ": ", outcome.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
