#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "netcontract/matrix_core.hpp"

namespace netcontract::fhn {

/// External current r(t) shared by every neuron.
class InputSignal {
public:
    enum class Kind { Zero, Sinusoid, Spike };

    static InputSignal zero();
    /// offset + amplitude * sin(2 pi t / period)
    static InputSignal sinusoid(double offset, double amplitude, double period);
    /// Piecewise-linear over one period, interpolating (times, values) at
    /// t mod period; times must be increasing within [0, period].
    static InputSignal spike(double period, std::vector<double> times, std::vector<double> values);

    double operator()(double t) const;
    Kind kind() const noexcept { return kind_; }
    /// Absent for the zero input.
    std::optional<double> period() const;

    double offset() const noexcept { return offset_; }
    double amplitude() const noexcept { return amplitude_; }
    const std::vector<double>& times() const noexcept { return times_; }
    const std::vector<double>& values() const noexcept { return values_; }

private:
    Kind kind_ = Kind::Zero;
    double offset_ = 0.0;
    double amplitude_ = 0.0;
    double period_ = 1.0;
    std::vector<double> times_;
    std::vector<double> values_;
};

const char* to_string(InputSignal::Kind kind) noexcept;

struct FhnConfig {
    Matrix adjacency;  ///< adjacency(i, j) = 1 iff j is a neighbour of i
    double a = 0.0;
    double b = 2.0;
    double c = 6.0;
    double gamma = 0.05;
    double eta = 0.05;
    /// Absent means "auto": the minimal gains from fhn_gains.
    std::optional<Vector> gains;
    InputSignal input = InputSignal::zero();
    std::uint64_t seed = 0;
    double t_end = 25.0;
    double step = 1e-3;
    /// Initial state (v_1..v_N, w_1..w_N); drawn from the seed when absent.
    std::optional<Vector> x0;

    std::size_t neurons() const noexcept { return static_cast<std::size_t>(adjacency.rows()); }
    /// Throws Error(InvalidArgument) on the first violated invariant.
    void validate() const;
    /// Explicit gains, or fhn_gains(laplacian, c, gamma, eta).
    Vector resolved_gains() const;
    /// Explicit x0, or random_initial_state(N, seed).
    Vector initial_state() const;
};

/// Parses the JSON config schema
///   {N, adjacency, a, b, c, gamma, eta, input: {kind, params},
///    gains: "auto" | [..], seed, t_end, step, x0?}
/// Adjacency may be nested rows or a flat row-major list.
FhnConfig parse_config(std::string_view json_text);
FhnConfig load_config(const std::filesystem::path& path);

/// The six-neuron directed network used for the entrainment experiment
/// (a=0, b=2, c=6, gamma=0.05, eta=0.05, r(t) = 4 + 4 sin(2 pi t)).
FhnConfig reference_network();

/// L_ii = |N_i|, L_ij = -1 for j in N_i. Rows sum to zero.
Matrix laplacian(const Matrix& adjacency);

/// Symmetric part of the linearized voltage block at v = 0:
/// c I - gamma (L + L^T) / 2.
Matrix voltage_block_bound(const Matrix& l, double c, double gamma);

/// Minimal gains making voltage_block_bound - diag(l) Hurwitz with abscissa
/// -eta: l* = (c + eta) 1 - (gamma / 2) L^T 1. Requires
/// eta >= gamma max_i L_ii - c (Error(HypothesisViolated) otherwise).
Vector fhn_gains(const Matrix& l, double c, double gamma, double eta);

/// Closed-loop network with fixed gains; owns the Laplacian.
class Network {
public:
    Network(const FhnConfig& config, Vector gains);

    std::size_t neurons() const noexcept { return n_; }
    const Vector& gains() const noexcept { return gains_; }
    const Matrix& laplacian() const noexcept { return l_; }

    Vector rhs(double t, const Vector& x) const;
    Matrix jacobian(const Vector& x) const;
    /// diag(1..1, c..c), the scaling of the contraction norm |x|_{2,T} = |T x|_2.
    Vector norm_scaling() const;
    double scaled_norm(const Vector& x) const;

private:
    FhnConfig config_;
    std::size_t n_;
    Matrix l_;
    Vector gains_;
};

struct HypothesisCheck {
    std::string name;
    bool passed = false;
    double residual = 0.0;
};

struct ContractionCertificate {
    double eta_requested = 0.0;
    double eta_certified = 0.0;
    double mu_voltage = 0.0; ///< mu_2(J11_hat - diag(l))
    double mu_scaled = 0.0;  ///< max(mu_voltage, -b/c), bound on mu_{2,T}(J)
    std::vector<HypothesisCheck> checks;

    bool passed() const;
    /// Name of the first failed check, empty when all pass.
    std::string first_failure() const;
};

ContractionCertificate certify(const FhnConfig& config);

struct Trajectory {
    std::vector<double> times;
    std::vector<Vector> states; ///< (v_1..v_N, w_1..w_N)
    std::vector<double> input_trace;
};

/// Uniform draw from [-4, 4]^{2N}.
Vector random_initial_state(std::size_t neurons, std::uint64_t seed);

/// Fixed-step RK4 of the closed loop, sampled every step.
Trajectory simulate(const FhnConfig& config, const Vector& x0, double t_end, double step);

/// Header "t,v1..vN,w1..wN,r"; 17 significant digits.
void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory, std::size_t neurons);

struct EntrainmentOptions {
    double transient_periods = 15.0;
    double fit_start = 1.0;
    double slack = 1.05;
    double periodicity_tol = 1e-3;
    double rate_fraction = 0.9; ///< fitted decay must reach this fraction of eta
    double sync_tol = 1e-3;
};

struct EntrainmentReport {
    /// max over pairs and samples of gap(t) / (exp(-eta t) gap(0)); 0 when
    /// every pair starts identical.
    double contraction_factor = 0.0;
    double worst_violation = 0.0; ///< max(0, contraction_factor - slack)
    double fitted_rate = 0.0;     ///< min over pairs of the log-linear decay fit
    double max_gap = 0.0;         ///< largest scaled gap seen anywhere
    double periodicity_residual = 0.0; ///< max |x(t+T) - x(t)|_inf over the last period
    double sync_spread = 0.0;          ///< max_ij |v_i - v_j| over the last period
    bool horizon_sufficient = false;   ///< t_end >= transient + 3T

    bool contraction_ok = false;
    bool rate_ok = false;
    bool periodic_ok = false;
    bool synchronized = false;
};

EntrainmentReport entrainment_check(const FhnConfig& config, const std::vector<Trajectory>& trajectories,
                                    double period, const EntrainmentOptions& options = {});

} // namespace netcontract::fhn
