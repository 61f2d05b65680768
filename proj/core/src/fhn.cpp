#include "netcontract/fhn.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include <json.hpp>

#include "netcontract/matrix_io.hpp"
#include "netcontract/ode.hpp"

namespace netcontract::fhn {

using nlohmann::json;

InputSignal InputSignal::zero() { return InputSignal{}; }

InputSignal InputSignal::sinusoid(double offset, double amplitude, double period) {
    if (!(period > 0.0)) throw Error(ErrorKind::InvalidArgument, "sinusoid input: period must be positive");
    InputSignal s;
    s.kind_ = Kind::Sinusoid;
    s.offset_ = offset;
    s.amplitude_ = amplitude;
    s.period_ = period;
    return s;
}

InputSignal InputSignal::spike(double period, std::vector<double> times, std::vector<double> values) {
    if (!(period > 0.0)) throw Error(ErrorKind::InvalidArgument, "spike input: period must be positive");
    if (times.size() < 2 || times.size() != values.size())
        throw Error(ErrorKind::InvalidArgument, "spike input: need matching breakpoint times and values (>= 2)");
    for (std::size_t k = 0; k < times.size(); ++k) {
        if (times[k] < 0.0 || times[k] > period || (k > 0 && !(times[k] > times[k - 1])))
            throw Error(ErrorKind::InvalidArgument, "spike input: breakpoints must increase within [0, period]");
    }
    InputSignal s;
    s.kind_ = Kind::Spike;
    s.period_ = period;
    s.times_ = std::move(times);
    s.values_ = std::move(values);
    return s;
}

double InputSignal::operator()(double t) const {
    switch (kind_) {
    case Kind::Zero: return 0.0;
    case Kind::Sinusoid: return offset_ + amplitude_ * std::sin(2.0 * std::numbers::pi * t / period_);
    case Kind::Spike: {
        double phase = std::fmod(t, period_);
        if (phase < 0.0) phase += period_;
        if (phase <= times_.front()) return values_.front();
        if (phase >= times_.back()) return values_.back();
        const auto it = std::upper_bound(times_.begin(), times_.end(), phase);
        const auto k = static_cast<std::size_t>(it - times_.begin());
        const double u = (phase - times_[k - 1]) / (times_[k] - times_[k - 1]);
        return values_[k - 1] + u * (values_[k] - values_[k - 1]);
    }
    }
    return 0.0;
}

std::optional<double> InputSignal::period() const {
    if (kind_ == Kind::Zero) return std::nullopt;
    return period_;
}

const char* to_string(InputSignal::Kind kind) noexcept {
    switch (kind) {
    case InputSignal::Kind::Zero: return "zero";
    case InputSignal::Kind::Sinusoid: return "sinusoid";
    case InputSignal::Kind::Spike: return "spike";
    }
    return "?";
}

void FhnConfig::validate() const {
    const auto n = adjacency.rows();
    if (n == 0 || adjacency.cols() != n)
        throw Error(ErrorKind::InvalidArgument, "fhn config: adjacency must be a non-empty square matrix");
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            const double v = adjacency(i, j);
            if (v != 0.0 && v != 1.0)
                throw Error(ErrorKind::InvalidArgument, "fhn config: adjacency entries must be 0 or 1");
            if (i == j && v != 0.0)
                throw Error(ErrorKind::InvalidArgument, "fhn config: adjacency must have a zero diagonal");
        }
    }
    if (!(a >= 0.0)) throw Error(ErrorKind::InvalidArgument, "fhn config: a must be nonnegative");
    if (!(b >= 0.0)) throw Error(ErrorKind::InvalidArgument, "fhn config: b must be nonnegative");
    if (!(c > 0.0)) throw Error(ErrorKind::InvalidArgument, "fhn config: c must be positive");
    if (!(gamma > 0.0)) throw Error(ErrorKind::InvalidArgument, "fhn config: gamma must be positive");
    if (!std::isfinite(eta)) throw Error(ErrorKind::InvalidArgument, "fhn config: eta must be finite");
    if (!(step > 0.0)) throw Error(ErrorKind::InvalidArgument, "fhn config: step must be positive");
    if (!(t_end > 0.0)) throw Error(ErrorKind::InvalidArgument, "fhn config: t_end must be positive");
    if (gains && gains->size() != n)
        throw Error(ErrorKind::DimensionMismatch, "fhn config: gains must have one entry per neuron");
    if (x0 && x0->size() != 2 * n)
        throw Error(ErrorKind::DimensionMismatch, "fhn config: x0 must have 2N entries");
}

Vector FhnConfig::resolved_gains() const {
    if (gains) return *gains;
    return fhn_gains(laplacian(adjacency), c, gamma, eta);
}

Vector FhnConfig::initial_state() const {
    if (x0) return *x0;
    return random_initial_state(neurons(), seed);
}

namespace {

double get_number(const json& j, const char* key, double fallback) {
    if (!j.contains(key)) return fallback;
    if (!j.at(key).is_number()) throw Error(ErrorKind::Parse, std::string("fhn config: '") + key + "' must be a number");
    return j.at(key).get<double>();
}

Vector to_vector(const json& j, const char* what) {
    if (!j.is_array()) throw Error(ErrorKind::Parse, std::string("fhn config: '") + what + "' must be an array");
    Vector v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t k = 0; k < j.size(); ++k) {
        if (!j[k].is_number())
            throw Error(ErrorKind::Parse, std::string("fhn config: '") + what + "' must contain numbers");
        v(static_cast<Eigen::Index>(k)) = j[k].get<double>();
    }
    return v;
}

std::vector<double> to_std_vector(const json& j, const char* what) {
    Vector v = to_vector(j, what);
    return {v.data(), v.data() + v.size()};
}

Matrix parse_adjacency(const json& j, std::optional<std::size_t> declared) {
    if (!j.is_array() || j.empty()) throw Error(ErrorKind::Parse, "fhn config: 'adjacency' must be a non-empty array");
    if (j.front().is_array()) {
        const auto n = static_cast<Eigen::Index>(j.size());
        Matrix m(n, n);
        for (Eigen::Index i = 0; i < n; ++i) {
            Vector row = to_vector(j[static_cast<std::size_t>(i)], "adjacency");
            if (row.size() != n) throw Error(ErrorKind::Parse, "fhn config: adjacency rows must have N entries");
            m.row(i) = row.transpose();
        }
        return m;
    }
    Vector flat = to_vector(j, "adjacency");
    const auto n = declared ? static_cast<Eigen::Index>(*declared)
                            : static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(flat.size()))));
    if (n * n != flat.size()) throw Error(ErrorKind::Parse, "fhn config: flat adjacency must have N*N entries");
    Matrix m(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index k = 0; k < n; ++k) m(i, k) = flat(i * n + k);
    return m;
}

InputSignal parse_input(const json& j) {
    if (!j.is_object()) throw Error(ErrorKind::Parse, "fhn config: 'input' must be an object");
    const std::string kind = j.value("kind", std::string("zero"));
    const json params = j.value("params", json::object());
    if (kind == "zero") return InputSignal::zero();
    if (kind == "sinusoid" || kind == "sin") {
        return InputSignal::sinusoid(get_number(params, "offset", 0.0), get_number(params, "amplitude", 1.0),
                                     get_number(params, "period", 1.0));
    }
    if (kind == "spike") {
        if (!params.contains("times") || !params.contains("values"))
            throw Error(ErrorKind::Parse, "fhn config: spike input needs 'times' and 'values'");
        return InputSignal::spike(get_number(params, "period", 1.0), to_std_vector(params.at("times"), "times"),
                                  to_std_vector(params.at("values"), "values"));
    }
    throw Error(ErrorKind::Parse, "fhn config: unknown input kind '" + kind + "'");
}

} // namespace

FhnConfig parse_config(std::string_view json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw Error(ErrorKind::Parse, std::string("fhn config: ") + e.what());
    }
    if (!j.is_object()) throw Error(ErrorKind::Parse, "fhn config: top level must be an object");

    FhnConfig cfg;
    std::optional<std::size_t> declared;
    if (j.contains("N")) {
        if (!j.at("N").is_number_integer() || j.at("N").get<long long>() <= 0)
            throw Error(ErrorKind::Parse, "fhn config: 'N' must be a positive integer");
        declared = j.at("N").get<std::size_t>();
    }
    if (!j.contains("adjacency")) throw Error(ErrorKind::Parse, "fhn config: missing 'adjacency'");
    cfg.adjacency = parse_adjacency(j.at("adjacency"), declared);
    if (declared && static_cast<std::size_t>(cfg.adjacency.rows()) != *declared)
        throw Error(ErrorKind::Parse, "fhn config: 'N' does not match the adjacency size");

    cfg.a = get_number(j, "a", cfg.a);
    cfg.b = get_number(j, "b", cfg.b);
    cfg.c = get_number(j, "c", cfg.c);
    cfg.gamma = get_number(j, "gamma", cfg.gamma);
    cfg.eta = get_number(j, "eta", cfg.eta);
    cfg.t_end = get_number(j, "t_end", cfg.t_end);
    cfg.step = get_number(j, "step", cfg.step);
    if (j.contains("seed")) {
        if (!j.at("seed").is_number_integer() || j.at("seed").get<long long>() < 0)
            throw Error(ErrorKind::Parse, "fhn config: 'seed' must be a nonnegative integer");
        cfg.seed = j.at("seed").get<std::uint64_t>();
    }
    if (j.contains("input")) cfg.input = parse_input(j.at("input"));
    if (j.contains("gains")) {
        const auto& g = j.at("gains");
        if (g.is_string()) {
            if (g.get<std::string>() != "auto")
                throw Error(ErrorKind::Parse, "fhn config: 'gains' must be \"auto\" or an array");
        } else {
            cfg.gains = to_vector(g, "gains");
        }
    }
    if (j.contains("x0")) cfg.x0 = to_vector(j.at("x0"), "x0");
    cfg.validate();
    return cfg;
}

FhnConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::Io, "cannot open '" + path.string() + "' for reading");
    std::stringstream buffer;
    buffer << in.rdbuf();
    try {
        return parse_config(buffer.str());
    } catch (const Error& e) {
        throw Error(e.kind(), path.string() + ": " + e.what());
    }
}

FhnConfig reference_network() {
    FhnConfig cfg;
    cfg.adjacency.resize(6, 6);
    cfg.adjacency << 0, 1, 1, 0, 0, 0, //
        1, 0, 0, 0, 1, 1,              //
        0, 1, 0, 1, 0, 0,              //
        0, 0, 1, 0, 0, 0,              //
        0, 1, 0, 0, 0, 0,              //
        0, 0, 0, 0, 1, 0;
    cfg.a = 0.0;
    cfg.b = 2.0;
    cfg.c = 6.0;
    cfg.gamma = 0.05;
    cfg.eta = 0.05;
    cfg.input = InputSignal::sinusoid(4.0, 4.0, 1.0);
    cfg.t_end = 25.0;
    cfg.step = 1e-3;
    return cfg;
}

Matrix laplacian(const Matrix& adjacency) {
    const auto n = adjacency.rows();
    if (adjacency.cols() != n) throw Error(ErrorKind::DimensionMismatch, "laplacian: adjacency must be square");
    Matrix l = Matrix::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            const double v = adjacency(i, j);
            if (v != 0.0 && v != 1.0) throw Error(ErrorKind::InvalidArgument, "laplacian: entries must be 0 or 1");
            if (i == j) {
                if (v != 0.0) throw Error(ErrorKind::InvalidArgument, "laplacian: self-loops are not allowed");
                continue;
            }
            if (v == 1.0) {
                l(i, j) = -1.0;
                l(i, i) += 1.0;
            }
        }
    }
    return l;
}

Matrix voltage_block_bound(const Matrix& l, double c, double gamma) {
    Matrix j = -0.5 * gamma * (l + l.transpose());
    j.diagonal().array() += c;
    return j;
}

Vector fhn_gains(const Matrix& l, double c, double gamma, double eta) {
    if (l.rows() != l.cols() || l.rows() == 0)
        throw Error(ErrorKind::DimensionMismatch, "fhn_gains: Laplacian must be non-empty and square");
    const double needed = gamma * l.diagonal().maxCoeff() - c;
    if (eta < needed) {
        std::ostringstream os;
        os << "fhn_gains: need eta >= gamma * max_i L_ii - c = " << needed << ", got eta = " << eta;
        throw Error(ErrorKind::HypothesisViolated, os.str());
    }
    Vector gains = Vector::Constant(l.rows(), c + eta);
    gains -= 0.5 * gamma * l.colwise().sum().transpose();
    return gains;
}

Network::Network(const FhnConfig& config, Vector gains)
    : config_(config), n_(config.neurons()), l_(fhn::laplacian(config.adjacency)), gains_(std::move(gains)) {
    if (gains_.size() != static_cast<Eigen::Index>(n_))
        throw Error(ErrorKind::DimensionMismatch, "fhn::Network: gains must have one entry per neuron");
}

Vector Network::rhs(double t, const Vector& x) const {
    const auto n = static_cast<Eigen::Index>(n_);
    const auto v = x.head(n);
    const auto w = x.tail(n);
    const double r = config_.input(t);
    const double c = config_.c;
    Vector dx(2 * n);
    dx.head(n) = c * (v + w - v.cwiseProduct(v).cwiseProduct(v) / 3.0).array() + c * r;
    dx.head(n) -= config_.gamma * (l_ * v) + gains_.cwiseProduct(v);
    dx.tail(n) = -(v.array() - config_.a + config_.b * w.array()) / c;
    return dx;
}

Matrix Network::jacobian(const Vector& x) const {
    const auto n = static_cast<Eigen::Index>(n_);
    const double c = config_.c;
    Matrix j = Matrix::Zero(2 * n, 2 * n);
    j.topLeftCorner(n, n) = -config_.gamma * l_;
    for (Eigen::Index i = 0; i < n; ++i) {
        j(i, i) += c - c * x(i) * x(i) - gains_(i);
        j(i, n + i) = c;
        j(n + i, i) = -1.0 / c;
        j(n + i, n + i) = -config_.b / c;
    }
    return j;
}

Vector Network::norm_scaling() const {
    const auto n = static_cast<Eigen::Index>(n_);
    Vector t(2 * n);
    t.head(n).setOnes();
    t.tail(n).setConstant(config_.c);
    return t;
}

double Network::scaled_norm(const Vector& x) const { return norm_scaling().cwiseProduct(x).norm(); }

bool ContractionCertificate::passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const HypothesisCheck& c) { return c.passed; });
}

std::string ContractionCertificate::first_failure() const {
    for (const auto& c : checks)
        if (!c.passed) return c.name;
    return {};
}

ContractionCertificate certify(const FhnConfig& config) {
    config.validate();
    constexpr double kTol = 1e-9;
    const Matrix l = laplacian(config.adjacency);
    const Matrix j11 = voltage_block_bound(l, config.c, config.gamma);
    const Vector gains = config.resolved_gains();

    ContractionCertificate out;
    out.eta_requested = config.eta;
    Matrix closed = j11;
    closed.diagonal() -= gains;
    out.mu_voltage = matrix_measure(closed, NormKind::Two);
    out.mu_scaled = std::max(out.mu_voltage, -config.b / config.c);
    out.eta_certified = -out.mu_scaled;

    const double b_over_c = config.b / config.c;
    out.checks.push_back({"eta <= b/c", config.eta <= b_over_c + 1e-12, config.eta - b_over_c});
    const double min_entry = (j11 + config.eta * Matrix::Identity(j11.rows(), j11.cols())).minCoeff();
    out.checks.push_back({"Jhat11 + eta*I >= 0", min_entry >= -1e-12, min_entry});
    const double min_gain = gains.minCoeff();
    out.checks.push_back({"gains > 0", min_gain > 0.0, min_gain});
    out.checks.push_back(
        {"mu_2T bound <= -eta", out.eta_certified >= config.eta - kTol, out.mu_scaled + config.eta});
    return out;
}

Vector random_initial_state(std::size_t neurons, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-4.0, 4.0);
    Vector x(2 * static_cast<Eigen::Index>(neurons));
    for (Eigen::Index k = 0; k < x.size(); ++k) x(k) = dist(rng);
    return x;
}

Trajectory simulate(const FhnConfig& config, const Vector& x0, double t_end, double step) {
    config.validate();
    if (x0.size() != 2 * static_cast<Eigen::Index>(config.neurons()))
        throw Error(ErrorKind::DimensionMismatch, "simulate: x0 must have 2N entries");
    if (!(step > 0.0) || !(t_end > 0.0))
        throw Error(ErrorKind::InvalidArgument, "simulate: step and t_end must be positive");
    const Network net(config, config.resolved_gains());
    Trajectory out;
    const auto expected = static_cast<std::size_t>(std::ceil(t_end / step)) + 1;
    out.times.reserve(expected);
    out.states.reserve(expected);
    out.input_trace.reserve(expected);
    ode::rk4_integrate([&net](double t, const Vector& x) { return net.rhs(t, x); }, x0, 0.0, t_end, step,
                       [&](double t, const Vector& x) {
                           out.times.push_back(t);
                           out.states.push_back(x);
                           out.input_trace.push_back(config.input(t));
                       });
    return out;
}

void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory, std::size_t neurons) {
    out << 't';
    for (std::size_t i = 1; i <= neurons; ++i) out << ",v" << i;
    for (std::size_t i = 1; i <= neurons; ++i) out << ",w" << i;
    out << ",r\n";
    for (std::size_t k = 0; k < trajectory.times.size(); ++k) {
        out << io::format_double(trajectory.times[k]);
        const Vector& x = trajectory.states[k];
        for (Eigen::Index i = 0; i < x.size(); ++i) out << ',' << io::format_double(x(i));
        out << ',' << io::format_double(trajectory.input_trace[k]) << '\n';
    }
}

namespace {

// Least-squares slope of log(gap) against t over samples with t >= start.
double log_linear_slope(const std::vector<double>& t, const std::vector<double>& gap, double start) {
    double n = 0, st = 0, sy = 0, stt = 0, sty = 0;
    for (std::size_t k = 0; k < t.size(); ++k) {
        if (t[k] < start || !(gap[k] > 0.0)) continue;
        const double y = std::log(gap[k]);
        n += 1;
        st += t[k];
        sy += y;
        stt += t[k] * t[k];
        sty += t[k] * y;
    }
    const double denom = n * stt - st * st;
    if (n < 2 || denom <= 0.0) return std::numeric_limits<double>::quiet_NaN();
    return (n * sty - st * sy) / denom;
}

} // namespace

EntrainmentReport entrainment_check(const FhnConfig& config, const std::vector<Trajectory>& trajectories,
                                    double period, const EntrainmentOptions& options) {
    if (trajectories.size() < 2) throw Error(ErrorKind::InvalidArgument, "entrainment_check: need >= 2 trajectories");
    if (!(period > 0.0)) throw Error(ErrorKind::InvalidArgument, "entrainment_check: period must be positive");
    const auto& grid = trajectories.front().times;
    if (grid.size() < 2) throw Error(ErrorKind::InvalidArgument, "entrainment_check: trajectory too short");
    for (const auto& tr : trajectories) {
        if (tr.times != grid || tr.states.size() != grid.size())
            throw Error(ErrorKind::DimensionMismatch, "entrainment_check: trajectories are not on a common grid");
    }
    const Network net(config, config.resolved_gains());
    const auto n = static_cast<Eigen::Index>(config.neurons());
    const double step = grid[1] - grid[0];
    const double t_end = grid.back();

    EntrainmentReport out;
    out.horizon_sufficient = t_end >= (options.transient_periods + 3.0) * period - 1e-9;

    out.fitted_rate = std::numeric_limits<double>::infinity();
    for (std::size_t p = 0; p < trajectories.size(); ++p) {
        for (std::size_t q = p + 1; q < trajectories.size(); ++q) {
            std::vector<double> gap(grid.size());
            for (std::size_t k = 0; k < grid.size(); ++k)
                gap[k] = net.scaled_norm(trajectories[p].states[k] - trajectories[q].states[k]);
            out.max_gap = std::max(out.max_gap, *std::max_element(gap.begin(), gap.end()));
            if (gap.front() == 0.0) continue;
            for (std::size_t k = 0; k < grid.size(); ++k)
                out.contraction_factor =
                    std::max(out.contraction_factor, gap[k] / (std::exp(-config.eta * grid[k]) * gap.front()));
            const double slope = log_linear_slope(grid, gap, options.fit_start);
            if (std::isfinite(slope)) out.fitted_rate = std::min(out.fitted_rate, -slope);
        }
    }
    out.worst_violation = std::max(0.0, out.contraction_factor - options.slack);
    out.contraction_ok = out.contraction_factor <= options.slack;
    out.rate_ok = out.max_gap == 0.0 || out.fitted_rate >= options.rate_fraction * config.eta;

    // Last period: compare x(t) with x(t + T) for t + T in [t_end - T, t_end].
    const auto shift = static_cast<std::size_t>(std::llround(period / step));
    const std::size_t last = grid.size() - 1;
    if (shift == 0 || 2 * shift > last)
        throw Error(ErrorKind::InvalidArgument, "entrainment_check: horizon shorter than two periods");
    for (const auto& tr : trajectories) {
        for (std::size_t k = last - shift; k <= last; ++k) {
            out.periodicity_residual =
                std::max(out.periodicity_residual, (tr.states[k] - tr.states[k - shift]).cwiseAbs().maxCoeff());
            const auto v = tr.states[k].head(n);
            out.sync_spread = std::max(out.sync_spread, v.maxCoeff() - v.minCoeff());
        }
    }
    out.periodic_ok = out.periodicity_residual <= options.periodicity_tol;
    out.synchronized = out.sync_spread <= options.sync_tol;
    return out;
}

} // namespace netcontract::fhn
