#include "cli.hpp"

#include <chrono>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "netcontract/balancing.hpp"
#include "netcontract/fhn.hpp"
#include "netcontract/hierarchy.hpp"
#include "netcontract/matrix_io.hpp"
#include "netcontract/stabilization.hpp"

namespace netcontract::cli {

namespace {

using json = nlohmann::ordered_json;

json to_json(const Vector& v) {
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
    return out;
}

json to_json(const Matrix& m) {
    json out = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) out.push_back(to_json(Vector(m.row(i).transpose())));
    return out;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error(ErrorKind::Io, "cannot open '" + path + "' for writing");
    f << text;
    if (!f) throw Error(ErrorKind::Io, "failed writing '" + path + "'");
}

/// Everything one command produces. `result` is deterministic and goes to
/// --output when given; the manifest adds timing and is never compared.
struct Run {
    std::string command;
    json inputs = json::object();
    json params = json::object();
    json result = json::object();
    int exit_code = kExitOk;
    std::string diagnostic; ///< set with a failed certificate
};

struct Common {
    std::string output;
    std::string manifest;
};

void add_common(CLI::App* app, Common& common) {
    app->add_option("-o,--output,--out", common.output, "Result file");
    app->add_option("--manifest", common.manifest, "Write the run manifest here instead of stdout");
}

Vector weights_or_ones(const std::string& path, std::size_t n) {
    if (path.empty()) return Vector::Ones(static_cast<Eigen::Index>(n));
    Vector w = io::read_vector(path);
    if (static_cast<std::size_t>(w.size()) != n)
        throw Error(ErrorKind::DimensionMismatch, path + ": expected " + std::to_string(n) + " weights, got " +
                                                      std::to_string(w.size()));
    return w;
}

std::string balanced_path(const std::string& explicit_path, const std::string& output) {
    if (!explicit_path.empty()) return explicit_path;
    if (output.empty()) return {};
    std::filesystem::path p(output);
    p.replace_extension();
    return p.string() + ".balanced.csv";
}

} // namespace

int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Contraction certificates and minimal-effort gains for Metzler network bounds", "netcontract"};
    app.set_version_flag("--version", NETCONTRACT_VERSION);
    app.require_subcommand(1);

    Common common;
    Run run;

    // balance
    std::string input, weights, jhat, config, balanced_out, partition, norms;
    double tol = 1e-10, target = 0.0, rate = 0.0;
    std::size_t max_sweeps = 100000;
    std::optional<std::uint64_t> seed;
    std::optional<double> t_end, step;

    auto* balance_cmd = app.add_subcommand("balance", "Balance an irreducible Metzler matrix by diagonal similarity");
    balance_cmd->add_option("--input", input, "Matrix (Matrix Market or CSV)")->required();
    balance_cmd->add_option("--tol", tol, "Imbalance tolerance");
    balance_cmd->add_option("--max-sweeps", max_sweeps, "Sweep cap");
    balance_cmd->add_option("--balanced-out", balanced_out, "Balanced matrix file (.mtx or .csv)");
    add_common(balance_cmd, common);

    auto* stabilize_cmd = app.add_subcommand("stabilize", "Minimal weighted diagonal perturbation reaching a target abscissa");
    stabilize_cmd->add_option("--input", input, "Metzler matrix")->required();
    stabilize_cmd->add_option("--weights", weights, "Positive weights (default all ones)");
    stabilize_cmd->add_option("--target", target, "Target spectral abscissa")->required();
    stabilize_cmd->add_option("--tol", tol, "Balancing tolerance");
    add_common(stabilize_cmd, common);

    auto* bound_cmd = app.add_subcommand("bound", "Reduced block bound matrix of a partitioned matrix");
    bound_cmd->add_option("--input", input, "Matrix")->required();
    bound_cmd->add_option("--partition", partition, "Block sizes, e.g. 2,2,3")->required();
    bound_cmd->add_option("--norms", norms, "Block norms from {1,2,inf}, one or per block")->default_val("2");
    add_common(bound_cmd, common);

    auto* synth_cmd = app.add_subcommand("synthesize", "Minimal local gains for a contraction rate");
    synth_cmd->add_option("--jhat", jhat, "Jacobian bound matrix")->required();
    synth_cmd->add_option("--weights", weights, "Positive weights (default all ones)");
    synth_cmd->add_option("--rate", rate, "Contraction rate eta > 0")->required();
    synth_cmd->add_option("--tol", tol, "Balancing tolerance");
    add_common(synth_cmd, common);

    auto* fhn_cmd = app.add_subcommand("fhn", "FitzHugh-Nagumo network tools");
    fhn_cmd->require_subcommand(1);
    auto* sim_cmd = fhn_cmd->add_subcommand("simulate", "Integrate the closed loop and write a trajectory CSV");
    auto* cert_cmd = fhn_cmd->add_subcommand("certify", "Check the scaled L2 contraction certificate");
    auto* gains_cmd = fhn_cmd->add_subcommand("gains", "Closed-form minimal gains");
    for (auto* sub : {sim_cmd, cert_cmd, gains_cmd}) {
        sub->add_option("--config", config, "JSON network config")->required();
        add_common(sub, common);
    }
    sim_cmd->add_option("--seed", seed, "Overrides the config seed for the initial state");
    sim_cmd->add_option("--t-end", t_end, "Overrides the config horizon");
    sim_cmd->add_option("--step", step, "Overrides the config step");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::CallForVersion&) {
        out << NETCONTRACT_VERSION << '\n';
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "netcontract: " << e.what() << '\n';
        return kExitError;
    }

    const auto start = std::chrono::steady_clock::now();
    try {
        if (balance_cmd->parsed()) {
            run.command = "balance";
            run.inputs["matrix"] = input;
            run.params = {{"tol", tol}, {"max_sweeps", max_sweeps}};
            BalanceOptions options;
            options.tol = tol;
            options.max_sweeps = max_sweeps;
            auto r = balance(MetzlerMatrix(io::read_matrix(input)), options);
            const std::string path = balanced_path(balanced_out, common.output);
            if (!path.empty()) io::write_matrix(path, r.balanced);
            run.result = {{"d", to_json(r.d)},
                          {"residual", r.residual},
                          {"iterations", r.iterations},
                          {"clamped", r.clamped},
                          {"balanced_matrix_path", path.empty() ? json(nullptr) : json(path)}};
        } else if (stabilize_cmd->parsed()) {
            run.command = "stabilize";
            run.inputs["matrix"] = input;
            if (!weights.empty()) run.inputs["weights"] = weights;
            run.params = {{"target", target}, {"tol", tol}};
            MetzlerMatrix a(io::read_matrix(input));
            const Vector w = weights_or_ones(weights, a.size());
            StabilizeOptions options;
            options.balance.tol = tol;
            auto r = a.classification().kind == StructureKind::CompletelyReducible
                         ? stabilize_per_block(a, w, target, options)
                         : minimal_effort_stabilize(a, w, target, options);
            run.result = {{"ell_star", to_json(r.ell_star)},
                          {"d_star", to_json(r.d_star)},
                          {"target", r.target},
                          {"achieved", r.achieved},
                          {"cost", r.cost},
                          {"positive_gains", r.positive_gains},
                          {"balance_iterations", r.balance_iterations},
                          {"balance_residual", r.balance_residual},
                          {"eigen_residual", r.eigen_residual},
                          {"per_block", r.per_block},
                          {"target_met", r.target_met()}};
            if (!r.target_met()) {
                run.exit_code = kExitCertificateFailed;
                run.diagnostic = "achieved abscissa " + io::format_double(r.achieved) + " misses target " +
                                 io::format_double(target);
            }
        } else if (bound_cmd->parsed()) {
            run.command = "bound";
            run.inputs["matrix"] = input;
            run.params = {{"partition", partition}, {"norms", norms}};
            auto b = block_bound_matrix(io::read_matrix(input), BlockPartition::parse(partition, norms));
            if (!common.output.empty()) io::write_matrix(common.output, b.entries());
            const auto abscissa = spectral_abscissa_report(b);
            run.result = {{"bound", to_json(b.entries())},
                          {"abscissa", abscissa.value},
                          {"hurwitz", abscissa.value < 0.0},
                          {"structure", to_string(b.classification().kind)}};
            common.output.clear(); // the matrix file is the output; JSON stays in the manifest
        } else if (synth_cmd->parsed()) {
            run.command = "synthesize";
            run.inputs["jhat"] = jhat;
            if (!weights.empty()) run.inputs["weights"] = weights;
            run.params = {{"rate", rate}, {"tol", tol}};
            MetzlerMatrix j(io::read_matrix(jhat));
            const Vector w = weights_or_ones(weights, j.size());
            StabilizeOptions options;
            options.balance.tol = tol;
            try {
                auto g = synthesize_gains(j, w, rate, options);
                run.result = {{"v_star", to_json(g.v_star)},
                              {"d", to_json(g.d)},
                              {"rate", g.rate},
                              {"cost", g.cost},
                              {"closed_loop_abscissa", g.closed_loop_abscissa},
                              {"hypothesis_ok", true}};
            } catch (const Error& e) {
                if (e.kind() != ErrorKind::HypothesisViolated) throw;
                run.result = {{"hypothesis_ok", false}, {"violation", e.what()}};
                run.exit_code = kExitCertificateFailed;
                run.diagnostic = e.what();
            }
        } else if (fhn_cmd->parsed()) {
            run.inputs["config"] = config;
            auto cfg = fhn::load_config(config);
            if (sim_cmd->parsed()) {
                run.command = "fhn simulate";
                if (seed) cfg.seed = *seed;
                if (t_end) cfg.t_end = *t_end;
                if (step) cfg.step = *step;
                run.params = {{"seed", cfg.seed}, {"t_end", cfg.t_end}, {"step", cfg.step}};
                const Vector x0 = cfg.initial_state();
                auto tr = fhn::simulate(cfg, x0, cfg.t_end, cfg.step);
                if (!common.output.empty()) {
                    std::ofstream f(common.output, std::ios::binary);
                    if (!f) throw Error(ErrorKind::Io, "cannot open '" + common.output + "' for writing");
                    fhn::write_trajectory_csv(f, tr, cfg.neurons());
                }
                run.result = {{"samples", tr.times.size()},
                              {"gains", to_json(cfg.resolved_gains())},
                              {"x0", to_json(x0)},
                              {"final_state", to_json(tr.states.back())},
                              {"trajectory_path", common.output.empty() ? json(nullptr) : json(common.output)}};
                common.output.clear();
            } else if (cert_cmd->parsed()) {
                run.command = "fhn certify";
                auto c = fhn::certify(cfg);
                json checks = json::array();
                for (const auto& h : c.checks)
                    checks.push_back({{"name", h.name}, {"passed", h.passed}, {"residual", h.residual}});
                run.result = {{"eta_requested", c.eta_requested},
                              {"eta_certified", c.eta_certified},
                              {"mu_voltage", c.mu_voltage},
                              {"mu_scaled", c.mu_scaled},
                              {"passed", c.passed()},
                              {"hypothesis_checks", checks}};
                if (!c.passed()) {
                    run.exit_code = kExitCertificateFailed;
                    run.diagnostic = "certificate failed: " + c.first_failure();
                }
            } else {
                run.command = "fhn gains";
                const Matrix l = fhn::laplacian(cfg.adjacency);
                const Vector g = fhn::fhn_gains(l, cfg.c, cfg.gamma, cfg.eta);
                Matrix closed = fhn::voltage_block_bound(l, cfg.c, cfg.gamma);
                closed.diagonal() -= g;
                run.result = {{"ell_star", to_json(g)},
                              {"eta", cfg.eta},
                              {"mu_voltage", matrix_measure(closed, NormKind::Two)}};
            }
        }

        if (!common.output.empty()) write_text(common.output, run.result.dump(2) + "\n");
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::HypothesisViolated) {
            err << "netcontract: hypothesis violated: " << e.what() << '\n';
            return kExitCertificateFailed;
        }
        err << "netcontract: " << to_string(e.kind()) << ": " << e.what() << '\n';
        return kExitError;
    } catch (const std::exception& e) {
        err << "netcontract: " << e.what() << '\n';
        return kExitError;
    }

    const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    json manifest = {{"command", run.command},     {"version", NETCONTRACT_VERSION}, {"inputs", run.inputs},
                     {"params", run.params},       {"duration_s", elapsed},          {"exit_code", run.exit_code},
                     {"result", run.result}};
    if (!run.diagnostic.empty()) err << "netcontract: " << run.diagnostic << '\n';
    try {
        if (common.manifest.empty())
            out << manifest.dump(2) << '\n';
        else
            write_text(common.manifest, manifest.dump(2) + "\n");
    } catch (const Error& e) {
        err << "netcontract: " << e.what() << '\n';
        return kExitError;
    }
    return run.exit_code;
}

} // namespace netcontract::cli
