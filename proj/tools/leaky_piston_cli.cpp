// leaky-piston: command-line driver for the coupling toolkit.
//
// Exit codes: 0 ok/converged, 1 usage or configuration error,
// 2 coupling hit max_iters, 3 coupling diverged or the model broke down.
#include "leaky_piston.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace leaky_piston;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_usage = 1;
constexpr int exit_max_iters = 2;
constexpr int exit_diverged = 3;

std::set<std::string, std::less<>> config_keys() {
    auto keys = parameter_keys();
    for (const auto& k : coupling_keys()) keys.insert(k);
    for (const char* k : {"t_fin", "mode", "monolithic_added_mass", "sweep_parameter", "sweep_values", "spin_up",
                          "spin_tol", "spin_max_iters", "rate_k_lo", "rate_k_hi", "omega", "n", "k_max",
                          "alpha_m", "alpha_d", "alpha_d_values", "input", "kappa", "kappa_ref", "area", "vdot"}) {
        keys.emplace(k);
    }
    return keys;
}

struct Globals {
    std::string config_path;
    std::string out_dir = "out";
    unsigned jobs = 1;
    std::uint64_t seed = 0; // reserved; every computation is deterministic
    ConfigMap cfg;
};

using Manifest = std::map<std::string, std::string>;

Manifest base_manifest(const Globals& g, const std::string& command) {
    return {{"command", command},
            {"config", g.config_path.empty() ? "(none)" : g.config_path},
            {"jobs", std::to_string(g.jobs)},
            {"seed", std::to_string(g.seed)},
            {"tool", "leaky-piston 1.0.0"}};
}

void add_params(Manifest& m, const PistonParams& p) {
    for (auto key : PistonParams::keys()) m[std::string(key)] = io::format_number(p.get(key));
    const auto g = nondimensionalize(p);
    m["omega"] = io::format_number(g.omega);
    m["alpha_m"] = io::format_number(g.alpha_m);
    m["alpha_d"] = io::format_number(g.alpha_d);
}

void add_coupling(Manifest& m, const CouplingConfig& c) {
    m["tol"] = io::format_number(c.tol);
    m["max_iters"] = std::to_string(c.max_iters);
    m["relaxation"] = io::format_number(c.relaxation);
    m["extrapolation_order"] = std::to_string(c.extrapolation_order);
    m["inner_steps"] = std::to_string(c.inner_steps);
    m["added_mass"] = c.added_mass == AddedMass::nonlinear ? "nonlinear" : "linearized";
    m["recovery"] = c.stencil == RecoveryStencil::backward ? "backward" : "second_order";
    m["divergence_factor"] = io::format_number(c.divergence_factor);
}

void add_files(Manifest& m, const std::vector<fs::path>& files) {
    std::string list;
    for (const auto& f : files) list += (list.empty() ? "" : ", ") + f.filename().string();
    m["files"] = list;
}

fs::path finish(const Globals& g, const std::string& command, Manifest m) {
    const auto path = fs::path(g.out_dir) / ("manifest_" + command + ".txt");
    io::write_manifest(path, m);
    return path;
}

GridFunction named_input(const std::string& name, std::size_t n) {
    if (name == "one") return GridFunction::sample(n, [](double) { return 1.0; });
    if (name == "s") return GridFunction::sample(n, [](double s) { return s; });
    if (name == "s2") return GridFunction::sample(n, [](double s) { return s * s; });
    throw ConfigError("input must be one of: one, s, s2");
}

// ---------------------------------------------------------------------------

struct Figure3Args {
    std::vector<double> alpha_d;
    std::optional<double> omega;
    std::optional<std::size_t> n;
    std::optional<std::size_t> k_max;
};

int run_figure3(const Globals& g, const Figure3Args& a) {
    Figure3Options opt;
    opt.alpha_d = a.alpha_d.empty() ? g.cfg.numbers("alpha_d_values", opt.alpha_d) : a.alpha_d;
    opt.omega = a.omega.value_or(g.cfg.number("omega", opt.omega));
    opt.n = a.n.value_or(static_cast<std::size_t>(g.cfg.number("n", static_cast<double>(opt.n))));
    opt.k_max = a.k_max.value_or(static_cast<std::size_t>(g.cfg.number("k_max", static_cast<double>(opt.k_max))));
    OperatorConfig{opt.omega, opt.n}.validate();

    const auto curves = figure3(opt);
    const auto files = write_figure3(curves, g.out_dir);
    auto m = base_manifest(g, "figure3");
    m["omega"] = io::format_number(opt.omega);
    m["n"] = std::to_string(opt.n);
    m["k_max"] = std::to_string(opt.k_max);
    std::string ads;
    for (double ad : opt.alpha_d) ads += (ads.empty() ? "" : ",") + io::format_number(ad);
    m["alpha_d_values"] = ads;
    add_files(m, files);
    finish(g, "figure3", m);

    for (const auto& c : curves) {
        std::cout << "alpha_d=" << io::format_number(c.alpha_d) << " ratios:";
        for (double r : c.ratios) std::cout << ' ' << r;
        std::cout << '\n';
    }
    return exit_ok;
}

// ---------------------------------------------------------------------------

struct SweepArgs {
    std::string parameter;
    std::vector<double> values;
    std::optional<double> spin_up;
};

int run_sweep_command(const Globals& g, const SweepArgs& a) {
    SweepSpec spec;
    spec.parameter = parse_sweep_parameter(a.parameter.empty() ? g.cfg.text("sweep_parameter", "kappa_f") : a.parameter);
    spec.values = a.values.empty() ? g.cfg.numbers("sweep_values", default_sweep_values(spec.parameter)) : a.values;
    spec.base = params_from_config(g.cfg, default_sweep_base());
    spec.coupling = coupling_from_config(g.cfg, default_sweep_coupling());
    spec.spin_up = a.spin_up.value_or(g.cfg.number("spin_up", spec.spin_up));
    spec.spin_tol = g.cfg.number("spin_tol", spec.spin_tol);
    spec.spin_max_iters = static_cast<int>(g.cfg.number("spin_max_iters", spec.spin_max_iters));
    spec.k_lo = static_cast<int>(g.cfg.number("rate_k_lo", spec.k_lo));
    spec.k_hi = static_cast<int>(g.cfg.number("rate_k_hi", spec.k_hi));

    const auto result = run_sweep(spec, g.jobs);
    const auto files = write_sweep(result, g.out_dir);

    auto m = base_manifest(g, "sweep");
    add_params(m, spec.base);
    add_coupling(m, spec.coupling);
    m["sweep_parameter"] = std::string(to_string(spec.parameter));
    std::string vals;
    for (double v : spec.values) vals += (vals.empty() ? "" : ",") + io::format_number(v);
    m["sweep_values"] = vals;
    m["spin_up"] = io::format_number(spec.spin_up);
    m["spin_tol"] = io::format_number(spec.spin_tol);
    m["spin_max_iters"] = std::to_string(spec.spin_max_iters);
    m["rate_k_lo"] = std::to_string(spec.k_lo);
    m["rate_k_hi"] = std::to_string(spec.k_hi);
    add_files(m, files);

    int code = exit_ok;
    for (const auto& r : result.records) {
        std::cout << to_string(spec.parameter) << '=' << io::format_number(r.value) << " rate=" << r.rate
                  << (r.error.empty() ? "" : " error: " + r.error) << '\n';
        if (r.trace.status == CouplingStatus::diverged || !r.error.empty()) code = exit_diverged;
    }
    m["status"] = code == exit_ok ? "ok" : "failed";
    finish(g, "sweep", m);
    return code;
}

// ---------------------------------------------------------------------------

struct PistonArgs {
    std::string mode;
    std::optional<double> t_fin;
};

int run_piston(const Globals& g, const PistonArgs& a) {
    const std::string mode = a.mode.empty() ? g.cfg.text("mode", "both") : a.mode;
    if (mode != "monolithic" && mode != "partitioned" && mode != "both") {
        throw ConfigError("mode must be monolithic, partitioned or both");
    }
    const auto params = params_from_config(g.cfg);
    const auto coupling = coupling_from_config(g.cfg);
    const double t_fin = a.t_fin.value_or(g.cfg.number("t_fin", 1.0));
    MonolithicOptions mono_opt;
    const auto mono_mass = g.cfg.text("monolithic_added_mass", "nonlinear");
    if (mono_mass == "linearized") {
        mono_opt.added_mass = AddedMass::linearized;
    } else if (mono_mass != "nonlinear") {
        throw ConfigError("monolithic_added_mass must be 'nonlinear' or 'linearized'");
    }

    auto m = base_manifest(g, "piston");
    add_params(m, params);
    add_coupling(m, coupling);
    m["mode"] = mode;
    m["t_fin"] = io::format_number(t_fin);
    m["monolithic_added_mass"] = mono_mass;
    std::vector<fs::path> files;
    const fs::path out(g.out_dir);

    std::optional<Trajectory> mono;
    std::optional<Trajectory> part;
    int code = exit_ok;
    try {
        if (mode != "partitioned") {
            mono = solve_monolithic(params, t_fin, params.tau() / static_cast<double>(coupling.inner_steps), mono_opt);
            files.push_back(out / "piston_monolithic.csv");
            io::write_trajectory(files.back(), *mono);
        }
        if (mode != "monolithic") {
            auto result = run_transient(params, coupling, t_fin);
            part = std::move(result.trajectory);
            files.push_back(out / "piston_partitioned.csv");
            io::write_trajectory(files.back(), *part);
            std::vector<std::vector<std::string>> rows;
            for (std::size_t n = 0; n < result.traces.size(); ++n) {
                const auto& tr = result.traces[n];
                rows.push_back({std::to_string(n + 1), std::to_string(tr.iterations),
                                io::format_number(tr.residuals.empty() ? 0.0 : tr.residuals.back())});
            }
            files.push_back(out / "piston_iterations.csv");
            io::write_table(files.back(), {"step", "iterations", "final_residual_rms"}, rows);
        }
        m["status"] = "converged";
    } catch (const CouplingFailure& e) {
        std::cerr << "coupling failed: " << e.what() << '\n';
        files.push_back(out / "piston_failed_trace.csv");
        io::write_trace(files.back(), e.trace());
        m["status"] = to_string(e.status());
        m["failed_step"] = std::to_string(e.step());
        code = e.status() == CouplingStatus::max_iters_exceeded ? exit_max_iters : exit_diverged;
    } catch (const SolverError& e) {
        std::cerr << "solver failed: " << e.what() << '\n';
        m["status"] = std::string("solver_error: ") + e.what();
        code = exit_diverged;
    }

    if (mono && part) {
        const double dev = max_relative_deviation(*mono, *part);
        m["max_relative_deviation"] = io::format_number(dev);
        std::cout << "max relative displacement deviation: " << dev << '\n';
    }
    if (mono) std::cout << "monolithic d(t_fin) = " << mono->back().d << '\n';
    if (part) std::cout << "partitioned d(t_fin) = " << part->back().d << '\n';
    add_files(m, files);
    finish(g, "piston", m);
    return code;
}

// ---------------------------------------------------------------------------

struct SensitivityArgs {
    std::optional<double> kappa, kappa_ref, area, vdot;
};

int run_sensitivity(const Globals& g, const SensitivityArgs& a) {
    RobinBoundarySpec spec;
    spec.kappa = a.kappa.value_or(g.cfg.number("kappa", spec.kappa));
    spec.kappa_ref = a.kappa_ref.value_or(g.cfg.number("kappa_ref", spec.kappa_ref));
    spec.area = a.area.value_or(g.cfg.number("area", spec.area));
    spec.vdot = a.vdot.value_or(g.cfg.number("vdot", spec.vdot));
    const double lambda = pressure_shift(spec);

    auto m = base_manifest(g, "sensitivity");
    m["kappa"] = io::format_number(spec.kappa);
    m["kappa_ref"] = io::format_number(spec.kappa_ref);
    m["area"] = io::format_number(spec.area);
    m["vdot"] = io::format_number(spec.vdot);
    m["pressure_shift"] = io::format_number(lambda);
    finish(g, "sensitivity", m);
    std::cout << "pressure_shift = " << io::format_number(lambda) << '\n';
    return exit_ok;
}

// ---------------------------------------------------------------------------

struct OperatorArgs {
    std::optional<double> omega, alpha_m, alpha_d;
    std::optional<std::size_t> n, k;
    std::string input;
};

int run_operators(const Globals& g, const OperatorArgs& a) {
    OperatorConfig oc;
    oc.omega = a.omega.value_or(g.cfg.number("omega", oc.omega));
    oc.n = a.n.value_or(static_cast<std::size_t>(g.cfg.number("n", static_cast<double>(oc.n))));
    oc.validate();
    const double am = a.alpha_m.value_or(g.cfg.number("alpha_m", 0.0));
    const double ad = a.alpha_d.value_or(g.cfg.number("alpha_d", 1.0));
    const std::size_t k = a.k.value_or(static_cast<std::size_t>(g.cfg.number("k_max", 10.0)));
    const std::string input = a.input.empty() ? g.cfg.text("input", "s2") : a.input;

    const VolterraOperators ops(oc);
    const auto eps = named_input(input, oc.n);
    const fs::path out(g.out_dir);
    std::vector<fs::path> files{out / "operators_ld.csv", out / "operators_lm.csv", out / "operators_norms.csv",
                                out / "operators_spectral.csv"};
    io::write_grid_function(files[0], ops.apply_ld(eps));
    io::write_grid_function(files[1], ops.apply_lm(eps));
    io::write_norm_history(files[2], ops.norm_history(am, ad, eps, k));
    const auto r = ops.quasi_nilpotency_estimate(eps, std::max<std::size_t>(k, 1));
    std::vector<std::vector<std::string>> rows;
    for (std::size_t i = 0; i < r.size(); ++i) rows.push_back({std::to_string(i + 1), io::format_number(r[i])});
    io::write_table(files[3], {"k", "r_k"}, rows);
    const double comm = ops.commutator_norm(eps);

    auto m = base_manifest(g, "operators");
    m["omega"] = io::format_number(oc.omega);
    m["n"] = std::to_string(oc.n);
    m["alpha_m"] = io::format_number(am);
    m["alpha_d"] = io::format_number(ad);
    m["k_max"] = std::to_string(k);
    m["input"] = input;
    m["commutator_norm"] = io::format_number(comm);
    add_files(m, files);
    finish(g, "operators", m);
    std::cout << "commutator norm: " << comm << '\n';
    return exit_ok;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Leaky-piston partitioned coupling toolkit"};
    app.require_subcommand(1);
    Globals g;
    app.add_option("--config", g.config_path, "key = value configuration file")->check(CLI::ExistingFile);
    app.add_option("--out", g.out_dir, "output directory")->capture_default_str();
    app.add_option("--jobs", g.jobs, "worker threads for sweeps")->check(CLI::Range(1u, 1024u))->capture_default_str();
    app.add_option("--seed", g.seed, "reserved; results are deterministic");

    Figure3Args fa;
    auto* fig = app.add_subcommand("figure3", "iterate curves and H1 norm ratios of the added-damping operator");
    fig->add_option("--alpha-d", fa.alpha_d, "alpha_d values")->delimiter(',');
    fig->add_option("--omega", fa.omega);
    fig->add_option("--n", fa.n, "grid nodes");
    fig->add_option("--k-max", fa.k_max);

    SweepArgs sa;
    auto* sweep = app.add_subcommand("sweep", "convergence-rate sweep over one parameter");
    sweep->add_option("--parameter", sa.parameter, "kappa_f, tau, m_s or rho_f");
    sweep->add_option("--values", sa.values)->delimiter(',');
    sweep->add_option("--spin-up", sa.spin_up, "converged transient before the measured step [s]");

    PistonArgs pa;
    auto* piston = app.add_subcommand("piston", "monolithic and/or partitioned transient");
    piston->add_option("--mode", pa.mode, "monolithic, partitioned or both");
    piston->add_option("--t-fin", pa.t_fin, "horizon [s]");

    SensitivityArgs xa;
    auto* sens = app.add_subcommand("sensitivity", "pressure shift for a change of flow resistance");
    sens->add_option("--kappa", xa.kappa);
    sens->add_option("--kappa-ref", xa.kappa_ref);
    sens->add_option("--area", xa.area);
    sens->add_option("--vdot", xa.vdot);

    OperatorArgs oa;
    auto* opcmd = app.add_subcommand("operators", "apply the Volterra operators to a sample function");
    opcmd->add_option("--omega", oa.omega);
    opcmd->add_option("--n", oa.n);
    opcmd->add_option("--alpha-m", oa.alpha_m);
    opcmd->add_option("--alpha-d", oa.alpha_d);
    opcmd->add_option("--k-max", oa.k);
    opcmd->add_option("--input", oa.input, "one, s or s2");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? exit_ok : exit_usage;
    }

    try {
        if (!g.config_path.empty()) g.cfg = ConfigMap::load(g.config_path, config_keys());
        if (fig->parsed()) return run_figure3(g, fa);
        if (sweep->parsed()) return run_sweep_command(g, sa);
        if (piston->parsed()) return run_piston(g, pa);
        if (sens->parsed()) return run_sensitivity(g, xa);
        if (opcmd->parsed()) return run_operators(g, oa);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_usage;
    } catch (const ValidationError& e) {
        std::cerr << "error: invalid " << e.what() << '\n';
        return exit_usage;
    } catch (const SolverError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_diverged;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_usage;
    }
    return exit_usage;
}
