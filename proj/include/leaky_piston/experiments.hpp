/**
 * @file experiments.hpp
 * @brief Reproduction drivers: iterate curves of the added-damping operator
 * and convergence-rate sweeps of the coupled piston.
 */
#pragma once

#include "leaky_piston/csv.hpp"
#include "leaky_piston/dn_coupling.hpp"
#include "leaky_piston/model_core.hpp"
#include "leaky_piston/volterra.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <limits>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

namespace leaky_piston {

// ---------------------------------------------------------------------------
// Added-damping iterates e_k = (alpha_d Ld)^k e_0 with e_0(s) = s^2
// ---------------------------------------------------------------------------

struct Figure3Options {
    std::vector<double> alpha_d{2.0, 5.0};
    double omega = 1.0;
    std::size_t n = 257;
    std::size_t k_max = 10;
};

struct Figure3Curve {
    double alpha_d = 0.0;
    std::vector<GridFunction> iterates; ///< k = 0..k_max
    std::vector<double> ratios;         ///< ||e_k||_H1 / ||e_0||_H1
};

inline std::vector<Figure3Curve> figure3(const Figure3Options& opt) {
    const VolterraOperators ops(OperatorConfig{opt.omega, opt.n});
    const auto eps0 = GridFunction::sample(opt.n, [](double s) { return s * s; });
    std::vector<Figure3Curve> curves;
    for (double ad : opt.alpha_d) {
        Figure3Curve c;
        c.alpha_d = ad;
        c.iterates = ops.apply_mixture(0.0, ad, eps0, opt.k_max);
        const double base = h1_norm(eps0);
        for (const auto& e : c.iterates) c.ratios.push_back(h1_norm(e) / base);
        curves.push_back(std::move(c));
    }
    return curves;
}

inline std::string value_tag(double v) {
    std::string s = io::format_number(v);
    std::replace(s.begin(), s.end(), '.', 'p');
    std::replace(s.begin(), s.end(), '-', 'm');
    std::replace(s.begin(), s.end(), '+', 'P');
    return s;
}

/// figure3_curves_ad<v>.csv (s, k0..kK) per alpha_d and figure3_norms.csv.
inline std::vector<std::filesystem::path> write_figure3(const std::vector<Figure3Curve>& curves,
                                                        const std::filesystem::path& out_dir) {
    std::vector<std::filesystem::path> written;
    for (const auto& c : curves) {
        std::vector<std::string> header{"s"};
        for (std::size_t k = 0; k < c.iterates.size(); ++k) header.push_back("k" + std::to_string(k));
        std::vector<std::vector<std::string>> rows;
        const std::size_t n = c.iterates.front().size();
        for (std::size_t i = 0; i < n; ++i) {
            std::vector<std::string> row{io::format_number(c.iterates.front().node(i))};
            for (const auto& e : c.iterates) row.push_back(io::format_number(e[i]));
            rows.push_back(std::move(row));
        }
        auto path = out_dir / ("figure3_curves_ad" + value_tag(c.alpha_d) + ".csv");
        io::write_table(path, header, rows);
        written.push_back(path);
    }
    std::vector<std::string> header{"k"};
    for (const auto& c : curves) {
        header.push_back("ratio_ad" + value_tag(c.alpha_d));
        header.push_back("log10_ratio_ad" + value_tag(c.alpha_d));
    }
    std::vector<std::vector<std::string>> rows;
    const std::size_t kk = curves.empty() ? 0 : curves.front().ratios.size();
    for (std::size_t k = 0; k < kk; ++k) {
        std::vector<std::string> row{std::to_string(k)};
        for (const auto& c : curves) {
            row.push_back(io::format_number(c.ratios[k]));
            row.push_back(io::format_number(std::log10(c.ratios[k])));
        }
        rows.push_back(std::move(row));
    }
    auto path = out_dir / "figure3_norms.csv";
    io::write_table(path, header, rows);
    written.push_back(path);
    return written;
}

// ---------------------------------------------------------------------------
// Parameter sweeps
// ---------------------------------------------------------------------------

enum class SweepParameter { kappa_f, tau, m_s, rho_f };

inline std::string_view to_string(SweepParameter p) noexcept {
    switch (p) {
    case SweepParameter::kappa_f: return "kappa_f";
    case SweepParameter::tau: return "tau";
    case SweepParameter::m_s: return "m_s";
    case SweepParameter::rho_f: return "rho_f";
    }
    return "unknown";
}

inline SweepParameter parse_sweep_parameter(std::string_view name) {
    if (name == "kappa_f") return SweepParameter::kappa_f;
    if (name == "tau") return SweepParameter::tau;
    if (name == "m_s") return SweepParameter::m_s;
    if (name == "rho_f") return SweepParameter::rho_f;
    throw ValidationError("parameter", "sweep parameter must be one of kappa_f, tau, m_s, rho_f");
}

/// Damping-dominated base case at piston scale (omega = 0.01, alpha_d = 0.5, alpha_m = 1e-5).
inline PistonParams default_sweep_base() {
    PistonParams::Values v;
    v.rho_f = 0.01;
    v.ell0 = 0.1;
    v.u0 = 0.1;
    v.m_s = 100.0;
    v.kappa_s = 100.0;
    v.kappa_f = 5e3;
    v.tau = 0.01;
    return PistonParams(v);
}

/// Measurement coupling: a fixed budget of 8 iterations so the rate window always exists.
inline CouplingConfig default_sweep_coupling() {
    CouplingConfig c;
    c.tol = 1e-14;
    c.max_iters = 8;
    c.extrapolation_order = 1;
    return c;
}

inline std::vector<double> default_sweep_values(SweepParameter p) {
    switch (p) {
    case SweepParameter::kappa_f: return {1e3, 2e3, 5e3, 1e4};
    case SweepParameter::tau: return {0.0025, 0.005, 0.01, 0.02};
    case SweepParameter::m_s: return {100.0, 200.0, 400.0, 800.0};
    case SweepParameter::rho_f: return {0.01, 0.1, 1.0};
    }
    return {};
}

struct SweepSpec {
    SweepParameter parameter = SweepParameter::kappa_f;
    std::vector<double> values;
    PistonParams base = default_sweep_base();
    CouplingConfig coupling = default_sweep_coupling();
    double spin_up = 1.0;     ///< seconds of converged transient before the measured step
    double spin_tol = 1e-8;   ///< coupling tolerance during spin-up [Pa]
    int spin_max_iters = 200;
    int k_lo = 2;
    int k_hi = 6;

    void validate() const {
        if (values.empty()) throw ValidationError("values", "sweep needs at least one value");
        for (std::size_t i = 0; i < values.size(); ++i) {
            if (!(values[i] > 0.0) || !std::isfinite(values[i])) throw ValidationError("values", "must be positive");
            if (i > 0 && !(values[i] > values[i - 1])) throw ValidationError("values", "must be strictly increasing");
        }
        coupling.validate();
        if (!(spin_up >= 0.0)) throw ValidationError("spin_up", "must be >= 0");
        if (k_lo < 1 || k_hi - k_lo < 2) throw ValidationError("rate_window", "need k_lo >= 1 and k_hi - k_lo >= 2");
    }
};

struct SweepRecord {
    double value = 0.0;
    PistonParams params;
    DimensionlessGroups groups;
    IterationTrace trace;
    double rate = std::numeric_limits<double>::quiet_NaN();
    std::string error; ///< empty when the run completed
};

struct SweepResult {
    SweepParameter parameter = SweepParameter::kappa_f;
    std::vector<SweepRecord> records;
};

/// Spin up to t = spin_up with a converged transient, then measure one coupling step.
inline SweepRecord run_sweep_point(const SweepSpec& spec, double value) {
    SweepRecord rec;
    rec.value = value;
    try {
        rec.params = spec.base.with(to_string(spec.parameter), value);
        rec.groups = nondimensionalize(rec.params);
        PistonState start = initial_state(rec.params);
        if (spec.spin_up > 0.0) {
            CouplingConfig spin = spec.coupling;
            spin.tol = spec.spin_tol;
            spin.max_iters = spec.spin_max_iters;
            // Round the spin-up to whole coupling steps.
            const double steps = std::max(1.0, std::round(spec.spin_up / rec.params.tau()));
            start = run_transient(rec.params, spin, steps * rec.params.tau()).trajectory.back();
        }
        rec.trace = subiterate_step(rec.params, spec.coupling, start).trace;
        if (rec.trace.status == CouplingStatus::diverged) rec.error = "diverged";
        if (rec.trace.residuals.size() >= static_cast<std::size_t>(spec.k_hi)) {
            rec.rate = observed_rate(rec.trace, spec.k_lo, spec.k_hi);
        } else if (rec.error.empty()) {
            rec.error = "fewer than " + std::to_string(spec.k_hi) + " iterations";
        }
    } catch (const std::exception& e) {
        rec.error = e.what();
    }
    return rec;
}

/// Runs every sweep value; `jobs` workers pull values from a shared counter.
inline SweepResult run_sweep(const SweepSpec& spec, unsigned jobs = 1) {
    spec.validate();
    SweepResult result;
    result.parameter = spec.parameter;
    result.records.resize(spec.values.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < spec.values.size(); i = next++) {
            result.records[i] = run_sweep_point(spec, spec.values[i]);
        }
    };
    const unsigned width = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(spec.values.size())));
    if (width == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < width; ++t) pool.emplace_back(worker);
    }
    return result;
}

/// Per-value residual traces plus sweep_<param>_summary.csv.
inline std::vector<std::filesystem::path> write_sweep(const SweepResult& result, const std::filesystem::path& out_dir) {
    std::vector<std::filesystem::path> written;
    const std::string name(to_string(result.parameter));
    std::vector<std::vector<std::string>> rows;
    for (std::size_t i = 0; i < result.records.size(); ++i) {
        const auto& r = result.records[i];
        auto trace_path = out_dir / ("sweep_" + name + "_" + std::to_string(i) + "_" + value_tag(r.value) + ".csv");
        io::write_trace(trace_path, r.trace);
        written.push_back(trace_path);
        const auto& v = r.params.values();
        rows.push_back({io::format_number(r.value), io::format_number(v.rho_f), io::format_number(v.ell0),
                        io::format_number(v.m_s), io::format_number(v.kappa_s), io::format_number(v.kappa_f),
                        io::format_number(v.tau), io::format_number(r.groups.omega),
                        io::format_number(r.groups.alpha_m), io::format_number(r.groups.alpha_d),
                        io::format_number(r.rate), r.error.empty() ? to_string(r.trace.status) : "error",
                        std::to_string(r.trace.iterations)});
    }
    auto summary = out_dir / ("sweep_" + name + "_summary.csv");
    io::write_table(summary,
                    {"value", "rho_f", "ell0", "m_s", "kappa_s", "kappa_f", "tau", "omega", "alpha_m", "alpha_d",
                     "rate", "status", "iterations"},
                    rows);
    written.push_back(summary);
    return written;
}

} // namespace leaky_piston
