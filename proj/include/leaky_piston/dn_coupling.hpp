/**
 * @file dn_coupling.hpp
 * @brief Dirichlet-Neumann subiteration for the leaky piston.
 *
 * Within each coupling step the structure receives the interface pressure
 * (Neumann data) and the fluid receives the interface displacement and
 * velocity (Dirichlet data). The two solves alternate until the RMS update of
 * the transferred pressure falls below the tolerance.
 */
#pragma once

#include "leaky_piston/model_core.hpp"
#include "leaky_piston/piston.hpp"

#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace leaky_piston {

struct CouplingConfig {
    double tol = 1e-10;                 ///< on the RMS pressure update [Pa]
    int max_iters = 100;
    double relaxation = 1.0;            ///< 1 = plain Gauss-Seidel
    int extrapolation_order = 2;        ///< 0, 1 or 2; order 0 violates d'(0) = u0 consistency
    std::size_t inner_steps = 32;       ///< implicit-Euler substeps per coupling step
    AddedMass added_mass = AddedMass::linearized; ///< linearized freezes rho_f d at the start-of-step length
    RecoveryStencil stencil = RecoveryStencil::backward;
    double divergence_factor = 1e12;    ///< residual / first residual that counts as divergence

    void validate() const {
        if (!(tol > 0.0) || !std::isfinite(tol)) throw ValidationError("tol", "must be > 0");
        if (max_iters < 1) throw ValidationError("max_iters", "must be >= 1");
        if (!(relaxation > 0.0 && relaxation <= 1.0)) throw ValidationError("relaxation", "must lie in (0, 1]");
        if (extrapolation_order < 0 || extrapolation_order > 2) {
            throw ValidationError("extrapolation_order", "must be 0, 1 or 2");
        }
        if (inner_steps < 1) throw ValidationError("inner_steps", "must be >= 1");
        if (!(divergence_factor > 1.0)) throw ValidationError("divergence_factor", "must be > 1");
    }
};

enum class CouplingStatus { converged, max_iters_exceeded, diverged };

inline const char* to_string(CouplingStatus s) noexcept {
    switch (s) {
    case CouplingStatus::converged: return "converged";
    case CouplingStatus::max_iters_exceeded: return "max_iters_exceeded";
    case CouplingStatus::diverged: return "diverged";
    }
    return "unknown";
}

/// Residual k (1-based iteration counter) is residuals[k - 1].
struct IterationTrace {
    std::vector<double> residuals;
    bool converged = false;
    int iterations = 0;
    CouplingStatus status = CouplingStatus::max_iters_exceeded;
};

struct StepResult {
    PistonState end;
    IterationTrace trace;
    MotionHistory motion;          ///< last structure solution on the inner grid
    std::vector<double> pressure;  ///< fluid response to `motion`
};

/// A time step that did not converge. Carries the partial trace.
class CouplingFailure : public std::runtime_error {
public:
    CouplingFailure(CouplingStatus status, std::size_t step, double time, IterationTrace trace)
        : std::runtime_error(std::string(to_string(status)) + " in time step " + std::to_string(step) +
                             " (t=" + std::to_string(time) + ")"),
          status_(status), step_(step), time_(time), trace_(std::move(trace)) {}

    CouplingStatus status() const noexcept { return status_; }
    std::size_t step() const noexcept { return step_; }
    double time() const noexcept { return time_; }
    const IterationTrace& trace() const noexcept { return trace_; }

private:
    CouplingStatus status_;
    std::size_t step_;
    double time_;
    IterationTrace trace_;
};

/// Root-mean-square of a - b over inner nodes 1..n-1.
inline double rms_update(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size() || a.size() < 2) throw std::invalid_argument("rms_update: size mismatch");
    double sum = 0.0;
    for (std::size_t j = 1; j < a.size(); ++j) {
        const double diff = a[j] - b[j];
        sum += diff * diff;
    }
    return std::sqrt(sum / static_cast<double>(a.size() - 1));
}

/// Acceleration implied by a state through the structure equation.
inline double structural_acceleration(const PistonParams& p, const PistonState& s) {
    return (s.p_interface - p.kappa_s() * s.d) / p.m_s();
}

/// Initial motion estimate on the inner grid from a Taylor extrapolation of the start state.
inline MotionHistory extrapolate_motion(const PistonParams& p, const PistonState& start, int order,
                                        const StepGrid& grid) {
    const double a = order >= 2 ? structural_acceleration(p, start) : 0.0;
    MotionHistory m;
    m.d.resize(grid.nodes());
    m.v.resize(grid.nodes());
    for (std::size_t j = 0; j < grid.nodes(); ++j) {
        const double t = grid.time(j);
        switch (order) {
        case 0:
            m.d[j] = start.d;
            m.v[j] = start.v;
            break;
        case 1:
            m.d[j] = start.d + start.v * t;
            m.v[j] = start.v;
            break;
        default:
            m.d[j] = start.d + start.v * t + 0.5 * a * t * t;
            m.v[j] = start.v + a * t;
            break;
        }
    }
    return m;
}

inline FluidOptions fluid_options(const CouplingConfig& cfg, double frozen_length) {
    return FluidOptions{cfg.added_mass, frozen_length, cfg.stencil};
}

/**
 * @brief One coupling step of size tau starting from `init`.
 *
 * Iteration k solves the structure under the relaxed pressure p*_{k-1},
 * solves the fluid for p_k, records ||p_k - p*_{k-1}||_RMS and relaxes
 * p*_k = relaxation p_k + (1 - relaxation) p*_{k-1}. The pressure that seeds
 * k = 1 is the fluid response to the extrapolated motion.
 */
inline StepResult subiterate_step(const PistonParams& p, const CouplingConfig& cfg, const PistonState& init) {
    cfg.validate();
    if (!(init.d > 0.0)) throw std::invalid_argument("subiterate_step: initial displacement must be > 0");
    const StepGrid grid = StepGrid::for_step(p.tau(), cfg.inner_steps);
    const FluidOptions fopt = fluid_options(cfg, init.d);

    StepResult result;
    MotionHistory motion = extrapolate_motion(p, init, cfg.extrapolation_order, grid);
    std::vector<double> transferred = fluid_step(p, motion, grid, fopt);
    std::vector<double> response;

    IterationTrace& trace = result.trace;
    const double alpha = cfg.relaxation;
    for (int k = 1; k <= cfg.max_iters; ++k) {
        motion = solid_step(p, init.d, init.v, transferred, grid);
        if (cfg.added_mass == AddedMass::nonlinear) {
            for (double d : motion.d) {
                if (!(d > 0.0)) {
                    trace.status = CouplingStatus::diverged;
                    trace.iterations = static_cast<int>(trace.residuals.size());
                    result.end = PistonState{motion.d.back(), motion.v.back(), transferred.back()};
                    result.motion = std::move(motion);
                    result.pressure = transferred;
                    return result;
                }
            }
        }
        response = fluid_step(p, motion, grid, fopt);
        const double r = rms_update(response, transferred);
        if (!std::isfinite(r) || (!trace.residuals.empty() && r > cfg.divergence_factor * trace.residuals.front())) {
            trace.status = CouplingStatus::diverged;
            break;
        }
        trace.residuals.push_back(r);
        for (std::size_t j = 0; j < transferred.size(); ++j) {
            transferred[j] = alpha * response[j] + (1.0 - alpha) * transferred[j];
        }
        if (r < cfg.tol) {
            trace.status = CouplingStatus::converged;
            break;
        }
    }
    trace.iterations = static_cast<int>(trace.residuals.size());
    trace.converged = trace.status == CouplingStatus::converged;

    result.end = PistonState{motion.d.back(), motion.v.back(), response.empty() ? 0.0 : response.back()};
    result.motion = std::move(motion);
    result.pressure = std::move(response);
    return result;
}

struct TransientResult {
    Trajectory trajectory;
    std::vector<IterationTrace> traces;
};

/// Consistent initial state: pressure from the coupled equation at t = 0.
inline PistonState initial_state(const PistonParams& p) {
    const double meff = p.m_s() - p.rho_f() * p.ell0();
    if (!(meff > 0.0)) {
        // Without a positive effective mass the acceleration is undefined; start from the resistive load.
        return PistonState{p.ell0(), p.u0(), -p.kappa_f() * p.u0()};
    }
    const double a0 = -(p.kappa_f() * p.u0() + p.kappa_s() * p.ell0()) / meff;
    return PistonState{p.ell0(), p.u0(), ps_pressure(p, p.ell0(), p.u0(), a0)};
}

/**
 * @brief March coupling steps of size tau up to t_fin.
 *
 * The trajectory holds every inner node, so it can be compared node by node
 * with solve_monolithic(p, t_fin, tau / inner_steps).
 * @throws CouplingFailure when a step does not converge.
 */
inline TransientResult run_transient(const PistonParams& p, const CouplingConfig& cfg, double t_fin) {
    cfg.validate();
    const std::size_t steps = detail::step_count(t_fin, p.tau());
    const StepGrid grid = StepGrid::for_step(p.tau(), cfg.inner_steps);

    TransientResult out;
    PistonState state = initial_state(p);
    out.trajectory.append(0.0, state);
    for (std::size_t n = 0; n < steps; ++n) {
        StepResult step = subiterate_step(p, cfg, state);
        const double t_end = static_cast<double>(n + 1) * p.tau();
        if (!step.trace.converged) throw CouplingFailure(step.trace.status, n + 1, t_end, std::move(step.trace));
        for (std::size_t j = 1; j < grid.nodes(); ++j) {
            const double t = static_cast<double>(n * grid.steps + j) * grid.h;
            out.trajectory.append(t, {step.motion.d[j], step.motion.v[j], step.pressure[j]});
        }
        state = step.end;
        if (!(state.d > 0.0)) throw SolverError("fluid column collapsed (d <= 0)", t_end);
        out.traces.push_back(std::move(step.trace));
    }
    return out;
}

/**
 * @brief Propagate an iteration error through the linearized coupling.
 *
 * Runs the same structure and fluid kernels as subiterate_step with zero
 * initial data and the added mass frozen at ell0, so the fixed point is zero
 * and the k-th iterate is the k-th error. `eps0` is the initial displacement
 * error at the inner nodes (eps0[0] must be 0). Relaxation is not applied.
 * Returns [eps_0, ..., eps_k].
 */
inline std::vector<std::vector<double>> iterate_errors(const PistonParams& p, const CouplingConfig& cfg,
                                                       std::span<const double> eps0, std::size_t k) {
    cfg.validate();
    const StepGrid grid = StepGrid::for_step(p.tau(), cfg.inner_steps);
    if (eps0.size() != grid.nodes()) throw std::invalid_argument("iterate_errors: eps0/grid size mismatch");
    if (eps0[0] != 0.0) throw std::invalid_argument("iterate_errors: eps0 must vanish at t = 0");
    const FluidOptions fopt{AddedMass::linearized, p.ell0(), cfg.stencil};

    MotionHistory motion;
    motion.d.assign(eps0.begin(), eps0.end());
    motion.v.assign(grid.nodes(), 0.0);
    for (std::size_t j = 1; j < grid.nodes(); ++j) motion.v[j] = (motion.d[j] - motion.d[j - 1]) / grid.h;

    std::vector<std::vector<double>> errors{motion.d};
    for (std::size_t i = 1; i <= k; ++i) {
        const auto pressure = fluid_step(p, motion, grid, fopt);
        motion = solid_step(p, 0.0, 0.0, pressure, grid);
        errors.push_back(motion.d);
    }
    return errors;
}

/// Least-squares slope of log10(residual_k) over k in [k_lo, k_hi] (1-based).
inline double observed_rate(const IterationTrace& trace, int k_lo, int k_hi) {
    if (k_lo < 1 || k_hi - k_lo < 2) throw std::invalid_argument("observed_rate: need k_lo >= 1 and k_hi - k_lo >= 2");
    if (static_cast<std::size_t>(k_hi) > trace.residuals.size()) {
        throw std::invalid_argument("observed_rate: window exceeds trace length");
    }
    std::vector<double> ks;
    std::vector<double> ys;
    for (int k = k_lo; k <= k_hi; ++k) {
        const double r = trace.residuals[static_cast<std::size_t>(k - 1)];
        if (!(r > 0.0)) throw std::domain_error("observed_rate: nonpositive residual at k=" + std::to_string(k));
        ks.push_back(k);
        ys.push_back(std::log10(r));
    }
    const double n = static_cast<double>(ks.size());
    const double kbar = std::accumulate(ks.begin(), ks.end(), 0.0) / n;
    const double ybar = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
    double sxy = 0.0;
    double sxx = 0.0;
    for (std::size_t i = 0; i < ks.size(); ++i) {
        sxy += (ks[i] - kbar) * (ys[i] - ybar);
        sxx += (ks[i] - kbar) * (ks[i] - kbar);
    }
    return sxy / sxx;
}

} // namespace leaky_piston
