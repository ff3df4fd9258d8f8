/**
 * @file piston.hpp
 * @brief Leaky-piston solvers: the monolithic reference and the separate
 * structure (Neumann) and fluid (Dirichlet) subproblems.
 *
 * The piston obeys m_s d'' + kappa_s d = p, where p is the fluid pressure at
 * the piston face. Integrating the 1D incompressible momentum balance over
 * the fluid column with a resistive lid gives the displacement-to-pressure
 * map p = rho_f d d'' - kappa_f d'. Substituting it into the piston equation
 * yields the monolithic problem
 *
 *   (m_s - rho_f d) d'' + kappa_f d' + kappa_s d = 0,  d(0) = ell0, d'(0) = u0.
 *
 * Everything is integrated with implicit Euler on the first-order system.
 */
#pragma once

#include "leaky_piston/finite_difference.hpp"
#include "leaky_piston/model_core.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace leaky_piston {

/// Raised by the solvers; carries the time at which the failure occurred.
class SolverError : public std::runtime_error {
public:
    SolverError(const std::string& what, double time)
        : std::runtime_error(what + " at t=" + std::to_string(time)), time_(time) {}

    double time() const noexcept { return time_; }

private:
    double time_;
};

struct PistonState {
    double d = 1.0;           ///< displacement = fluid column length [m]
    double v = 0.0;           ///< velocity [m/s]
    double p_interface = 0.0; ///< fluid pressure on the piston [Pa]
};

class Trajectory {
public:
    void append(double t, const PistonState& s) {
        if (!times_.empty() && !(t > times_.back())) {
            throw std::invalid_argument("Trajectory: times must be strictly increasing");
        }
        times_.push_back(t);
        states_.push_back(s);
    }

    std::size_t size() const noexcept { return times_.size(); }
    bool empty() const noexcept { return times_.empty(); }
    const std::vector<double>& times() const noexcept { return times_; }
    const std::vector<PistonState>& states() const noexcept { return states_; }
    const PistonState& back() const { return states_.back(); }

private:
    std::vector<double> times_;
    std::vector<PistonState> states_;
};

/// How the fluid's inertial term is evaluated.
enum class AddedMass {
    nonlinear,  ///< rho_f d(t) d''(t), the exact displacement-to-pressure map
    linearized, ///< rho_f d_ref d''(t) with d_ref frozen (ell0 or start-of-step length)
};

/// Displacement-to-pressure map p = rho_f d a - kappa_f v.
inline double ps_pressure(const PistonParams& p, double d, double v, double a) {
    if (!(d > 0.0)) throw std::invalid_argument("ps_pressure: displacement must be > 0");
    return p.rho_f() * d * a - p.kappa_f() * v;
}

namespace detail {

inline std::size_t step_count(double t_fin, double dt) {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("time step must be > 0");
    if (!(t_fin >= dt * (1.0 - 1e-12))) throw std::invalid_argument("horizon must be >= time step");
    const double ratio = t_fin / dt;
    const double rounded = std::round(ratio);
    if (std::abs(ratio - rounded) > 1e-9 * std::max(1.0, ratio)) {
        throw std::invalid_argument("time step must divide the horizon");
    }
    return static_cast<std::size_t>(rounded);
}

} // namespace detail

struct MonolithicOptions {
    AddedMass added_mass = AddedMass::nonlinear;
    int newton_max_iters = 50;
    double newton_rel_tol = 1e-12;
};

/**
 * @brief Monolithic reference solution on a uniform grid of step dt.
 *
 * Each implicit-Euler step eliminates d_{n+1} = d_n + dt w and solves the
 * scalar equation
 *
 *   (m_s - rho_f D) (w - v_n)/dt + kappa_f w + kappa_s (d_n + dt w) = 0
 *
 * for the new velocity w by Newton's method, with D = d_{n+1} (nonlinear) or
 * D = ell0 (linearized).
 */
inline Trajectory solve_monolithic(const PistonParams& p, double t_fin, double dt, const MonolithicOptions& opt = {}) {
    const std::size_t steps = detail::step_count(t_fin, dt);
    const bool frozen = opt.added_mass == AddedMass::linearized;
    const double m = p.m_s();
    const double rho = p.rho_f();

    auto effective_mass = [&](double d) { return m - rho * (frozen ? p.ell0() : d); };

    Trajectory traj;
    {
        const double d0 = p.ell0();
        const double v0 = p.u0();
        const double meff = effective_mass(d0);
        if (!(meff > 0.0)) throw SolverError("added-mass singularity", 0.0);
        const double a0 = -(p.kappa_f() * v0 + p.kappa_s() * d0) / meff;
        traj.append(0.0, {d0, v0, rho * (frozen ? p.ell0() : d0) * a0 - p.kappa_f() * v0});
    }

    double d = p.ell0();
    double v = p.u0();
    for (std::size_t n = 1; n <= steps; ++n) {
        const double t = static_cast<double>(n) * dt;
        double w = v;
        bool converged = false;
        for (int it = 0; it < opt.newton_max_iters; ++it) {
            const double d_new = d + dt * w;
            const double meff = effective_mass(d_new);
            const double inertia = meff * (w - v) / dt;
            const double residual = inertia + p.kappa_f() * w + p.kappa_s() * d_new;
            const double scale = std::abs(m * (w - v) / dt) + std::abs(p.kappa_f() * w) +
                                 std::abs(p.kappa_s() * d_new) + std::abs(rho * d_new * (w - v) / dt);
            if (std::abs(residual) <= opt.newton_rel_tol * scale || residual == 0.0) {
                converged = true;
                break;
            }
            const double dmeff = frozen ? 0.0 : -rho * dt;
            const double jacobian = dmeff * (w - v) / dt + meff / dt + p.kappa_f() + p.kappa_s() * dt;
            if (jacobian == 0.0 || !std::isfinite(jacobian)) break;
            w -= residual / jacobian;
        }
        if (!converged) throw SolverError("Newton iteration did not converge", t);
        const double d_new = d + dt * w;
        if (!(d_new > 0.0)) throw SolverError("fluid column collapsed (d <= 0)", t);
        const double meff = effective_mass(d_new);
        if (!(meff > 0.0)) throw SolverError("added-mass singularity", t);
        const double a = (w - v) / dt;
        traj.append(t, {d_new, w, rho * (frozen ? p.ell0() : d_new) * a - p.kappa_f() * w});
        d = d_new;
        v = w;
    }
    return traj;
}

/// Inner time grid resolving one coupling step (0, tau): nodes t_j = j h, j = 0..steps.
struct StepGrid {
    double h = 1.0;
    std::size_t steps = 1;

    static StepGrid for_step(double tau, std::size_t substeps) {
        if (substeps < 1) throw std::invalid_argument("StepGrid: need at least one substep");
        if (!(tau > 0.0)) throw std::invalid_argument("StepGrid: tau must be > 0");
        return StepGrid{tau / static_cast<double>(substeps), substeps};
    }

    std::size_t nodes() const noexcept { return steps + 1; }
    double time(std::size_t j) const noexcept { return static_cast<double>(j) * h; }
};

/// Interface motion over one step, as transferred from the structure to the fluid.
struct MotionHistory {
    std::vector<double> d;
    std::vector<double> v;
};

/**
 * @brief Structure subproblem: m_s d'' + kappa_s d = p on the inner grid.
 *
 * `pressure` holds one value per inner node; node 0 is ignored because
 * implicit Euler only loads the new time level. The initial state (d0, v0)
 * is not required to be physical, so the same kernel propagates iteration
 * errors with zero data.
 */
inline MotionHistory solid_step(const PistonParams& p, double d0, double v0, std::span<const double> pressure,
                                const StepGrid& grid) {
    if (pressure.size() != grid.nodes()) throw std::invalid_argument("solid_step: pressure/grid size mismatch");
    const double h = grid.h;
    const double m = p.m_s();
    const double k = p.kappa_s();
    MotionHistory out;
    out.d.resize(grid.nodes());
    out.v.resize(grid.nodes());
    out.d[0] = d0;
    out.v[0] = v0;
    // (m + k h^2) v_{j+1} = m v_j - h k d_j + h p_{j+1};  d_{j+1} = d_j + h v_{j+1}
    const double denom = m + k * h * h;
    for (std::size_t j = 0; j < grid.steps; ++j) {
        const double v_new = (m * out.v[j] - h * k * out.d[j] + h * pressure[j + 1]) / denom;
        out.v[j + 1] = v_new;
        out.d[j + 1] = out.d[j] + h * v_new;
    }
    return out;
}

/// How the fluid recovers velocity and acceleration from the transferred motion.
enum class RecoveryStencil {
    /// Velocity as transferred; acceleration by backward differences of it.
    /// This is the exact inverse of the structure's implicit-Euler update.
    backward,
    /// Velocity and acceleration re-derived from the displacement alone with
    /// second-order central/one-sided stencils (needs >= 3 substeps).
    second_order,
};

struct FluidOptions {
    AddedMass added_mass = AddedMass::nonlinear;
    double frozen_length = 0.0; ///< d_ref for AddedMass::linearized; must be > 0
    RecoveryStencil stencil = RecoveryStencil::backward;
};

/**
 * @brief Fluid subproblem: receives the interface motion (Dirichlet data) and
 * returns the interface pressure (traction) at every inner node.
 */
inline std::vector<double> fluid_step(const PistonParams& p, const MotionHistory& motion, const StepGrid& grid,
                                      const FluidOptions& opt = {}) {
    const std::size_t n = grid.nodes();
    if (motion.d.size() != n || motion.v.size() != n) throw std::invalid_argument("fluid_step: motion/grid size mismatch");
    const bool frozen = opt.added_mass == AddedMass::linearized;
    if (frozen && !(opt.frozen_length > 0.0)) throw std::invalid_argument("fluid_step: frozen length must be > 0");
    if (!frozen) {
        for (double d : motion.d) {
            if (!(d > 0.0)) throw std::invalid_argument("fluid_step: nonpositive displacement");
        }
    }

    std::vector<double> vel(n);
    std::vector<double> acc(n);
    if (opt.stencil == RecoveryStencil::backward) {
        vel = motion.v;
        for (std::size_t j = 1; j < n; ++j) acc[j] = (motion.v[j] - motion.v[j - 1]) / grid.h;
        acc[0] = n > 1 ? acc[1] : 0.0;
    } else {
        if (n < 4) throw std::invalid_argument("fluid_step: second-order recovery needs >= 3 substeps");
        vel = fd::first_derivative(motion.d, grid.h);
        acc = fd::second_derivative(motion.d, grid.h);
    }

    std::vector<double> pressure(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double length = frozen ? opt.frozen_length : motion.d[j];
        pressure[j] = p.rho_f() * length * acc[j] - p.kappa_f() * vel[j];
    }
    return pressure;
}

/// Discrete energy 0.5 m_s v^2 + 0.5 kappa_s d^2 of the piston.
inline double piston_energy(const PistonParams& p, const PistonState& s) {
    return 0.5 * p.m_s() * s.v * s.v + 0.5 * p.kappa_s() * s.d * s.d;
}

/// max_i |d_i - ref_i| / |ref_i| over two trajectories sampled at the same times.
inline double max_relative_deviation(const Trajectory& ref, const Trajectory& other) {
    if (ref.size() != other.size() || ref.empty()) throw std::invalid_argument("trajectory lengths differ");
    double worst = 0.0;
    for (std::size_t i = 0; i < ref.size(); ++i) {
        const double t = ref.times()[i];
        if (std::abs(other.times()[i] - t) > 1e-9 * std::max(1.0, std::abs(t))) {
            throw std::invalid_argument("trajectory times differ at index " + std::to_string(i));
        }
        const double d = ref.states()[i].d;
        worst = std::max(worst, std::abs(other.states()[i].d - d) / std::abs(d));
    }
    return worst;
}

} // namespace leaky_piston
