#include "leaky_piston/piston.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace leaky_piston;

namespace {

PistonParams params(double rho, double ell0, double u0, double m, double ks, double kf, double tau = 1.0) {
    return PistonParams({rho, ell0, u0, m, ks, kf, tau});
}

std::vector<double> constant(std::size_t n, double c) { return std::vector<double>(n, c); }

} // namespace

TEST(PsPressure, Examples) {
    EXPECT_EQ(ps_pressure(params(0, 1, 0, 1, 0, 0), 3.0, 11.0, 5.0), 0.0);
    EXPECT_EQ(ps_pressure(params(2, 1, 0, 1, 0, 7), 3.0, 11.0, 5.0), -47.0);
    EXPECT_EQ(ps_pressure(params(2, 1, 0, 1, 0, 7), 0.3, 0.0, 0.0), 0.0);
    EXPECT_THROW((void)ps_pressure(params(2, 1, 0, 1, 0, 7), 0.0, 1.0, 1.0), std::invalid_argument);
}

TEST(Trajectory, TimesMustIncrease) {
    Trajectory t;
    t.append(0.0, {});
    t.append(0.5, {});
    EXPECT_THROW(t.append(0.5, {}), std::invalid_argument);
    EXPECT_EQ(t.size(), 2u);
}

TEST(SolveMonolithic, HarmonicOscillator) {
    const auto p = params(0, 1, 0, 1, 1, 0);
    std::vector<double> errors;
    for (double dt : {1e-3, 5e-4, 2.5e-4}) {
        const auto traj = solve_monolithic(p, 1.0, dt);
        EXPECT_NEAR(traj.times().back(), 1.0, 1e-12);
        errors.push_back(std::abs(traj.back().d - std::cos(1.0)));
    }
    EXPECT_LT(errors.front(), 1e-3);
    for (std::size_t i = 0; i + 1 < errors.size(); ++i) {
        const double ratio = errors[i] / errors[i + 1];
        EXPECT_GT(ratio, 1.7);
        EXPECT_LT(ratio, 2.3);
    }
}

TEST(SolveMonolithic, Equilibrium) {
    const auto traj = solve_monolithic(params(0, 2.5, 0, 1, 0, 0), 1.0, 0.1);
    for (const auto& s : traj.states()) {
        EXPECT_EQ(s.d, 2.5);
        EXPECT_EQ(s.p_interface, 0.0);
    }
}

TEST(SolveMonolithic, LinearizedMatchesDampedOscillator) {
    const auto p = params(0.1, 1, 0, 1, 1, 0.5);
    const MonolithicOptions opt{AddedMass::linearized};
    std::vector<double> errors;
    for (double dt : {2e-3, 1e-3, 5e-4}) {
        const auto traj = solve_monolithic(p, 1.5, dt, opt);
        double e = 0.0;
        for (std::size_t i = 0; i < traj.size(); ++i) {
            const double exact = oracle::damped_oscillator(0.9, 0.5, 1.0, 1.0, 0.0, traj.times()[i]);
            e = std::max(e, std::abs(traj.states()[i].d - exact));
        }
        errors.push_back(e);
    }
    EXPECT_LT(errors.front(), 2e-3);
    for (std::size_t i = 0; i + 1 < errors.size(); ++i) {
        EXPECT_GT(errors[i] / errors[i + 1], 1.7);
        EXPECT_LT(errors[i] / errors[i + 1], 2.3);
    }
}

TEST(SolveMonolithic, NonlinearCloseToLinearizedForSmallMotion) {
    const auto p = params(0.1, 1, 1e-3, 1, 0, 0.5);
    const auto a = solve_monolithic(p, 1.0, 1e-3);
    const auto b = solve_monolithic(p, 1.0, 1e-3, {AddedMass::linearized});
    EXPECT_LT(max_relative_deviation(a, b), 1e-6);
}

TEST(SolveMonolithic, Errors) {
    EXPECT_THROW((void)solve_monolithic(params(2, 1, 0, 1, 1, 0), 1.0, 0.1), SolverError);
    EXPECT_THROW((void)solve_monolithic(params(0, 1, 0, 1, 1, 0), 1.0, 0.3), std::invalid_argument);
    EXPECT_THROW((void)solve_monolithic(params(0, 1, 0, 1, 1, 0), 1.0, -0.1), std::invalid_argument);
    try {
        (void)solve_monolithic(params(0, 1, 0, 1, 1, 0), 3.0, 0.01);
        ADD_FAILURE() << "collapse not detected";
    } catch (const SolverError& e) {
        EXPECT_GT(e.time(), 1.5);
        EXPECT_LT(e.time(), 1.7);
    }
}

TEST(SolveMonolithic, EnergyNonIncreasingWithResistance) {
    const auto p = params(0, 1, 2, 1, 3, 0.4);
    const auto traj = solve_monolithic(p, 0.5, 1e-3, {AddedMass::linearized});
    for (std::size_t i = 1; i < traj.size(); ++i) {
        EXPECT_LE(piston_energy(p, traj.states()[i]), piston_energy(p, traj.states()[i - 1]) * (1 + 1e-14));
    }
}

TEST(SolidStep, Examples) {
    const auto grid = StepGrid::for_step(1.0, 1000);
    const auto rest = solid_step(params(0, 1.7, 0, 1, 0, 0), 1.7, 0.0, constant(grid.nodes(), 0.0), grid);
    for (double d : rest.d) EXPECT_EQ(d, 1.7);

    const auto eq = solid_step(params(0, 1, 0, 1, 4, 0), 0.75, 0.0, constant(grid.nodes(), 3.0), grid);
    for (double d : eq.d) EXPECT_NEAR(d, 0.75, 1e-15);

    std::vector<double> errors;
    for (std::size_t m : {1000u, 2000u}) {
        const auto g = StepGrid::for_step(1.0, m);
        const auto r = solid_step(params(0, 1, 0, 1, 1, 0), 0.0, 0.0, constant(g.nodes(), 1.0), g);
        double e = 0.0;
        for (std::size_t j = 0; j < g.nodes(); ++j) e = std::max(e, std::abs(r.d[j] - (1 - std::cos(g.time(j)))));
        errors.push_back(e);
    }
    EXPECT_LT(errors[0], 1e-3);
    EXPECT_NEAR(errors[0] / errors[1], 2.0, 0.3);

    EXPECT_THROW((void)solid_step(params(0, 1, 0, 1, 1, 0), 0, 0, constant(3, 0), grid), std::invalid_argument);
}

TEST(FluidStep, Examples) {
    const auto grid = StepGrid::for_step(1.0, 64);
    const std::size_t n = grid.nodes();
    for (auto stencil : {RecoveryStencil::backward, RecoveryStencil::second_order}) {
        const FluidOptions opt{AddedMass::nonlinear, 0.0, stencil};
        const MotionHistory still{constant(n, 1.3), constant(n, 0.0)};
        for (double p : fluid_step(params(1, 1, 0, 1, 0, 2), still, grid, opt)) EXPECT_NEAR(p, 0.0, 1e-10);

        MotionHistory ramp{std::vector<double>(n), constant(n, 0.2)};
        for (std::size_t j = 0; j < n; ++j) ramp.d[j] = 1.0 + 0.2 * grid.time(j);
        for (double p : fluid_step(params(0, 1, 0, 1, 0, 3), ramp, grid, opt)) EXPECT_NEAR(p, -0.6, 1e-13);
    }
}

TEST(FluidStep, SecondOrderRecoveryOfSmoothMotion) {
    auto exact = [](double t) { return -0.1 * (1 + 0.1 * std::sin(t)) * std::sin(t) - 0.2 * std::cos(t); };
    const auto p = params(1, 1, 0, 1, 0, 2);
    std::vector<double> errors;
    for (std::size_t m : {32u, 64u, 128u}) {
        const auto grid = StepGrid::for_step(1.0, m);
        MotionHistory motion{std::vector<double>(grid.nodes()), std::vector<double>(grid.nodes())};
        for (std::size_t j = 0; j < grid.nodes(); ++j) {
            motion.d[j] = 1 + 0.1 * std::sin(grid.time(j));
            motion.v[j] = 0.1 * std::cos(grid.time(j));
        }
        const auto pr = fluid_step(p, motion, grid, {AddedMass::nonlinear, 0.0, RecoveryStencil::second_order});
        double e = 0.0;
        for (std::size_t j = 1; j < grid.nodes(); ++j) e = std::max(e, std::abs(pr[j] - exact(grid.time(j))));
        errors.push_back(e);
    }
    EXPECT_LT(errors[0], 1e-3);
    for (std::size_t i = 0; i + 1 < errors.size(); ++i) EXPECT_GT(std::log2(errors[i] / errors[i + 1]), 1.7);
}

TEST(FluidStep, BackwardRecoveryIsFirstOrder) {
    auto exact = [](double t) { return -0.1 * (1 + 0.1 * std::sin(t)) * std::sin(t) - 0.2 * std::cos(t); };
    const auto p = params(1, 1, 0, 1, 0, 2);
    std::vector<double> errors;
    for (std::size_t m : {64u, 128u}) {
        const auto grid = StepGrid::for_step(1.0, m);
        MotionHistory motion{std::vector<double>(grid.nodes()), std::vector<double>(grid.nodes())};
        for (std::size_t j = 0; j < grid.nodes(); ++j) {
            motion.d[j] = 1 + 0.1 * std::sin(grid.time(j));
            motion.v[j] = 0.1 * std::cos(grid.time(j));
        }
        const auto pr = fluid_step(p, motion, grid);
        double e = 0.0;
        for (std::size_t j = 1; j < grid.nodes(); ++j) e = std::max(e, std::abs(pr[j] - exact(grid.time(j))));
        errors.push_back(e);
    }
    EXPECT_NEAR(errors[0] / errors[1], 2.0, 0.3);
}

TEST(FluidStep, Errors) {
    const auto grid = StepGrid::for_step(1.0, 4);
    const MotionHistory bad{{1, 1, 0, 1, 1}, constant(5, 0)};
    EXPECT_THROW((void)fluid_step(params(1, 1, 0, 1, 0, 0), bad, grid), std::invalid_argument);
    EXPECT_NO_THROW((void)fluid_step(params(1, 1, 0, 1, 0, 0), bad, grid, {AddedMass::linearized, 1.0}));
    EXPECT_THROW((void)fluid_step(params(1, 1, 0, 1, 0, 0), bad, grid, {AddedMass::linearized, 0.0}),
                 std::invalid_argument);
    const MotionHistory short_motion{constant(3, 1), constant(3, 0)};
    EXPECT_THROW((void)fluid_step(params(1, 1, 0, 1, 0, 0), short_motion, grid), std::invalid_argument);
}

TEST(Subproblems, ReproduceMonolithicFixedPoint) {
    const auto p = params(0.3, 1, 0.5, 1, 2, 0.7, 0.25);
    const std::size_t m = 50;
    const auto grid = StepGrid::for_step(p.tau(), m);
    const auto traj = solve_monolithic(p, p.tau(), grid.h);
    MotionHistory motion;
    std::vector<double> pressure;
    for (const auto& s : traj.states()) {
        motion.d.push_back(s.d);
        motion.v.push_back(s.v);
        pressure.push_back(s.p_interface);
    }
    const auto recovered = fluid_step(p, motion, grid);
    for (std::size_t j = 1; j < grid.nodes(); ++j) EXPECT_NEAR(recovered[j], pressure[j], 1e-11);
    const auto solid = solid_step(p, p.ell0(), p.u0(), pressure, grid);
    for (std::size_t j = 0; j < grid.nodes(); ++j) {
        EXPECT_NEAR(solid.d[j], motion.d[j], 1e-13);
        EXPECT_NEAR(solid.v[j], motion.v[j], 1e-12);
    }
}

TEST(MaxRelativeDeviation, Basics) {
    Trajectory a;
    Trajectory b;
    a.append(0, {2.0, 0, 0});
    a.append(1, {4.0, 0, 0});
    b.append(0, {2.0, 0, 0});
    b.append(1, {5.0, 0, 0});
    EXPECT_DOUBLE_EQ(max_relative_deviation(a, b), 0.25);
    Trajectory c;
    c.append(0, {});
    EXPECT_THROW((void)max_relative_deviation(a, c), std::invalid_argument);
}
