/**
 * @file sensitivity.hpp
 * @brief Pressure-level shift of a nearly-closed fluid domain.
 *
 * If a flow with uniform normal velocity and pressure on the Robin boundary
 * solves the problem for a reference resistance kappa_ref, the same velocity
 * with the pressure shifted by a constant lambda solves it for kappa, where
 *
 *   lambda = -(kappa - kappa_ref) V' / meas(Gamma_R)
 *
 * and V' is the volume-rate deviation. As kappa grows the shift is unbounded
 * for any V' != 0.
 */
#pragma once

#include "leaky_piston/model_core.hpp"

namespace leaky_piston {

struct RobinBoundarySpec {
    double kappa = 0.0;     ///< flow resistance [kg/m^2 s]
    double kappa_ref = 0.0; ///< reference resistance [kg/m^2 s]
    double area = 1.0;      ///< measure of the Robin boundary [m or m^2]
    double vdot = 0.0;      ///< volume-rate deviation [m^2/s or m^3/s]

    void validate() const {
        detail::require_nonnegative("kappa", kappa);
        detail::require_nonnegative("kappa_ref", kappa_ref);
        detail::require_finite("vdot", vdot);
        detail::require_positive("area", area);
    }
};

inline double pressure_shift(const RobinBoundarySpec& spec) {
    spec.validate();
    return -(spec.kappa - spec.kappa_ref) * spec.vdot / spec.area;
}

} // namespace leaky_piston
