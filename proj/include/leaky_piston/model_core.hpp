/**
 * @file model_core.hpp
 * @brief Physical parameters of the leaky-piston problem and their
 * dimensionless groups.
 *
 * All quantities are SI. nondimensionalize() is the only place where the
 * parameters are combined into the groups that govern the iteration error.
 */
#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>

namespace leaky_piston {

/// Raised when a parameter violates its invariant. field() names the offender.
class ValidationError : public std::invalid_argument {
public:
    ValidationError(std::string field, const std::string& what)
        : std::invalid_argument(field + ": " + what), field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

namespace detail {

inline void require_finite(std::string_view name, double value) {
    if (!std::isfinite(value)) {
        throw ValidationError(std::string(name), "must be finite");
    }
}

inline void require_positive(std::string_view name, double value) {
    require_finite(name, value);
    if (!(value > 0.0)) {
        throw ValidationError(std::string(name), "must be > 0");
    }
}

inline void require_nonnegative(std::string_view name, double value) {
    require_finite(name, value);
    if (!(value >= 0.0)) {
        throw ValidationError(std::string(name), "must be >= 0");
    }
}

} // namespace detail

/**
 * @brief Leaky-piston parameters (per unit piston area).
 *
 * Instances are always valid: the constructor checks every invariant and
 * throws ValidationError otherwise.
 */
class PistonParams {
public:
    struct Values {
        double rho_f = 0.0;   ///< fluid density [kg/m^3]
        double ell0 = 1.0;    ///< initial fluid-column length [m]
        double u0 = 0.0;      ///< initial piston velocity [m/s]
        double m_s = 1.0;     ///< piston mass [kg/m^2]
        double kappa_s = 0.0; ///< spring constant [N/m^3]
        double kappa_f = 0.0; ///< flow resistance of the leaky lid [kg/m^2 s]
        double tau = 1.0;     ///< coupling time step [s]
    };

    explicit PistonParams(const Values& v) : v_(v) { validate(v_); }
    PistonParams() : PistonParams(Values{}) {}

    double rho_f() const noexcept { return v_.rho_f; }
    double ell0() const noexcept { return v_.ell0; }
    double u0() const noexcept { return v_.u0; }
    double m_s() const noexcept { return v_.m_s; }
    double kappa_s() const noexcept { return v_.kappa_s; }
    double kappa_f() const noexcept { return v_.kappa_f; }
    double tau() const noexcept { return v_.tau; }

    const Values& values() const noexcept { return v_; }

    /// Copy with one parameter replaced, addressed by its configuration key.
    PistonParams with(std::string_view key, double value) const {
        Values v = v_;
        field_ref(v, key) = value;
        return PistonParams(v);
    }

    /// Value of a parameter addressed by its configuration key.
    double get(std::string_view key) const {
        Values v = v_;
        return field_ref(v, key);
    }

    static bool is_key(std::string_view key) noexcept {
        for (auto k : keys()) {
            if (k == key) return true;
        }
        return false;
    }

    static std::span<const std::string_view> keys() noexcept {
        static constexpr std::string_view list[] = {"rho_f", "ell0", "u0", "m_s", "kappa_s", "kappa_f", "tau"};
        return list;
    }

    friend bool operator==(const PistonParams& a, const PistonParams& b) noexcept {
        const auto& x = a.v_;
        const auto& y = b.v_;
        return x.rho_f == y.rho_f && x.ell0 == y.ell0 && x.u0 == y.u0 && x.m_s == y.m_s &&
               x.kappa_s == y.kappa_s && x.kappa_f == y.kappa_f && x.tau == y.tau;
    }

private:
    static void validate(const Values& v) {
        detail::require_nonnegative("rho_f", v.rho_f);
        detail::require_positive("ell0", v.ell0);
        detail::require_finite("u0", v.u0);
        detail::require_positive("m_s", v.m_s);
        detail::require_nonnegative("kappa_s", v.kappa_s);
        detail::require_nonnegative("kappa_f", v.kappa_f);
        detail::require_positive("tau", v.tau);
    }

    static double& field_ref(Values& v, std::string_view key) {
        if (key == "rho_f") return v.rho_f;
        if (key == "ell0") return v.ell0;
        if (key == "u0") return v.u0;
        if (key == "m_s") return v.m_s;
        if (key == "kappa_s") return v.kappa_s;
        if (key == "kappa_f") return v.kappa_f;
        if (key == "tau") return v.tau;
        throw ValidationError(std::string(key), "unknown parameter");
    }

    Values v_;
};

/// omega = tau sqrt(kappa_s/m_s), alpha_m = rho_f ell0/m_s, alpha_d = tau kappa_f/m_s.
struct DimensionlessGroups {
    double omega = 0.0;
    double alpha_m = 0.0;
    double alpha_d = 0.0;
};

inline DimensionlessGroups nondimensionalize(const PistonParams& p) {
    return DimensionlessGroups{
        p.tau() * std::sqrt(p.kappa_s() / p.m_s()),
        p.rho_f() * p.ell0() / p.m_s(),
        p.tau() * p.kappa_f() / p.m_s(),
    };
}

} // namespace leaky_piston
