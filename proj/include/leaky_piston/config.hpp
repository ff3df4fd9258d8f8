/**
 * @file config.hpp
 * @brief Plain `name = value` configuration files.
 *
 * One assignment per line, `#` starts a comment, blank lines are ignored.
 * Every key must belong to the set the caller declares; anything else is an
 * error, as are duplicate keys.
 */
#pragma once

#include "leaky_piston/dn_coupling.hpp"
#include "leaky_piston/model_core.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace leaky_piston {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    const auto ws = " \t\r\n";
    const auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(ws);
    return s.substr(b, e - b + 1);
}

inline double parse_double(std::string_view text, std::string_view key) {
    double value = 0.0;
    const auto* first = text.data();
    const auto* last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last) {
        throw ConfigError("config: key '" + std::string(key) + "' expects a number, got '" + std::string(text) + "'");
    }
    return value;
}

} // namespace detail

/// Parsed key-value file. Values are kept as text and converted on access.
class ConfigMap {
public:
    ConfigMap() = default;

    static ConfigMap parse(std::istream& in, const std::set<std::string, std::less<>>& allowed) {
        ConfigMap cfg;
        std::string line;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            std::string_view view = line;
            if (auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
            view = detail::trim(view);
            if (view.empty()) continue;
            const auto eq = view.find('=');
            if (eq == std::string_view::npos) {
                throw ConfigError("config line " + std::to_string(lineno) + ": expected 'name = value'");
            }
            const auto key = detail::trim(view.substr(0, eq));
            const auto value = detail::trim(view.substr(eq + 1));
            if (key.empty() || value.empty()) {
                throw ConfigError("config line " + std::to_string(lineno) + ": empty name or value");
            }
            if (!allowed.contains(key)) {
                throw ConfigError("config line " + std::to_string(lineno) + ": unknown key '" + std::string(key) + "'");
            }
            auto [it, inserted] = cfg.entries_.emplace(std::string(key), std::string(value));
            if (!inserted) {
                throw ConfigError("config line " + std::to_string(lineno) + ": duplicate key '" + std::string(key) + "'");
            }
        }
        return cfg;
    }

    static ConfigMap parse_string(const std::string& text, const std::set<std::string, std::less<>>& allowed) {
        std::istringstream in(text);
        return parse(in, allowed);
    }

    static ConfigMap load(const std::string& path, const std::set<std::string, std::less<>>& allowed) {
        std::ifstream in(path);
        if (!in) throw ConfigError("cannot open config file '" + path + "'");
        return parse(in, allowed);
    }

    bool contains(std::string_view key) const { return entries_.find(key) != entries_.end(); }

    double number(std::string_view key, double fallback) const {
        auto it = entries_.find(key);
        return it == entries_.end() ? fallback : detail::parse_double(it->second, key);
    }

    std::string text(std::string_view key, std::string fallback) const {
        auto it = entries_.find(key);
        return it == entries_.end() ? fallback : it->second;
    }

    /// Comma-separated list of numbers.
    std::vector<double> numbers(std::string_view key, std::vector<double> fallback) const {
        auto it = entries_.find(key);
        if (it == entries_.end()) return fallback;
        std::vector<double> out;
        std::string_view rest = it->second;
        while (!rest.empty()) {
            const auto comma = rest.find(',');
            out.push_back(detail::parse_double(detail::trim(rest.substr(0, comma)), key));
            if (comma == std::string_view::npos) break;
            rest = rest.substr(comma + 1);
        }
        return out;
    }

    const std::map<std::string, std::string, std::less<>>& entries() const noexcept { return entries_; }

private:
    std::map<std::string, std::string, std::less<>> entries_;
};

/// Physical parameters from a config map; missing keys take `defaults`.
inline PistonParams params_from_config(const ConfigMap& cfg, const PistonParams& defaults = PistonParams{}) {
    PistonParams::Values v = defaults.values();
    v.rho_f = cfg.number("rho_f", v.rho_f);
    v.ell0 = cfg.number("ell0", v.ell0);
    v.u0 = cfg.number("u0", v.u0);
    v.m_s = cfg.number("m_s", v.m_s);
    v.kappa_s = cfg.number("kappa_s", v.kappa_s);
    v.kappa_f = cfg.number("kappa_f", v.kappa_f);
    v.tau = cfg.number("tau", v.tau);
    return PistonParams(v);
}

inline std::set<std::string, std::less<>> parameter_keys() {
    std::set<std::string, std::less<>> keys;
    for (auto k : PistonParams::keys()) keys.emplace(k);
    return keys;
}

/// Coupling options recognised in configuration files.
inline std::set<std::string, std::less<>> coupling_keys() {
    return {"tol", "max_iters", "relaxation", "extrapolation_order", "inner_steps", "added_mass", "recovery",
            "divergence_factor"};
}

inline CouplingConfig coupling_from_config(const ConfigMap& cfg, CouplingConfig c = {}) {
    c.tol = cfg.number("tol", c.tol);
    c.max_iters = static_cast<int>(cfg.number("max_iters", c.max_iters));
    c.relaxation = cfg.number("relaxation", c.relaxation);
    c.extrapolation_order = static_cast<int>(cfg.number("extrapolation_order", c.extrapolation_order));
    const double inner = cfg.number("inner_steps", static_cast<double>(c.inner_steps));
    if (!(inner >= 1.0) || inner != std::floor(inner)) throw ConfigError("config: inner_steps must be a positive integer");
    c.inner_steps = static_cast<std::size_t>(inner);
    c.divergence_factor = cfg.number("divergence_factor", c.divergence_factor);
    const auto added = cfg.text("added_mass", c.added_mass == AddedMass::nonlinear ? "nonlinear" : "linearized");
    if (added == "nonlinear") {
        c.added_mass = AddedMass::nonlinear;
    } else if (added == "linearized") {
        c.added_mass = AddedMass::linearized;
    } else {
        throw ConfigError("config: added_mass must be 'nonlinear' or 'linearized'");
    }
    const auto recovery = cfg.text("recovery", c.stencil == RecoveryStencil::backward ? "backward" : "second_order");
    if (recovery == "backward") {
        c.stencil = RecoveryStencil::backward;
    } else if (recovery == "second_order") {
        c.stencil = RecoveryStencil::second_order;
    } else {
        throw ConfigError("config: recovery must be 'backward' or 'second_order'");
    }
    c.validate();
    return c;
}

} // namespace leaky_piston
