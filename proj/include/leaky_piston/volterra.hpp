/**
 * @file volterra.hpp
 * @brief Discrete added-mass and added-damping operators acting on the
 * rescaled subiteration error over the unit interval.
 *
 * For a kernel parameter omega the two operators are
 *
 *   [Lm e](s) = e(s) - int_0^s omega sin(omega (s - z)) e(z) dz
 *   [Ld e](s) =      - int_0^s cos(omega (s - z)) e(z) dz
 *
 * and one Dirichlet-Neumann subiteration maps the error e_{k-1} to
 * e_k = (alpha_m Lm + alpha_d Ld) e_{k-1}. Both integrals are evaluated with
 * the composite trapezoidal rule on the sample nodes, so each operator is a
 * dense lower-triangular matrix that is assembled once per OperatorConfig.
 */
#pragma once

#include "leaky_piston/finite_difference.hpp"

#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace leaky_piston {

/// Samples of a function at the uniform nodes s_i = i/(n-1) of [0, 1].
class GridFunction {
public:
    explicit GridFunction(std::vector<double> values) : values_(std::move(values)) {
        if (values_.size() < 2) throw std::invalid_argument("GridFunction: need at least 2 nodes");
        for (double v : values_) {
            if (!std::isfinite(v)) throw std::invalid_argument("GridFunction: non-finite sample");
        }
    }

    static GridFunction sample(std::size_t n, const std::function<double(double)>& f) {
        if (n < 2) throw std::invalid_argument("GridFunction: need at least 2 nodes");
        std::vector<double> values(n);
        for (std::size_t i = 0; i < n; ++i) values[i] = f(node(i, n));
        return GridFunction(std::move(values));
    }

    static GridFunction zeros(std::size_t n) { return GridFunction(std::vector<double>(n, 0.0)); }

    static double node(std::size_t i, std::size_t n) noexcept {
        return static_cast<double>(i) / static_cast<double>(n - 1);
    }

    std::size_t size() const noexcept { return values_.size(); }
    double spacing() const noexcept { return 1.0 / static_cast<double>(values_.size() - 1); }
    double node(std::size_t i) const noexcept { return node(i, values_.size()); }
    double operator[](std::size_t i) const noexcept { return values_[i]; }
    std::span<const double> values() const noexcept { return values_; }

    GridFunction scaled(double c) const {
        std::vector<double> out(values_);
        for (double& v : out) v *= c;
        return GridFunction(std::move(out));
    }

    friend GridFunction operator+(const GridFunction& a, const GridFunction& b) {
        check_same_size(a, b);
        std::vector<double> out(a.values_);
        for (std::size_t i = 0; i < out.size(); ++i) out[i] += b.values_[i];
        return GridFunction(std::move(out));
    }

    friend GridFunction operator-(const GridFunction& a, const GridFunction& b) {
        check_same_size(a, b);
        std::vector<double> out(a.values_);
        for (std::size_t i = 0; i < out.size(); ++i) out[i] -= b.values_[i];
        return GridFunction(std::move(out));
    }

    static void check_same_size(const GridFunction& a, const GridFunction& b) {
        if (a.size() != b.size()) {
            throw std::invalid_argument("grid size mismatch: " + std::to_string(a.size()) + " vs " +
                                        std::to_string(b.size()));
        }
    }

private:
    std::vector<double> values_;
};

struct OperatorConfig {
    double omega = 1.0;
    std::size_t n = 257;

    void validate() const {
        if (!std::isfinite(omega) || omega < 0.0) throw std::invalid_argument("OperatorConfig: omega must be >= 0");
        if (n < 2) throw std::invalid_argument("OperatorConfig: n must be >= 2");
    }
};

/// sqrt(int e^2 + int (e')^2) with trapezoid quadrature and second-order differences.
inline double h1_norm(const GridFunction& eps) {
    if (eps.size() < 3) throw std::invalid_argument("h1_norm: need at least 3 nodes");
    const double h = eps.spacing();
    const auto values = eps.values();
    auto deriv = fd::first_derivative(values, h);
    std::vector<double> integrand(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) integrand[i] = values[i] * values[i] + deriv[i] * deriv[i];
    return std::sqrt(fd::trapezoid(integrand, h));
}

/// Packed lower-triangular matrix, row-major.
class LowerTriangular {
public:
    explicit LowerTriangular(std::size_t n) : n_(n), a_(n * (n + 1) / 2, 0.0) {}

    std::size_t size() const noexcept { return n_; }
    double& operator()(std::size_t i, std::size_t j) noexcept { return a_[i * (i + 1) / 2 + j]; }
    double operator()(std::size_t i, std::size_t j) const noexcept { return a_[i * (i + 1) / 2 + j]; }

    std::vector<double> apply(std::span<const double> x) const {
        std::vector<double> y(n_, 0.0);
        for (std::size_t i = 0; i < n_; ++i) {
            const double* row = a_.data() + i * (i + 1) / 2;
            double acc = 0.0;
            for (std::size_t j = 0; j <= i; ++j) acc += row[j] * x[j];
            y[i] = acc;
        }
        return y;
    }

private:
    std::size_t n_;
    std::vector<double> a_;
};

/**
 * @brief Assembled Lm and Ld for one (omega, n) pair.
 *
 * Immutable after construction; all member functions are const and may be
 * called concurrently.
 */
class VolterraOperators {
public:
    explicit VolterraOperators(OperatorConfig cfg) : cfg_(cfg), ld_(cfg.n), lm_(cfg.n) {
        cfg_.validate();
        const std::size_t n = cfg_.n;
        const double h = 1.0 / static_cast<double>(n - 1);
        const double w = cfg_.omega;
        // Row 0 integrates over an empty interval.
        lm_(0, 0) = 1.0;
        for (std::size_t i = 1; i < n; ++i) {
            for (std::size_t j = 0; j <= i; ++j) {
                const double weight = (j == 0 || j == i) ? 0.5 * h : h;
                const double lag = w * static_cast<double>(i - j) * h;
                ld_(i, j) = -weight * std::cos(lag);
                lm_(i, j) = -weight * w * std::sin(lag);
            }
            lm_(i, i) += 1.0;
        }
    }

    const OperatorConfig& config() const noexcept { return cfg_; }

    GridFunction apply_ld(const GridFunction& eps) const { return GridFunction(ld_.apply(checked(eps))); }
    GridFunction apply_lm(const GridFunction& eps) const { return GridFunction(lm_.apply(checked(eps))); }

    /// One application of alpha_m Lm + alpha_d Ld.
    GridFunction apply_combined(double alpha_m, double alpha_d, const GridFunction& eps) const {
        const auto m = lm_.apply(checked(eps));
        const auto d = ld_.apply(eps.values());
        std::vector<double> out(m.size());
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = alpha_m * m[i] + alpha_d * d[i];
        return GridFunction(std::move(out));
    }

    /// [e_0, ..., e_k] with e_j = (alpha_m Lm + alpha_d Ld) e_{j-1}.
    std::vector<GridFunction> apply_mixture(double alpha_m, double alpha_d, const GridFunction& eps,
                                            std::size_t k) const {
        checked(eps);
        std::vector<GridFunction> iterates;
        iterates.reserve(k + 1);
        iterates.push_back(eps);
        for (std::size_t j = 1; j <= k; ++j) iterates.push_back(apply_combined(alpha_m, alpha_d, iterates.back()));
        return iterates;
    }

    /// ||e_j|| / ||e_0|| in H1 for j = 0..k.
    std::vector<double> norm_history(double alpha_m, double alpha_d, const GridFunction& eps0, std::size_t k) const {
        checked(eps0);
        const double base = h1_norm(eps0);
        if (base == 0.0) throw std::invalid_argument("norm_history: zero initial error");
        std::vector<double> ratios{1.0};
        GridFunction current = eps0;
        for (std::size_t j = 1; j <= k; ++j) {
            current = apply_combined(alpha_m, alpha_d, current);
            ratios.push_back(h1_norm(current) / base);
        }
        return ratios;
    }

    /// ||Lm Ld e - Ld Lm e|| in H1.
    double commutator_norm(const GridFunction& eps) const {
        const auto lm_ld = apply_lm(apply_ld(eps));
        const auto ld_lm = apply_ld(apply_lm(eps));
        return h1_norm(lm_ld - ld_lm);
    }

    /// r_k = (||Ld^k e0|| / ||e0||)^(1/k) for k = 1..k_max; tends to zero for a quasi-nilpotent Ld.
    std::vector<double> quasi_nilpotency_estimate(const GridFunction& eps0, std::size_t k_max) const {
        checked(eps0);
        const double base = h1_norm(eps0);
        if (base == 0.0) throw std::invalid_argument("quasi_nilpotency_estimate: zero initial error");
        std::vector<double> r;
        r.reserve(k_max);
        GridFunction current = eps0;
        for (std::size_t k = 1; k <= k_max; ++k) {
            current = apply_ld(current);
            r.push_back(std::pow(h1_norm(current) / base, 1.0 / static_cast<double>(k)));
        }
        return r;
    }

    const LowerTriangular& ld_matrix() const noexcept { return ld_; }
    const LowerTriangular& lm_matrix() const noexcept { return lm_; }

private:
    std::span<const double> checked(const GridFunction& eps) const {
        if (eps.size() != cfg_.n) {
            throw std::invalid_argument("grid size mismatch: operator has " + std::to_string(cfg_.n) +
                                        " nodes, function has " + std::to_string(eps.size()));
        }
        return eps.values();
    }

    OperatorConfig cfg_;
    LowerTriangular ld_;
    LowerTriangular lm_;
};

inline GridFunction apply_ld(const OperatorConfig& cfg, const GridFunction& eps) {
    return VolterraOperators(cfg).apply_ld(eps);
}

inline GridFunction apply_lm(const OperatorConfig& cfg, const GridFunction& eps) {
    return VolterraOperators(cfg).apply_lm(eps);
}

inline std::vector<GridFunction> apply_mixture(const OperatorConfig& cfg, double alpha_m, double alpha_d,
                                               const GridFunction& eps, std::size_t k) {
    return VolterraOperators(cfg).apply_mixture(alpha_m, alpha_d, eps, k);
}

inline std::vector<double> norm_history(const OperatorConfig& cfg, double alpha_m, double alpha_d,
                                        const GridFunction& eps0, std::size_t k) {
    return VolterraOperators(cfg).norm_history(alpha_m, alpha_d, eps0, k);
}

inline double commutator_norm(const OperatorConfig& cfg, const GridFunction& eps) {
    return VolterraOperators(cfg).commutator_norm(eps);
}

inline std::vector<double> quasi_nilpotency_estimate(const OperatorConfig& cfg, const GridFunction& eps0,
                                                     std::size_t k_max) {
    return VolterraOperators(cfg).quasi_nilpotency_estimate(eps0, k_max);
}

} // namespace leaky_piston
