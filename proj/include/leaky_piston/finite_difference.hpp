/**
 * @file finite_difference.hpp
 * @brief Second-order difference stencils and trapezoidal quadrature on
 * uniformly spaced samples.
 */
#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace leaky_piston::fd {

/// First derivative: central differences inside, one-sided second-order at both ends. Needs >= 3 samples.
inline std::vector<double> first_derivative(std::span<const double> f, double h) {
    const std::size_t n = f.size();
    if (n < 3) throw std::invalid_argument("first_derivative: need at least 3 samples");
    std::vector<double> df(n);
    df[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h);
    for (std::size_t i = 1; i + 1 < n; ++i) df[i] = (f[i + 1] - f[i - 1]) / (2.0 * h);
    df[n - 1] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * h);
    return df;
}

/// Second derivative: three-point stencil inside, four-point one-sided at both ends. Needs >= 4 samples.
inline std::vector<double> second_derivative(std::span<const double> f, double h) {
    const std::size_t n = f.size();
    if (n < 4) throw std::invalid_argument("second_derivative: need at least 4 samples");
    const double h2 = h * h;
    std::vector<double> d2f(n);
    d2f[0] = (2.0 * f[0] - 5.0 * f[1] + 4.0 * f[2] - f[3]) / h2;
    for (std::size_t i = 1; i + 1 < n; ++i) d2f[i] = (f[i + 1] - 2.0 * f[i] + f[i - 1]) / h2;
    d2f[n - 1] = (2.0 * f[n - 1] - 5.0 * f[n - 2] + 4.0 * f[n - 3] - f[n - 4]) / h2;
    return d2f;
}

/// Composite trapezoidal rule over all samples.
inline double trapezoid(std::span<const double> f, double h) {
    if (f.size() < 2) return 0.0;
    double sum = 0.5 * (f.front() + f.back());
    for (std::size_t i = 1; i + 1 < f.size(); ++i) sum += f[i];
    return h * sum;
}

} // namespace leaky_piston::fd
