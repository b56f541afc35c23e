#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace smallball {

/// Fornberg finite-difference weights: for grid points x[0..n-1] and an
/// evaluation point x0, returns w such that sum_i w[i] f(x[i])
/// approximates f^(m)(x0).
std::vector<double> fornberg_weights(double x0, std::span<const double> x,
                                     int m);

/// Uniform-grid weights for f^(m) at relative node offsets
/// offsets[i]*h around the evaluation point; the returned weights already
/// include the 1/h^m factor.
std::vector<double> uniform_fd_weights(std::span<const int> offsets, int m,
                                       double h);

/// Derivative of order m at grid index i of values sampled on a uniform
/// grid with spacing h, using a stencil of `points` nodes clipped to the
/// grid (one-sided near the ends, centered in the interior).
double fd_derivative(std::span<const double> values, double h, std::size_t i,
                     int m, int points);

/// Extended-precision variant; high-order derivatives of kernel rows hit
/// the eps/h^4 roundoff floor in double well before the h^2 tolerance.
long double fd_derivative_ld(std::span<const long double> values, long double h,
                             std::size_t i, int m, int points);

} // namespace smallball
