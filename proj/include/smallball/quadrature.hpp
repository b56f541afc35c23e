#pragma once

#include <functional>
#include <vector>

namespace smallball {

/// Gauss-Legendre rule on [-1, 1].
struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// Nodes and weights for an n-point Gauss-Legendre rule (cached per n).
const GaussRule& gauss_legendre(int n);

/// Integrates f over [a, b] with one n-point Gauss-Legendre panel.
double gauss_panel(const std::function<double(double)>& f, double a, double b,
                   int n = 64);

/// Integrates f over [a, b] splitting panels at the given interior
/// breakpoints (kink locations). Breakpoints outside (a, b) are ignored.
double integrate_with_breaks(const std::function<double(double)>& f, double a,
                             double b, std::vector<double> breaks, int n = 64);

/// Adaptive Gauss-Legendre integration by panel halving until the
/// |GL(n) - GL(2n)| estimate on every panel is below tol.
double integrate_adaptive(const std::function<double(double)>& f, double a,
                          double b, double tol = 1e-10);

} // namespace smallball
