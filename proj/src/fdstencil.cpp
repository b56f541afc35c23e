#include "smallball/fdstencil.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace smallball {

namespace {

// B. Fornberg, "Generation of finite difference formulas on arbitrarily
// spaced grids", Math. Comp. 51 (1988). c[j][k] = weight of x[j] for
// derivative order k after processing points 0..i.
template <typename T>
std::vector<T> fornberg_impl(T x0, std::span<const T> x, int m) {
    const int n = static_cast<int>(x.size());
    if (n < m + 1) throw std::invalid_argument("fornberg_weights: too few points");
    std::vector<std::vector<T>> c(n, std::vector<T>(m + 1, T(0)));
    c[0][0] = T(1);
    T c1 = T(1);
    for (int i = 1; i < n; ++i) {
        T c2 = T(1);
        const T xi = x[i] - x0;
        for (int j = 0; j < i; ++j) {
            const T xj = x[i] - x[j];
            c2 *= xj;
            if (j == i - 1) {
                for (int k = std::min(i, m); k >= 1; --k) {
                    c[i][k] =
                        c1 * (T(k) * c[i - 1][k - 1] - (x[i - 1] - x0) * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * (x[i - 1] - x0) * c[i - 1][0] / c2;
            }
            for (int k = std::min(i, m); k >= 1; --k) {
                c[j][k] = (xi * c[j][k] - T(k) * c[j][k - 1]) / xj;
            }
            c[j][0] = xi * c[j][0] / xj;
        }
        c1 = c2;
    }
    std::vector<T> w(n);
    for (int j = 0; j < n; ++j) w[j] = c[j][m];
    return w;
}

template <typename T>
T fd_derivative_impl(std::span<const T> values, T h, std::size_t i, int m,
                     int points) {
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(values.size());
    if (points > n) throw std::invalid_argument("fd_derivative: stencil larger than grid");
    std::ptrdiff_t start = static_cast<std::ptrdiff_t>(i) - points / 2;
    start = std::clamp<std::ptrdiff_t>(start, 0, n - points);
    std::vector<T> x(points);
    for (int j = 0; j < points; ++j) {
        x[j] = (T(static_cast<double>(start + j)) - T(static_cast<double>(i))) * h;
    }
    const std::vector<T> w = fornberg_impl<T>(T(0), x, m);
    T acc = T(0);
    for (int j = 0; j < points; ++j) acc += w[j] * values[start + j];
    return acc;
}

} // namespace

std::vector<double> fornberg_weights(double x0, std::span<const double> x,
                                     int m) {
    return fornberg_impl<double>(x0, x, m);
}

std::vector<double> uniform_fd_weights(std::span<const int> offsets, int m,
                                       double h) {
    std::vector<double> x(offsets.size());
    for (std::size_t i = 0; i < offsets.size(); ++i) x[i] = offsets[i] * h;
    return fornberg_weights(0.0, x, m);
}

double fd_derivative(std::span<const double> values, double h, std::size_t i,
                     int m, int points) {
    return fd_derivative_impl<double>(values, h, i, m, points);
}

long double fd_derivative_ld(std::span<const long double> values, long double h,
                             std::size_t i, int m, int points) {
    return fd_derivative_impl<long double>(values, h, i, m, points);
}

} // namespace smallball
