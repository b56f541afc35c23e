#include "smallball/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace smallball {

namespace {

GaussRule build_rule(int n) {
    GaussRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    // Newton iteration on P_n with the Chebyshev-angle initial guess.
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            pp = n * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        rule.nodes[i] = -x;
        rule.nodes[n - 1 - i] = x;
        double w = 2.0 / ((1.0 - x * x) * pp * pp);
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }
    return rule;
}

} // namespace

const GaussRule& gauss_legendre(int n) {
    if (n < 1) throw std::invalid_argument("gauss_legendre: n must be >= 1");
    static std::map<int, GaussRule> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, build_rule(n)).first;
    return it->second;
}

double gauss_panel(const std::function<double(double)>& f, double a, double b,
                   int n) {
    const GaussRule& rule = gauss_legendre(n);
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
        sum += rule.weights[i] * f(mid + half * rule.nodes[i]);
    }
    return half * sum;
}

double integrate_with_breaks(const std::function<double(double)>& f, double a,
                             double b, std::vector<double> breaks, int n) {
    breaks.push_back(a);
    breaks.push_back(b);
    std::sort(breaks.begin(), breaks.end());
    double total = 0.0;
    double lo = a;
    for (double x : breaks) {
        if (x <= lo || x > b) continue;
        total += gauss_panel(f, lo, std::min(x, b), n);
        lo = x;
    }
    if (lo < b) total += gauss_panel(f, lo, b, n);
    return total;
}

namespace {

double adapt_rec(const std::function<double(double)>& f, double a, double b,
                 double tol, double coarse, int depth) {
    const double mid = 0.5 * (a + b);
    const double left = gauss_panel(f, a, mid, 16);
    const double right = gauss_panel(f, mid, b, 16);
    const double fine = left + right;
    if (std::abs(fine - coarse) <= tol || depth >= 40) return fine;
    return adapt_rec(f, a, mid, 0.5 * tol, left, depth + 1) +
           adapt_rec(f, mid, b, 0.5 * tol, right, depth + 1);
}

} // namespace

double integrate_adaptive(const std::function<double(double)>& f, double a,
                          double b, double tol) {
    const double coarse = gauss_panel(f, a, b, 16);
    return adapt_rec(f, a, b, tol, coarse, 0);
}

} // namespace smallball
