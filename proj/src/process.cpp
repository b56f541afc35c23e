#include "smallball/process.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "smallball/errors.hpp"
#include "smallball/fdstencil.hpp"
#include "smallball/quadrature.hpp"

namespace smallball {

std::string family_name(Family f) {
    switch (f) {
        case Family::Wiener: return "wiener";
        case Family::BrownianBridge: return "brownian-bridge";
        case Family::Xalpha: return "xalpha";
        case Family::OU: return "ou";
        case Family::OUZero: return "ou0";
        case Family::IntegratedOU: return "iou";
    }
    return "?";
}

void ProcessSpec::validate() const {
    if (!std::isfinite(alpha) || !std::isfinite(beta)) {
        throw ParameterError("process parameters must be finite");
    }
    if (family == Family::Xalpha && std::abs(alpha + 1.0) <= 1e-9) {
        throw ParameterError(
            "xalpha: alpha = -1 is the periodic case with a constant null "
            "vector; construct a demeaned Brownian bridge instead");
    }
    if ((family == Family::OU || family == Family::OUZero) && beta < 0.0) {
        throw ParameterError("ou/ou0: beta must be >= 0");
    }
    if (family == Family::IntegratedOU && beta <= 0.0) {
        throw ParameterError("iou: beta must be > 0");
    }
}

bool ProcessSpec::uses_beta() const {
    return family == Family::OU || family == Family::OUZero ||
           family == Family::IntegratedOU;
}

std::string ProcessSpec::label() const {
    std::string s = demeaned ? "demeaned-" : "";
    s += family_name(family);
    if (family == Family::Xalpha) s += "(alpha=" + std::to_string(alpha) + ")";
    if (uses_beta()) s += "(beta=" + std::to_string(beta) + ")";
    return s;
}

ProcessSpec ProcessSpec::wiener(bool demeaned) {
    return {Family::Wiener, 0.0, 1.0, demeaned};
}
ProcessSpec ProcessSpec::brownian_bridge(bool demeaned) {
    return {Family::BrownianBridge, 0.0, 1.0, demeaned};
}
ProcessSpec ProcessSpec::xalpha(double alpha, bool demeaned) {
    return {Family::Xalpha, alpha, 1.0, demeaned};
}
ProcessSpec ProcessSpec::ou(double beta, bool demeaned) {
    return {Family::OU, 0.0, beta, demeaned};
}
ProcessSpec ProcessSpec::ou_zero(double beta, bool demeaned) {
    return {Family::OUZero, 0.0, beta, demeaned};
}
ProcessSpec ProcessSpec::integrated_ou(double beta, bool demeaned) {
    return {Family::IntegratedOU, 0.0, beta, demeaned};
}

double Kernel::mean_over_rows(double t) const {
    if (row_mean) return row_mean(t);
    auto f = [this, t](double s) { return eval(t, s); };
    return integrate_with_breaks(f, 0.0, 1.0, {t}, 64);
}

double Kernel::mean_total() const {
    if (total_mean) return *total_mean;
    auto f = [this](double t) { return mean_over_rows(t); };
    return integrate_with_breaks(f, 0.0, 1.0, {0.5}, 64);
}

namespace {

Kernel wiener_kernel() {
    Kernel k;
    k.eval = [](double t, double s) { return std::min(t, s); };
    k.label = "wiener";
    k.smoothness_hint = 0;
    k.row_mean = [](double t) { return t - 0.5 * t * t; };
    k.total_mean = 1.0 / 3.0;
    return k;
}

Kernel brownian_bridge_kernel() {
    Kernel k;
    k.eval = [](double t, double s) { return std::min(t, s) - t * s; };
    k.label = "brownian-bridge";
    k.smoothness_hint = 0;
    k.row_mean = [](double t) { return t - 0.5 * t * t - 0.5 * t; };
    k.total_mean = 1.0 / 12.0;
    return k;
}

Kernel xalpha_kernel(double alpha) {
    // Green function of -u'' with u(0) + a u(1) = 0, a u'(0) + u'(1) = 0:
    // piecewise linear in t with a 2x2 solve folded into closed form.
    const double a = alpha;
    const double d = 1.0 + a;
    const double c0 = a * a / (d * d);
    Kernel k;
    k.eval = [a, d, c0](double t, double s) {
        const double lo = std::min(t, s);
        const double hi = std::max(t, s);
        return c0 + (lo - a * hi) / d;
    };
    k.label = "xalpha";
    k.smoothness_hint = 0;
    k.row_mean = [a, d, c0](double t) {
        return c0 - 0.5 * t * t + (t - 0.5 * a) / d;
    };
    k.total_mean = c0 - 1.0 / 6.0 + 0.5 * (1.0 - a) / d;
    return k;
}

Kernel ou_kernel(double beta);

Kernel integrated_ou_kernel(double beta) {
    const double b = beta;
    const double eb = std::exp(-b);
    Kernel k;
    k.eval = [b](double t, double s) {
        return (2.0 * b * std::min(t, s) + std::exp(-b * t) + std::exp(-b * s) -
                std::exp(-b * std::abs(t - s)) - 1.0) /
               (2.0 * b * b * b);
    };
    k.label = "iou";
    k.smoothness_hint = 2;
    k.row_mean = [b, eb](double t) {
        const double ebt = std::exp(-b * t);
        const double ebmt = std::exp(-b * (1.0 - t));
        return (2.0 * b * (t - 0.5 * t * t) + ebt + (1.0 - eb) / b -
                (2.0 - ebt - ebmt) / b - 1.0) /
               (2.0 * b * b * b);
    };
    k.total_mean = (2.0 * b / 3.0 + 2.0 * (1.0 - eb) / b -
                    2.0 * (b - 1.0 + eb) / (b * b) - 1.0) /
                   (2.0 * b * b * b);
    return k;
}

Kernel ou_kernel(double beta) {
    const double b = beta;
    const double eb = std::exp(-b);
    Kernel k;
    k.eval = [b](double t, double s) {
        return std::exp(-b * std::abs(t - s)) / (2.0 * b);
    };
    k.label = "ou";
    k.smoothness_hint = 0;
    k.row_mean = [b](double t) {
        return (2.0 - std::exp(-b * t) - std::exp(-b * (1.0 - t))) /
               (2.0 * b * b);
    };
    k.total_mean = (b - 1.0 + eb) / (b * b * b);
    return k;
}

Kernel ou_zero_kernel(double beta) {
    const double b = beta;
    const double eb = std::exp(-b);
    Kernel k;
    k.eval = [b](double t, double s) {
        return (std::exp(-b * std::abs(t - s)) - std::exp(-b * (t + s))) /
               (2.0 * b);
    };
    k.label = "ou0";
    k.smoothness_hint = 0;
    k.row_mean = [b, eb](double t) {
        return (2.0 - std::exp(-b * t) - std::exp(-b * (1.0 - t))) /
                   (2.0 * b * b) -
               std::exp(-b * t) * (1.0 - eb) / (2.0 * b * b);
    };
    k.total_mean =
        (b - 1.0 + eb) / (b * b * b) - (1.0 - eb) * (1.0 - eb) / (2.0 * b * b * b);
    return k;
}

} // namespace

Kernel kernel(const ProcessSpec& spec) {
    spec.validate();
    if (spec.uses_beta() && spec.beta <= 0.0) {
        throw ParameterError("covariance requires beta > 0 (the beta = 0 "
                             "spec is a closed-form limit only)");
    }
    Kernel base;
    switch (spec.family) {
        case Family::Wiener: base = wiener_kernel(); break;
        case Family::BrownianBridge: base = brownian_bridge_kernel(); break;
        case Family::Xalpha: base = xalpha_kernel(spec.alpha); break;
        case Family::OU: base = ou_kernel(spec.beta); break;
        case Family::OUZero: base = ou_zero_kernel(spec.beta); break;
        case Family::IntegratedOU: base = integrated_ou_kernel(spec.beta); break;
    }
    return spec.demeaned ? demean_kernel(base) : base;
}

Kernel demean_kernel(const Kernel& k) {
    if (k.annihilates_constants) return k;
    Kernel out;
    const double total = k.mean_total();
    if (k.row_mean) {
        auto base = k.eval;
        auto rm = k.row_mean;
        out.eval = [base, rm, total](double t, double s) {
            return base(t, s) - rm(t) - rm(s) + total;
        };
    } else {
        // Generic path: each evaluation re-integrates two rows.
        Kernel inner = k;
        out.eval = [inner, total](double t, double s) {
            return inner.eval(t, s) - inner.mean_over_rows(t) -
                   inner.mean_over_rows(s) + total;
        };
    }
    out.label = "demeaned(" + k.label + ")";
    out.smoothness_hint = k.smoothness_hint;
    out.annihilates_constants = true;
    out.row_mean = [](double) { return 0.0; };
    out.total_mean = 0.0;
    return out;
}

Kernel integrated_kernel(const Kernel& k) {
    if (k.label == "ou") {
        // Recover beta from the diagonal scale: k(t,t) = 1/(2 beta).
        const double beta = 0.5 / k.eval(0.0, 0.0);
        return integrated_ou_kernel(beta);
    }
    Kernel inner = k;
    Kernel out;
    out.eval = [inner](double t, double s) {
        if (t <= 0.0 || s <= 0.0) return 0.0;
        auto outer = [&inner, s](double u) {
            auto f = [&inner, u](double v) { return inner.eval(u, v); };
            return integrate_with_breaks(f, 0.0, s, {u}, 32);
        };
        return integrate_with_breaks(outer, 0.0, t, {s}, 32);
    };
    out.label = "integrated(" + k.label + ")";
    out.smoothness_hint = k.smoothness_hint + 2;
    return out;
}

void OperatorSpec::validate() const {
    if (order != 2 && order != 4) {
        throw ParameterError("operator order must be 2 or 4");
    }
    const double lead = coeff[order];
    const double expected_sign = (order == 2) ? -1.0 : 1.0;
    if (lead * expected_sign <= 0.0) {
        throw ParameterError("leading coefficient has the wrong sign");
    }
}

ResidualReport operator_residual(const OperatorSpec& op,
                                 std::span<const double> u, double lambda) {
    op.validate();
    const std::size_t n = u.size();
    if (n < 512) {
        throw ResolutionError("operator_residual: need >= 512 grid points");
    }
    const double h = 1.0 / static_cast<double>(n - 1);

    // 4th-order-accurate central stencil widths per derivative order.
    static constexpr int kPoints[5] = {1, 5, 5, 7, 7};

    double umax = 0.0;
    for (double v : u) umax = std::max(umax, std::abs(v));

    ResidualReport rep;
    rep.h = h;
    rep.interior_scale = std::max(std::abs(lambda) * umax, 1e-300);

    const std::size_t skip = static_cast<std::size_t>(op.order);
    double worst = 0.0;
    for (std::size_t i = skip; i + skip < n; ++i) {
        double val = op.coeff[0] * u[i];
        for (int m = 1; m <= op.order; ++m) {
            if (op.coeff[m] == 0.0) continue;
            val += op.coeff[m] * fd_derivative(u, h, i, m, kPoints[m]);
        }
        worst = std::max(worst, std::abs(val - lambda * u[i]));
    }
    rep.max_interior_residual = worst;

    // One-sided endpoint derivatives, 4th-order accurate.
    std::array<double, 4> d0{u.front(), 0, 0, 0};
    std::array<double, 4> d1{u.back(), 0, 0, 0};
    for (int m = 1; m <= 3; ++m) {
        d0[m] = fd_derivative(u, h, 0, m, m + 4);
        d1[m] = fd_derivative(u, h, n - 1, m, m + 4);
    }

    const double freq = std::max(std::pow(std::max(std::abs(lambda), 1.0),
                                          1.0 / op.order),
                                 1.0);
    for (const BoundaryForm& bf : op.boundary_forms) {
        double val = 0.0, scale = 0.0, fpow = 1.0;
        for (int m = 0; m < 4; ++m) {
            val += bf.at0[m] * d0[m] + bf.at1[m] * d1[m];
            scale += (std::abs(bf.at0[m]) + std::abs(bf.at1[m])) * umax * fpow;
            fpow *= freq;
        }
        rep.boundary_values.push_back(val);
        rep.boundary_scales.push_back(std::max(scale, 1e-300));
    }
    return rep;
}

namespace {

BoundaryForm form(std::array<double, 4> at0, std::array<double, 4> at1,
                  std::string label) {
    return BoundaryForm{at0, at1, std::move(label)};
}

} // namespace

OperatorSpec catalog_operator(const ProcessSpec& spec) {
    spec.validate();
    const double b = spec.beta;
    OperatorSpec op;

    const bool second_order = spec.family != Family::IntegratedOU;
    if (second_order) {
        op.order = 2;
        op.coeff = {0, 0, -1, 0, 0};
    } else {
        op.order = 4;
        op.coeff = {0, 0, -b * b, 0, 1};
    }

    switch (spec.family) {
        case Family::Wiener:
            if (!spec.demeaned) {
                op.boundary_forms = {form({1, 0, 0, 0}, {0, 0, 0, 0}, "u(0)"),
                                     form({0, 0, 0, 0}, {0, 1, 0, 0}, "u'(1)")};
            } else {
                op.boundary_forms = {
                    form({0, 1, 0, 0}, {0, 0, 0, 0}, "u'(0)"),
                    form({0, 0, 0, 0}, {0, 1, 0, 0}, "u'(1)"),
                    form({0, -1, 0, 0}, {0, 1, 0, 0}, "(Lu')(0)-(Lu')(1)")};
            }
            break;
        case Family::Xalpha: {
            const double a = spec.alpha;
            if (!spec.demeaned) {
                op.boundary_forms = {
                    form({1, 0, 0, 0}, {a, 0, 0, 0}, "u(0)+a*u(1)"),
                    form({0, a, 0, 0}, {0, 1, 0, 0}, "a*u'(0)+u'(1)")};
            } else {
                op.boundary_forms = {
                    form({0, 1, 0, 0}, {0, 0, 0, 0}, "u'(0)"),
                    form({0, 0, 0, 0}, {0, 1, 0, 0}, "u'(1)"),
                    form({0, -1, 0, 0}, {0, 1, 0, 0}, "(Lu')(0)-(Lu')(1)")};
            }
            break;
        }
        case Family::BrownianBridge:
            if (!spec.demeaned) {
                op.boundary_forms = {form({1, 0, 0, 0}, {0, 0, 0, 0}, "u(0)"),
                                     form({0, 0, 0, 0}, {1, 0, 0, 0}, "u(1)")};
            } else {
                op.boundary_forms = {
                    form({-1, 0, 0, 0}, {1, 0, 0, 0}, "u(1)-u(0)"),
                    form({0, -1, 0, 0}, {0, 1, 0, 0}, "(Lu')(0)-(Lu')(1)")};
            }
            break;
        case Family::OU:
            if (b <= 0.0) throw ParameterError("ou operator requires beta > 0");
            op.coeff[0] = b * b;
            if (spec.demeaned) {
                throw NotApplicableError(
                    "demeaned OU is not a Green Gaussian process: the "
                    "operator has a nonzero zero-order term");
            }
            op.boundary_forms = {
                form({-b, 1, 0, 0}, {0, 0, 0, 0}, "u'(0)-b*u(0)"),
                form({0, 0, 0, 0}, {b, 1, 0, 0}, "u'(1)+b*u(1)")};
            break;
        case Family::OUZero:
            if (b <= 0.0) throw ParameterError("ou0 operator requires beta > 0");
            op.coeff[0] = b * b;
            if (spec.demeaned) {
                throw NotApplicableError(
                    "demeaned OU0 is not a Green Gaussian process: the "
                    "operator has a nonzero zero-order term");
            }
            op.boundary_forms = {form({1, 0, 0, 0}, {0, 0, 0, 0}, "u(0)"),
                                 form({0, 0, 0, 0}, {b, 1, 0, 0}, "u'(1)+b*u(1)")};
            break;
        case Family::IntegratedOU:
            if (!spec.demeaned) {
                op.boundary_forms = {
                    form({1, 0, 0, 0}, {0, 0, 0, 0}, "u(0)"),
                    form({0, 0, 0, 0}, {0, -b * b, 0, 1}, "u'''(1)-b^2*u'(1)"),
                    form({0, -b, 1, 0}, {0, 0, 0, 0}, "u''(0)-b*u'(0)"),
                    form({0, 0, 0, 0}, {0, b, 1, 0}, "u''(1)+b*u'(1)")};
            } else {
                op.boundary_forms = {
                    form({0, -b * b, 0, 1}, {0, 0, 0, 0}, "u'''(0)-b^2*u'(0)"),
                    form({0, 0, 0, 0}, {0, -b * b, 0, 1}, "u'''(1)-b^2*u'(1)"),
                    form({0, -b, 1, 0}, {0, 0, 0, 0}, "u''(0)-b*u'(0)"),
                    form({0, 0, 0, 0}, {0, b, 1, 0}, "u''(1)+b*u'(1)"),
                    form({0, -b * b, 0, 1}, {0, b * b, 0, -1},
                         "(Lu')(0)-(Lu')(1)")};
            }
            break;
    }
    op.validate();
    return op;
}

} // namespace smallball
