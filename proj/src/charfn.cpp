#include "smallball/charfn.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <numbers>

#include "smallball/errors.hpp"

namespace smallball {

using cplx = std::complex<double>;

std::complex<double> LogComplex::value() const {
    return mantissa * std::exp(log_scale);
}

double LogComplex::log_abs() const {
    return std::log(std::abs(mantissa)) + log_scale;
}

LogComplex LogComplex::normalized() const {
    const double m = std::abs(mantissa);
    if (m == 0.0 || !std::isfinite(m)) return *this;
    return LogComplex{mantissa / m, log_scale + std::log(m)};
}

namespace {

constexpr double kSeriesRadius = 0.5;

// Maclaurin coefficients of F_beta: F(z) = sum_m coef(m+2) z^{2m}.
double f_ou_coeff(int j, double b) {
    double f2jm2 = 1.0, f2jm3 = 1.0, f2jm1 = 1.0, f2j = 1.0;
    for (int i = 2; i <= 2 * j; ++i) {
        f2j *= i;
        if (i <= 2 * j - 1) f2jm1 *= i;
        if (i <= 2 * j - 2) f2jm2 *= i;
        if (i <= 2 * j - 3) f2jm3 *= i;
    }
    const double sign = (j % 2 == 0) ? 1.0 : -1.0;
    return sign * (2.0 * b * (1.0 + b) / f2jm2 - 2.0 * b * b * b / f2j +
                   (2.0 + b) / f2jm3 - (2.0 * b * b - b * b * b) / f2jm1);
}

double f_ou0_coeff(int j, double b) {
    double f2jm2 = 1.0, f2jm3 = 1.0, f2jm1 = 1.0, f2j = 1.0;
    for (int i = 2; i <= 2 * j; ++i) {
        f2j *= i;
        if (i <= 2 * j - 1) f2jm1 *= i;
        if (i <= 2 * j - 2) f2jm2 *= i;
        if (i <= 2 * j - 3) f2jm3 *= i;
    }
    const double sign = (j % 2 == 0) ? 1.0 : -1.0;
    return sign * (b * (2.0 + b) / f2jm2 - 2.0 * b * b * b / f2j +
                   1.0 / f2jm3 - (b * b - b * b * b) / f2jm1);
}

cplx series_eval(std::function<double(int, double)> coeff, cplx z, double b) {
    const cplx z2 = z * z;
    cplx acc(0.0, 0.0);
    cplx pow(1.0, 0.0);
    for (int m = 0; m <= 14; ++m) {
        acc += coeff(m + 2, b) * pow;
        pow *= z2;
    }
    return acc;
}

} // namespace

cplx charfn_ou(cplx zeta, double beta) {
    if (beta < 0.0) throw ParameterError("charfn_ou: beta must be >= 0");
    if (std::abs(zeta) <= kSeriesRadius) {
        return series_eval(f_ou_coeff, zeta, beta);
    }
    const cplx z2 = zeta * zeta;
    const double b = beta, b2 = beta * beta;
    const cplx num = 2.0 * b * (z2 + b2) -
                     2.0 * b * std::cos(zeta) * (z2 + b * z2 + b2) +
                     zeta * std::sin(zeta) * (2.0 * z2 + b * z2 + 2.0 * b2 - b2 * b);
    return num / (z2 * z2);
}

cplx charfn_ou0(cplx zeta, double beta) {
    if (beta < 0.0) throw ParameterError("charfn_ou0: beta must be >= 0");
    if (std::abs(zeta) <= kSeriesRadius) {
        return series_eval(f_ou0_coeff, zeta, beta);
    }
    const cplx z2 = zeta * zeta;
    const double b = beta, b2 = beta * beta;
    const cplx num = 2.0 * b * (z2 + b2) -
                     b * std::cos(zeta) * (2.0 * z2 + b * z2 + 2.0 * b2) +
                     zeta * std::sin(zeta) * (z2 + b2 - b2 * b);
    return num / (z2 * z2);
}

namespace {

// 4x4 complex determinant by Gaussian elimination with partial pivoting.
cplx det4(std::array<cplx, 16>& m) {
    cplx det(1.0, 0.0);
    for (int col = 0; col < 4; ++col) {
        int piv = col;
        for (int r = col + 1; r < 4; ++r) {
            if (std::abs(m[r * 4 + col]) > std::abs(m[piv * 4 + col])) piv = r;
        }
        if (piv != col) {
            for (int c = 0; c < 4; ++c) std::swap(m[col * 4 + c], m[piv * 4 + c]);
            det = -det;
        }
        const cplx d = m[col * 4 + col];
        if (d == cplx(0.0, 0.0)) return cplx(0.0, 0.0);
        det *= d;
        for (int r = col + 1; r < 4; ++r) {
            const cplx f = m[r * 4 + col] / d;
            for (int c = col; c < 4; ++c) m[r * 4 + c] -= f * m[col * 4 + c];
        }
    }
    return det;
}

} // namespace

LogComplex det_F(cplx zeta, double beta) {
    const double b2 = beta * beta;
    const cplx z1 = cplx(0.0, 1.0) * std::sqrt(zeta * zeta + b2);
    const std::array<cplx, 4> lam = {cplx(0.0, 1.0) * zeta,
                                     cplx(0.0, -1.0) * zeta,
                                     cplx(0.0, 1.0) * z1,
                                     cplx(0.0, -1.0) * z1};
    std::array<cplx, 16> m;
    double log_scale = 0.0;
    for (int c = 0; c < 4; ++c) {
        const cplx l = lam[c];
        const double ls = std::max(l.real(), 0.0);
        log_scale += ls;
        const cplx p3 = l * l * l - b2 * l;       // u''' - b^2 u'
        const cplx pm = l * l - beta * l;         // u'' - b u'
        const cplx pp = l * l + beta * l;         // u'' + b u'
        const cplx e0 = std::exp(-ls);
        const cplx e1 = std::exp(l - ls);
        m[0 * 4 + c] = p3 * e0;
        m[1 * 4 + c] = pm * e0;
        m[2 * 4 + c] = p3 * e1;
        m[3 * 4 + c] = pp * e1;
    }
    const cplx det = det4(m);
    if (!std::isfinite(det.real()) || !std::isfinite(det.imag())) {
        throw RangeError("det_F: determinant overflow despite column scaling");
    }
    return LogComplex{det, log_scale}.normalized();
}

cplx vandermonde_factor(cplx zeta, double beta) {
    const cplx z1 = cplx(0.0, 1.0) * std::sqrt(zeta * zeta + beta * beta);
    const cplx q = 2.0 * zeta * zeta + beta * beta;
    return 4.0 * zeta * z1 * q * q;
}

namespace {

LogComplex f2_direct(cplx zeta, double beta) {
    const LogComplex f = det_F(zeta, beta);
    const cplx denom =
        vandermonde_factor(zeta, beta) * zeta * zeta * (zeta * zeta + beta * beta);
    return LogComplex{f.mantissa / denom, f.log_scale}.normalized();
}

// Richardson/Neville extrapolation to h -> 0 of an even function sampled
// at h0 / 2^j, working in the variable x = h^2.
cplx richardson_even(const std::function<cplx(double)>& f, double h0, int levels) {
    std::vector<cplx> t(levels);
    std::vector<double> x(levels);
    for (int j = 0; j < levels; ++j) {
        const double h = h0 / static_cast<double>(1 << j);
        x[j] = h * h;
        t[j] = f(h);
        for (int k = j - 1; k >= 0; --k) {
            t[k] = (x[k] * t[k + 1] - x[j] * t[k]) / (x[k] - x[j]);
        }
    }
    return t[0];
}

} // namespace

LogComplex charfn_F2(cplx zeta, double beta) {
    if (beta <= 0.0) throw ParameterError("charfn_F2: beta must be > 0");
    const double radius = 0.05;
    if (std::abs(zeta) < radius) {
        const cplx lim = richardson_even(
            [beta](double h) { return f2_direct(cplx(h, 0.0), beta).value(); },
            0.8, 6);
        return LogComplex{lim, 0.0}.normalized();
    }
    const cplx ib(0.0, beta);
    for (const cplx pole : {ib, -ib}) {
        if (std::abs(zeta - pole) < radius) {
            const double h0 = std::min(0.4, 0.5 * beta);
            const cplx lim = richardson_even(
                [pole, beta](double h) {
                    const cplx dir(0.0, 1.0);
                    const cplx a = f2_direct(pole + dir * h, beta).value();
                    const cplx b = f2_direct(pole - dir * h, beta).value();
                    return 0.5 * (a + b);
                },
                h0, 5);
            return LogComplex{lim, 0.0}.normalized();
        }
    }
    return f2_direct(zeta, beta);
}

cplx CharFunction::eval(cplx zeta) const {
    switch (family) {
        case CharFamily::F_ou: return charfn_ou(zeta, beta);
        case CharFamily::F_ou0: return charfn_ou0(zeta, beta);
        case CharFamily::Fdet: return det_F(zeta, beta).value();
        case CharFamily::Fdet2: return charfn_F2(zeta, beta).value();
    }
    return {};
}

LogComplex CharFunction::eval_log(cplx zeta) const {
    switch (family) {
        case CharFamily::F_ou: return LogComplex{charfn_ou(zeta, beta), 0.0}.normalized();
        case CharFamily::F_ou0: return LogComplex{charfn_ou0(zeta, beta), 0.0}.normalized();
        case CharFamily::Fdet: return det_F(zeta, beta);
        case CharFamily::Fdet2: return charfn_F2(zeta, beta);
    }
    return {};
}

double CharFunction::eval_real_scaled(double zeta) const {
    switch (family) {
        case CharFamily::F_ou: return charfn_ou(cplx(zeta, 0.0), beta).real();
        case CharFamily::F_ou0: return charfn_ou0(cplx(zeta, 0.0), beta).real();
        case CharFamily::Fdet:
        case CharFamily::Fdet2: {
            if (zeta < removable_radius) {
                // F2 tends to 2 beta e^beta > 0 at 0; constant sign here.
                return charfn_F2(cplx(zeta, 0.0), beta).value().real();
            }
            // F is purely imaginary on the real axis; F2 = Im F / (4 D)
            // with D > 0. Dividing by (1/2) cosh zeta tames the growth.
            const LogComplex f = det_F(cplx(zeta, 0.0), beta);
            const double z2 = zeta * zeta, b2 = beta * beta;
            const double log_denom = std::log(4.0) + 3.0 * std::log(zeta) +
                                     1.5 * std::log(z2 + b2) +
                                     2.0 * std::log(2.0 * z2 + b2);
            const double log_cosh_half =
                zeta + std::log1p(std::exp(-2.0 * zeta)) - std::log(4.0);
            return f.mantissa.imag() *
                   std::exp(f.log_scale - log_denom - log_cosh_half);
        }
    }
    return 0.0;
}

double CharFunction::root_spacing(int k) const {
    switch (family) {
        case CharFamily::F_ou:
        case CharFamily::F_ou0: return std::numbers::pi * k;
        case CharFamily::Fdet:
        case CharFamily::Fdet2: return std::numbers::pi * (k - 0.5);
    }
    return 0.0;
}

CharFunction make_charfn(CharFamily family, double beta) {
    if (beta < 0.0) throw ParameterError("make_charfn: beta must be >= 0");
    if ((family == CharFamily::Fdet || family == CharFamily::Fdet2) && beta <= 0.0) {
        throw ParameterError("make_charfn: determinant family needs beta > 0");
    }
    CharFunction f;
    f.family = family;
    f.beta = beta;
    return f;
}

CharFunction charfn_for(const ProcessSpec& spec) {
    spec.validate();
    if (!spec.demeaned) {
        throw NotApplicableError(
            "characteristic functions cover the demeaned OU families only");
    }
    switch (spec.family) {
        case Family::OU: return make_charfn(CharFamily::F_ou, spec.beta);
        case Family::OUZero: return make_charfn(CharFamily::F_ou0, spec.beta);
        case Family::IntegratedOU: return make_charfn(CharFamily::Fdet2, spec.beta);
        default:
            throw NotApplicableError(
                "characteristic functions cover the demeaned OU families only");
    }
}

namespace {

struct Bracket {
    double lo = 0.0, hi = 0.0;
    double flo = 0.0, fhi = 0.0;
    double scale = 0.0;
};

double bisect(const CharFunction& f, Bracket br, double rel_tol,
              double* width_out) {
    double lo = br.lo, hi = br.hi, flo = br.flo;
    (void)rel_tol;  // the bracket is driven to machine spacing
    for (;;) {
        const double mid = 0.5 * (lo + hi);
        if (!(mid > lo && mid < hi)) break;
        const double fm = f.eval_real_scaled(mid);
        if (fm == 0.0) {
            lo = hi = mid;
            break;
        }
        if ((flo < 0.0) != (fm < 0.0)) {
            hi = mid;
        } else {
            lo = mid;
            flo = fm;
        }
    }
    *width_out = hi - lo;
    return 0.5 * (lo + hi);
}

// Scans [lo, hi] with `cells` subdivisions and appends every sign-change
// bracket found, recording a local magnitude scale alongside.
void scan_brackets(const CharFunction& f, double lo, double hi, int cells,
                   std::vector<Bracket>& out) {
    double x0 = lo;
    double f0 = f.eval_real_scaled(x0);
    double scale = std::abs(f0);
    std::vector<Bracket> found;
    for (int i = 1; i <= cells; ++i) {
        const double x1 = lo + (hi - lo) * i / cells;
        const double f1 = f.eval_real_scaled(x1);
        scale = std::max(scale, std::abs(f1));
        if (f0 != 0.0 && f1 != 0.0 && (f0 < 0.0) != (f1 < 0.0)) {
            found.push_back({x0, x1, f0, f1, 0.0});
        }
        x0 = x1;
        f0 = f1;
    }
    for (Bracket& b : found) {
        b.scale = scale;
        out.push_back(b);
    }
}

} // namespace

RootList find_roots(const CharFunction& f, int k_max, const RootOptions& opt) {
    if (k_max < 1) throw ParameterError("find_roots: k_max must be >= 1");
    const double delta = 1e-9;

    std::vector<Bracket> brackets;
    bool per_k_ok = true;
    for (int k = 1; k <= k_max && per_k_ok; ++k) {
        const double c = f.root_spacing(k);
        const double lo = std::max(c - std::numbers::pi / 2 + delta,
                                   f.removable_radius * 0.2);
        const double hi = c + std::numbers::pi / 2 - delta;
        std::vector<Bracket> found;
        scan_brackets(f, lo, hi, opt.scan_cells, found);
        if (found.size() != 1) {
            found.clear();
            scan_brackets(f, lo, hi, opt.scan_cells * 8, found);
        }
        if (found.size() != 1) per_k_ok = false;
        else brackets.push_back(found.front());
    }

    if (per_k_ok) {
        // Brackets must be consistent with a strictly increasing root
        // sequence; overlapping windows around shifted low-k roots are
        // handed to the global scan below.
        for (std::size_t i = 1; i < brackets.size(); ++i) {
            if (brackets[i].lo < brackets[i - 1].hi) {
                per_k_ok = false;
                break;
            }
        }
    }

    if (!per_k_ok) {
        const double lo = f.removable_radius * 0.2;
        const double hi = f.root_spacing(k_max) + std::numbers::pi / 2 - delta;
        for (int cells_per_pi = 64; ; cells_per_pi *= 4) {
            const int cells =
                static_cast<int>((hi - lo) / std::numbers::pi * cells_per_pi) + 1;
            brackets.clear();
            scan_brackets(f, lo, hi, cells, brackets);
            if (static_cast<int>(brackets.size()) == k_max) break;
            if (cells_per_pi >= 1024) {
                throw RootIsolationError(
                    "find_roots: expected " + std::to_string(k_max) +
                    " sign changes in (0, " + std::to_string(hi) + "], found " +
                    std::to_string(brackets.size()));
            }
        }
    }

    RootList out;
    for (const Bracket& br : brackets) {
        double width = 0.0;
        const double z = bisect(f, br, opt.rel_tol, &width);
        out.zeta.push_back(z);
        out.bracket_width.push_back(width);
        out.residual.push_back(std::abs(f.eval_real_scaled(z)));
        out.local_scale.push_back(br.scale);
    }
    for (std::size_t i = 1; i < out.zeta.size(); ++i) {
        if (out.zeta[i] <= out.zeta[i - 1]) {
            throw RootIsolationError("find_roots: roots not strictly increasing");
        }
    }
    return out;
}

Spectrum spectrum_from_roots(const CharFunction& f, const RootList& roots) {
    Spectrum sp;
    sp.provenance = Provenance::characteristic;
    sp.truncation = static_cast<int>(roots.zeta.size());
    sp.mu.reserve(roots.zeta.size());
    const double b2 = f.beta * f.beta;
    switch (f.family) {
        case CharFamily::F_ou:
        case CharFamily::F_ou0:
            for (double z : roots.zeta) sp.mu.push_back(1.0 / (z * z + b2));
            sp.zero_modes = 1;
            sp.numbering_shift = 0;
            break;
        case CharFamily::Fdet2:
            for (double z : roots.zeta) {
                sp.mu.push_back(1.0 / (z * z * z * z + b2 * z * z));
            }
            sp.zero_modes = 1;
            sp.numbering_shift = 1;  // mu_k corresponds to lambda_{k+1}
            break;
        case CharFamily::Fdet:
            throw ParameterError(
                "spectrum_from_roots: use Fdet2 (the raw determinant keeps "
                "the degenerate factors)");
    }
    sp.check_invariants();
    return sp;
}

DistortionResult distortion_constant(const ProcessSpec& spec,
                                     DistortionMethod method, int K) {
    spec.validate();
    if (!spec.demeaned ||
        (spec.family != Family::OU && spec.family != Family::OUZero &&
         spec.family != Family::IntegratedOU)) {
        throw NotApplicableError(
            "distortion constants are defined for the demeaned OU, OU0 and "
            "integrated-OU families");
    }
    const double b = spec.beta;

    DistortionResult res;
    switch (spec.family) {
        case Family::OU: res.closed_form = 2.0 * std::exp(b) / (2.0 + b); break;
        case Family::OUZero: res.closed_form = std::exp(b); break;
        case Family::IntegratedOU:
            res.closed_form = 2.0 * std::sqrt(b * std::exp(b));
            break;
        default: break;
    }

    if (method == DistortionMethod::closed_form) {
        res.value = res.closed_form;
        return res;
    }

    if (K < 16) throw ParameterError("distortion product: K must be >= 16");
    const CharFunction cf = charfn_for(spec);
    const RootList roots = find_roots(cf, K);

    std::vector<double> r(K);
    if (spec.family == Family::IntegratedOU) {
        for (int k = 1; k <= K; ++k) {
            const double z = roots.zeta[k - 1];
            const double lam = z * z * z * z + b * b * z * z;
            const double ref = std::numbers::pi * std::numbers::pi * (k - 0.5) * (k - 0.5);
            r[k - 1] = 0.5 * std::log(lam) - std::log(ref);
        }
    } else {
        for (int k = 1; k <= K; ++k) {
            const double z = roots.zeta[k - 1];
            const double ref = std::numbers::pi * k;
            r[k - 1] = std::log((z * z + b * b) / (ref * ref));
        }
    }

    if (std::abs(r[K - 1]) > 1e-2) {
        throw DivergenceError("distortion product: last log-ratio is " +
                              std::to_string(r[K - 1]) + ", product diverges");
    }

    double running = 0.0;
    for (int k = 0; k < K; ++k) {
        running += r[k];
        if ((k + 1) % std::max(1, K / 8) == 0) {
            res.trace.push_back(std::exp(running));
        }
    }
    res.partial = std::exp(running);
    res.tail_correction = log_ratio_tail(r);
    res.product = std::exp(running + res.tail_correction);
    res.abs_diff = std::abs(res.product - res.closed_form);
    res.value = res.product;
    return res;
}

} // namespace smallball
