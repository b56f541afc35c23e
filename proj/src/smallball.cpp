#include "smallball/smallball.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "smallball/charfn.hpp"
#include "smallball/errors.hpp"
#include "smallball/nystrom.hpp"
#include "smallball/quadrature.hpp"
#include "smallball/rng.hpp"

namespace smallball {

namespace {

Spectrum demeaned_bridge_spectrum(int K) {
    // Periodic problem: doubly degenerate eigenvalues (2 pi k)^2 plus the
    // deflated constant.
    Spectrum sp;
    sp.mu.reserve(K);
    for (int k = 1; static_cast<int>(sp.mu.size()) < K; ++k) {
        const double z = 2.0 * std::numbers::pi * k;
        sp.mu.push_back(1.0 / (z * z));
        if (static_cast<int>(sp.mu.size()) < K) sp.mu.push_back(1.0 / (z * z));
    }
    sp.zero_modes = 1;
    sp.provenance = Provenance::closed_form;
    sp.truncation = K;
    return sp;
}

Spectrum xalpha_spectrum(double alpha, int K) {
    // cos(zeta) = -2a/(1+a^2): zeta alternates around even multiples of pi.
    const double c = -2.0 * alpha / (1.0 + alpha * alpha);
    const double a = std::acos(std::clamp(c, -1.0, 1.0));
    Spectrum sp;
    sp.mu.reserve(K);
    for (int m = 0; static_cast<int>(sp.mu.size()) < K; ++m) {
        const double lo = 2.0 * std::numbers::pi * m + a;
        sp.mu.push_back(1.0 / (lo * lo));
        if (static_cast<int>(sp.mu.size()) < K) {
            const double hi = 2.0 * std::numbers::pi * (m + 1) - a;
            sp.mu.push_back(1.0 / (hi * hi));
        }
    }
    sp.zero_modes = 0;
    sp.provenance = Provenance::closed_form;
    sp.truncation = K;
    return sp;
}

} // namespace

Spectrum analytic_spectrum(const ProcessSpec& spec, int K) {
    spec.validate();
    if (K < 2) throw ParameterError("analytic_spectrum: K must be >= 2");
    if (spec.demeaned) {
        switch (spec.family) {
            case Family::Wiener:
            case Family::Xalpha: {
                Spectrum sp = reference_spectrum_pik(K);
                sp.numbering_shift = 1;
                return sp;
            }
            case Family::BrownianBridge: return demeaned_bridge_spectrum(K);
            case Family::OU:
            case Family::OUZero: {
                if (spec.beta == 0.0) {
                    Spectrum sp = reference_spectrum_pik(K);
                    sp.numbering_shift = 1;
                    return sp;
                }
                const CharFunction f = charfn_for(spec);
                return spectrum_from_roots(f, find_roots(f, K));
            }
            case Family::IntegratedOU: {
                const CharFunction f = charfn_for(spec);
                return spectrum_from_roots(f, find_roots(f, K));
            }
        }
    }
    switch (spec.family) {
        case Family::Wiener: return wiener_spectrum(K);
        case Family::BrownianBridge: return reference_spectrum_pik(K);
        case Family::Xalpha: return xalpha_spectrum(spec.alpha, K);
        default:
            throw NotApplicableError(
                "no closed or characteristic spectrum for " + spec.label() +
                "; use the Nystrom path");
    }
}

QuadFormDist make_quadform(const ProcessSpec& spec, int K, std::uint64_t seed) {
    spec.validate();
    QuadFormDist d;
    d.seed = seed;
    const int decay = (spec.family == Family::IntegratedOU) ? 4 : 2;
    try {
        d.spectrum = analytic_spectrum(spec, K);
    } catch (const NotApplicableError&) {
        const int k_eff = std::min(K, 100);
        d.spectrum = nystrom_spectrum(kernel(spec), 2000, k_eff).spectrum;
    }
    d.tail_mean = spectrum_tail_mean(d.spectrum, decay);
    return d;
}

namespace {

// Integrand context with suffix sums so the per-term work stops where
// mu_k * u is below the series cutoff.
struct ImhofCtx {
    std::vector<double> mu;
    std::vector<double> suf1, suf2, suf3, suf4;

    explicit ImhofCtx(const std::vector<double>& m) : mu(m) {
        const std::size_t K = mu.size();
        suf1.assign(K + 1, 0.0);
        suf2.assign(K + 1, 0.0);
        suf3.assign(K + 1, 0.0);
        suf4.assign(K + 1, 0.0);
        for (std::size_t k = K; k-- > 0;) {
            suf1[k] = suf1[k + 1] + mu[k];
            suf2[k] = suf2[k + 1] + mu[k] * mu[k];
            suf3[k] = suf3[k + 1] + mu[k] * mu[k] * mu[k];
            suf4[k] = suf4[k + 1] + mu[k] * mu[k] * mu[k] * mu[k];
        }
    }

    // theta(u) and log rho(u) in one sweep.
    void eval(double u, double x, double* theta, double* logrho) const {
        const double cutoff = 1e-3;
        // First index with mu_k * u < cutoff (mu is descending).
        std::size_t k_star = mu.size();
        if (!mu.empty() && mu.back() * u < cutoff) {
            std::size_t lo = 0, hi = mu.size();
            while (lo < hi) {
                const std::size_t mid = (lo + hi) / 2;
                if (mu[mid] * u < cutoff) hi = mid;
                else lo = mid + 1;
            }
            k_star = lo;
        }
        double th = 0.0, lr = 0.0;
        for (std::size_t k = 0; k < k_star; ++k) {
            const double z = mu[k] * u;
            th += std::atan(z);
            lr += std::log1p(z * z);
        }
        // atan(z) ~ z - z^3/3, log1p(z^2) ~ z^2 - z^4/2 below the cutoff.
        th += u * suf1[k_star] - u * u * u * suf3[k_star] / 3.0;
        lr += u * u * suf2[k_star] - 0.5 * u * u * u * u * suf4[k_star];
        *theta = 0.5 * th - 0.5 * x * u;
        *logrho = 0.25 * lr;
    }

    double rate(double u, double x) const {
        double r = x;
        for (double m : mu) {
            const double z = m * u;
            r += m / (1.0 + z * z);
        }
        return r + 1.0 / (1.0 + u);
    }

    // d theta / du and d log rho / du, exact.
    void derivs(double u, double x, double* theta_p, double* logrho_p) const {
        double tp = 0.0, rp = 0.0;
        for (double m : mu) {
            const double z = m * u;
            tp += m / (1.0 + z * z);
            rp += m * z / (1.0 + z * z);
        }
        *theta_p = 0.5 * tp - 0.5 * x;
        *logrho_p = 0.5 * rp;
    }
};

struct ImhofPass {
    double integral = 0.0;
    bool converged = false;
};

template <bool Parallel>
ImhofPass imhof_integral(const ImhofCtx& ctx, double x, double density,
                         double abs_tol) {
    const GaussRule& rule = gauss_legendre(24);
    const int nn = 24;
    ImhofPass out;
    double u0 = 0.0;
    int quiet = 0;
    std::vector<double> vals(nn);
    const double stop_thresh = std::max(abs_tol * 1e-2, 1e-300);
    for (long panel = 0; panel < 400000; ++panel) {
        const double w = std::numbers::pi / (ctx.rate(u0, x) * density);
        const double a = u0, b = u0 + w;
        const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
#pragma omp parallel for schedule(static) if (Parallel)
        for (int i = 0; i < nn; ++i) {
            const double u = mid + half * rule.nodes[i];
            double theta = 0.0, logrho = 0.0;
            ctx.eval(u, x, &theta, &logrho);
            vals[i] = std::sin(theta) * std::exp(-logrho) / u;
        }
        double contrib = 0.0;
        for (int i = 0; i < nn; ++i) contrib += rule.weights[i] * vals[i];
        contrib *= half;
        out.integral += contrib;
        u0 = b;

        // Once the phase rate has settled near -x/2, one integration by
        // parts evaluates the oscillatory tail to leading order:
        //   int_T^inf A sin(theta) du = -A cos(theta)/theta' |_T + R,
        // with |R| bounded by the decay rate of A/theta'.
        double theta_end = 0.0, logrho_end = 0.0;
        ctx.eval(u0, x, &theta_end, &logrho_end);
        double tp = 0.0, lrp = 0.0;
        ctx.derivs(u0, x, &tp, &lrp);
        if (std::abs(contrib) < stop_thresh && tp < -0.25 * x) {
            const double amp = std::exp(-logrho_end) / u0;
            const double bound = 4.0 * amp * (1.0 / u0 + lrp) / (tp * tp);
            if (bound < abs_tol / 3.0) {
                if (++quiet >= 2) {
                    out.integral += amp * std::cos(theta_end) / tp;
                    out.converged = true;
                    break;
                }
                else {
                    continue;
                }
            }
        }
        quiet = 0;
    }
    return out;
}

template <bool Parallel>
CdfResult quadform_cdf_impl(const QuadFormDist& d, double x, double abs_tol) {
    d.spectrum.check_invariants();
    if (d.spectrum.mu.empty()) throw ParameterError("quadform_cdf: empty spectrum");
    if (!(x > 0.0)) throw ParameterError("quadform_cdf: x must be positive");

    const double xs = x - d.tail_mean;
    if (xs <= 0.0) {
        return CdfResult{0.0, 0.0, true};
    }

    const ImhofCtx ctx(d.spectrum.mu);
    const ImhofPass pass1 = imhof_integral<Parallel>(ctx, xs, 1.0, abs_tol);
    const ImhofPass pass2 = imhof_integral<Parallel>(ctx, xs, 2.0, abs_tol);
    if (!pass1.converged || !pass2.converged) {
        throw PrecisionError("quadform_cdf: quadrature did not converge",
                             std::abs(pass1.integral - pass2.integral));
    }
    const double p1 = 0.5 - pass1.integral / std::numbers::pi;
    const double p2 = 0.5 - pass2.integral / std::numbers::pi;
    const double err = std::abs(p1 - p2);
    if (err > abs_tol) {
        throw PrecisionError("quadform_cdf: passes disagree beyond target",
                             err);
    }
    CdfResult res;
    res.p = std::clamp(p2, 0.0, 1.0);
    res.error_bound = err;
    return res;
}

} // namespace

CdfResult quadform_cdf(const QuadFormDist& d, double x, double abs_tol) {
    return quadform_cdf_impl<true>(d, x, abs_tol);
}

CdfResult quadform_cdf_serial(const QuadFormDist& d, double x, double abs_tol) {
    return quadform_cdf_impl<false>(d, x, abs_tol);
}

namespace {

constexpr std::uint64_t kChunk = 8192;

template <bool Parallel>
McResult quadform_mc_impl(const QuadFormDist& d, double x,
                          std::uint64_t n_samples) {
    if (n_samples < 10000) {
        throw ParameterError("quadform_mc: need at least 1e4 samples");
    }
    const double xs = x - d.tail_mean;
    const std::vector<double>& mu = d.spectrum.mu;
    const std::uint64_t n_chunks = (n_samples + kChunk - 1) / kChunk;

    std::uint64_t below = 0;
#pragma omp parallel for schedule(dynamic) reduction(+ : below) if (Parallel)
    for (long long c = 0; c < static_cast<long long>(n_chunks); ++c) {
        NormalStream ns(chunk_seed(d.seed, static_cast<std::uint64_t>(c)));
        const std::uint64_t lo = static_cast<std::uint64_t>(c) * kChunk;
        const std::uint64_t hi = std::min(lo + kChunk, n_samples);
        std::uint64_t local = 0;
        for (std::uint64_t s = lo; s < hi; ++s) {
            double q = 0.0;
            for (double m : mu) {
                const double z = ns.next();
                q += m * z * z;
            }
            if (q <= xs) ++local;
        }
        below += local;
    }

    McResult res;
    res.below = below;
    res.samples = n_samples;
    res.estimate = static_cast<double>(below) / static_cast<double>(n_samples);
    res.stderr_est = std::sqrt(res.estimate * (1.0 - res.estimate) /
                               static_cast<double>(n_samples));
    return res;
}

} // namespace

McResult quadform_mc(const QuadFormDist& d, double x, std::uint64_t n) {
    return quadform_mc_impl<true>(d, x, n);
}

McResult quadform_mc_serial(const QuadFormDist& d, double x, std::uint64_t n) {
    return quadform_mc_impl<false>(d, x, n);
}

double asymptotic_prob(const ProcessSpec& spec, double eps) {
    spec.validate();
    if (!(eps > 0.0)) throw ParameterError("asymptotic_prob: eps must be > 0");
    if (!spec.demeaned) {
        throw NotApplicableError(
            "sharp asymptotics are available for the demeaned families only");
    }
    const double b = spec.beta;
    const double gauss_rate = std::exp(-1.0 / (8.0 * eps * eps));
    switch (spec.family) {
        case Family::Wiener:
        case Family::Xalpha:
            return std::sqrt(8.0 / std::numbers::pi) * gauss_rate;
        case Family::OU:
            return std::sqrt(16.0 * std::exp(b) /
                             (std::numbers::pi * (2.0 + b))) *
                   gauss_rate;
        case Family::OUZero:
            return std::sqrt(8.0 * std::exp(b) / std::numbers::pi) * gauss_rate;
        case Family::IntegratedOU:
            return 16.0 * std::sqrt(b * std::exp(b) / (3.0 * std::numbers::pi)) *
                   std::cbrt(eps) *
                   std::exp(-3.0 / 8.0 * std::pow(eps, -2.0 / 3.0));
        case Family::BrownianBridge:
            throw NotApplicableError(
                "no closed asymptotic form for the demeaned Brownian bridge");
    }
    throw NotApplicableError("unsupported spec");
}

LiComparison li_comparison(const Spectrum& target, const Spectrum& reference) {
    target.check_invariants();
    reference.check_invariants();
    const std::size_t K = target.size();
    if (K != reference.size()) {
        throw ParameterError("li_comparison: spectra must share the truncation");
    }
    if (K < 16) throw ParameterError("li_comparison: need K >= 16");

    std::vector<double> r(K);
    for (std::size_t k = 0; k < K; ++k) {
        r[k] = std::log(reference.mu[k] / target.mu[k]);
    }
    const double last = std::abs(r[K - 1]);
    const double mid = std::abs(r[K / 2 - 1]);
    if (last > 1e-2 || (last > 1e-6 && last > 0.5 * mid)) {
        throw DivergenceError(
            "li_comparison: eigenvalue ratio does not approach 1 (last "
            "log-ratio " +
            std::to_string(r[K - 1]) + ")");
    }

    LiComparison out;
    double running = 0.0;
    for (std::size_t k = 0; k < K; ++k) {
        running += r[k];
        if ((k + 1) % std::max<std::size_t>(1, K / 8) == 0) {
            out.trace.push_back(std::exp(0.5 * running));
        }
    }
    out.partial = std::exp(0.5 * running);
    out.tail_correction = log_ratio_tail(r);
    out.constant = std::exp(0.5 * (running + out.tail_correction));
    return out;
}

std::vector<SmallBallReport> make_report(const ProcessSpec& spec,
                                         const std::vector<double>& eps_list,
                                         const ReportConfig& cfg) {
    spec.validate();
    std::vector<SmallBallReport> rows;
    if (eps_list.empty()) return rows;

    QuadFormDist exact_dist, mc_dist;
    if (cfg.with_exact) exact_dist = make_quadform(spec, cfg.K_trunc, cfg.seed);
    if (cfg.with_mc) mc_dist = make_quadform(spec, cfg.K_mc, cfg.seed);

    for (double eps : eps_list) {
        if (!(eps > 0.0)) throw ParameterError("report: eps must be > 0");
        SmallBallReport row;
        row.process = spec.label();
        row.beta_or_alpha = (spec.family == Family::Xalpha) ? spec.alpha
                            : spec.uses_beta()              ? spec.beta
                                                            : 0.0;
        row.epsilon = eps;
        if (cfg.with_exact) {
            const CdfResult c = quadform_cdf(exact_dist, eps * eps);
            // Below the inversion accuracy floor only the asymptotic
            // path is meaningful.
            if (!c.floored && c.p >= 1e-12) row.p_exact = c.p;
        }
        if (cfg.with_mc) {
            const McResult m = quadform_mc(mc_dist, eps * eps, cfg.n_samples);
            row.p_mc = m.estimate;
            row.mc_stderr = m.stderr_est;
        }
        if (cfg.with_asymptotic) {
            try {
                row.p_asymptotic = asymptotic_prob(spec, eps);
            } catch (const NotApplicableError&) {
            }
        }
        if (row.p_exact && row.p_asymptotic && *row.p_asymptotic > 0.0) {
            row.ratio = *row.p_exact / *row.p_asymptotic;
        }
        rows.push_back(row);
    }
    return rows;
}

} // namespace smallball
