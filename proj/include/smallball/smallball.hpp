#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "smallball/process.hpp"
#include "smallball/spectrum.hpp"

namespace smallball {

/// Truncated quadratic form sum_{k<=K} mu_k xi_k^2 plus the deterministic
/// tail-mean shift standing in for the discarded terms.
struct QuadFormDist {
    Spectrum spectrum;
    double tail_mean = 0.0;
    std::uint64_t seed = 0;
};

/// Closed-form or characteristic-root spectrum of a catalog process;
/// throws NotApplicableError where only the Nystrom path exists
/// (undemeaned OU families).
Spectrum analytic_spectrum(const ProcessSpec& spec, int K);

/// Distribution for a catalog process: closed-form eigenvalue maps where
/// they exist (demeaned Wiener/Xalpha, Wiener, Brownian bridge),
/// characteristic roots for the demeaned OU families, Nystrom otherwise.
QuadFormDist make_quadform(const ProcessSpec& spec, int K = 2000,
                           std::uint64_t seed = 0);

struct CdfResult {
    double p = 0.0;
    double error_bound = 0.0;
    bool floored = false;  // x <= tail_mean: only the trivial lower bound
};

/// P{Q <= x} by Imhof-type characteristic function inversion, with a
/// doubled-resolution second pass as the error estimate. Throws
/// PrecisionError when the two passes disagree beyond the target.
CdfResult quadform_cdf(const QuadFormDist& d, double x,
                       double abs_tol = 1e-8);
CdfResult quadform_cdf_serial(const QuadFormDist& d, double x,
                              double abs_tol = 1e-8);

struct McResult {
    double estimate = 0.0;
    double stderr_est = 0.0;
    std::uint64_t below = 0;
    std::uint64_t samples = 0;
};

/// Seeded Monte Carlo estimate of P{Q <= x}. Chunked substreams make the
/// count independent of the thread partition, so identical (seed, n)
/// reproduce the estimate bit for bit.
McResult quadform_mc(const QuadFormDist& d, double x, std::uint64_t n_samples);
McResult quadform_mc_serial(const QuadFormDist& d, double x,
                            std::uint64_t n_samples);

/// The sharp small-ball closed forms for the demeaned catalog families.
double asymptotic_prob(const ProcessSpec& spec, double eps);

struct LiComparison {
    double constant = 0.0;
    double partial = 0.0;
    double tail_correction = 0.0;
    std::vector<double> trace;
};

/// (prod_k reference_k / target_k)^{1/2} with tail correction: the
/// asymptotic proportionality constant between the two small-ball
/// probabilities. Throws DivergenceError when the running ratio fails
/// to stabilize.
LiComparison li_comparison(const Spectrum& target, const Spectrum& reference);

struct SmallBallReport {
    std::string process;
    double beta_or_alpha = 0.0;
    double epsilon = 0.0;
    std::optional<double> p_exact;
    std::optional<double> p_mc;
    std::optional<double> mc_stderr;
    std::optional<double> p_asymptotic;
    std::optional<double> ratio;  // p_exact / p_asymptotic
};

struct ReportConfig {
    int K_trunc = 2000;
    int K_mc = 400;
    bool with_exact = true;
    bool with_mc = false;
    bool with_asymptotic = true;
    std::uint64_t n_samples = 1000000;
    std::uint64_t seed = 1;
};

/// One row per epsilon with the requested probability estimates.
std::vector<SmallBallReport> make_report(const ProcessSpec& spec,
                                         const std::vector<double>& eps_list,
                                         const ReportConfig& cfg);

} // namespace smallball
