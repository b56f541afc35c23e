#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace smallball {

enum class Provenance { nystrom, characteristic, closed_form };

std::string provenance_name(Provenance p);

/// KL eigenvalues mu_k in non-increasing order. zero_modes counts
/// excluded (near-)zero eigenvalues; demeaned kernels always report at
/// least one (the constant function). numbering_shift records how many
/// BVP eigenvalues were skipped so mu_k maps to lambda_{k+shift}.
struct Spectrum {
    std::vector<double> mu;
    int zero_modes = 0;
    int numbering_shift = 0;
    Provenance provenance = Provenance::closed_form;
    int truncation = 0;

    std::size_t size() const { return mu.size(); }
    double lambda(std::size_t k) const { return 1.0 / mu[k]; }
    double sum_mu() const;
    void check_invariants() const;  // positive, non-increasing
};

/// One Nystrom eigenpair: eigenvalue plus the eigenfunction sampled at
/// the quadrature nodes, L2-normalized.
struct EigenPair {
    double mu = 0.0;
    std::vector<double> nodes;
    std::vector<double> weights;
    std::vector<double> values;
};

/// mu_k = (pi k)^-2, the Brownian-bridge / demeaned-Wiener spectrum.
Spectrum reference_spectrum_pik(int K);
/// mu_k = (pi (k - 1/2))^-2, the Wiener spectrum.
Spectrum wiener_spectrum(int K);
/// mu_k = (pi (k - 1/2))^-4, the quartic comparison spectrum.
Spectrum reference_spectrum_quartic(int K);

/// Trigamma-style tails: sum_{k > K} (k + s)^-p for p in {2, 3, 4, 5}.
double power_tail(int p, double K_plus_s);

/// sum_{k > K} (-1)^k (k + s)^-p, summed pairwise.
double alternating_power_tail(int p, int K, double s = 0.0);

/// Estimated sum_{k > K} mu_k from the known k^-p decay, by fitting
/// mu_k ~ A (k + s)^-p through the last two eigenvalues.
double spectrum_tail_mean(const Spectrum& sp, int decay_power);

/// Tail of sum_{k > K} r_k for log-ratio sequences r_k that behave like
/// (a + c (-1)^k)/k^2 + (b + d (-1)^k)/k^3, fitted by least squares over
/// the trailing window. Used by the distortion products.
double log_ratio_tail(std::span<const double> r, int window = 32);

} // namespace smallball
