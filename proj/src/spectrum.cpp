#include "smallball/spectrum.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "smallball/errors.hpp"

namespace smallball {

std::string provenance_name(Provenance p) {
    switch (p) {
        case Provenance::nystrom: return "nystrom";
        case Provenance::characteristic: return "characteristic";
        case Provenance::closed_form: return "closed_form";
    }
    return "?";
}

double Spectrum::sum_mu() const {
    // Ascending accumulation keeps the tiny tail terms from drowning.
    double s = 0.0;
    for (auto it = mu.rbegin(); it != mu.rend(); ++it) s += *it;
    return s;
}

void Spectrum::check_invariants() const {
    for (std::size_t k = 0; k < mu.size(); ++k) {
        if (!(mu[k] > 0.0)) throw KernelError("spectrum: nonpositive eigenvalue");
        if (k > 0 && mu[k] > mu[k - 1] * (1.0 + 1e-12)) {
            throw KernelError("spectrum: eigenvalues not non-increasing");
        }
    }
}

Spectrum reference_spectrum_pik(int K) {
    Spectrum sp;
    sp.mu.resize(K);
    for (int k = 1; k <= K; ++k) {
        const double z = std::numbers::pi * k;
        sp.mu[k - 1] = 1.0 / (z * z);
    }
    sp.zero_modes = 1;
    sp.provenance = Provenance::closed_form;
    sp.truncation = K;
    return sp;
}

Spectrum wiener_spectrum(int K) {
    Spectrum sp;
    sp.mu.resize(K);
    for (int k = 1; k <= K; ++k) {
        const double z = std::numbers::pi * (k - 0.5);
        sp.mu[k - 1] = 1.0 / (z * z);
    }
    sp.zero_modes = 0;
    sp.provenance = Provenance::closed_form;
    sp.truncation = K;
    return sp;
}

Spectrum reference_spectrum_quartic(int K) {
    Spectrum sp;
    sp.mu.resize(K);
    for (int k = 1; k <= K; ++k) {
        const double z = std::numbers::pi * (k - 0.5);
        sp.mu[k - 1] = 1.0 / (z * z * z * z);
    }
    sp.zero_modes = 1;
    sp.provenance = Provenance::closed_form;
    sp.truncation = K;
    return sp;
}

double power_tail(int p, double a0) {
    // sum_{k >= 1} (a0 + k)^-p via the Euler-Maclaurin expansion of the
    // Hurwitz zeta at a = a0 + 1; accurate to ~1e-14 for a >= 10.
    const double a = a0 + 1.0;
    const double inv = 1.0 / a;
    double p1 = 1.0;
    for (int j = 0; j < p - 1; ++j) p1 *= inv;  // a^{1-p}
    const double pp = static_cast<double>(p);
    const double lead = p1 / (pp - 1.0);
    const double half = 0.5 * p1 * inv;
    const double b2 = pp * p1 * inv * inv / 12.0;
    const double b4 = pp * (pp + 1.0) * (pp + 2.0) * p1 * inv * inv * inv * inv / 720.0;
    return lead + half + b2 - b4;
}

double alternating_power_tail(int p, int K, double s) {
    // Pairs (k, k+1) give a series of O(k^{-p-1}) terms; 4000 pairs push
    // the remainder well below 1e-15 for K >= 50.
    double sum = 0.0;
    double sign = ((K + 1) % 2 == 0) ? 1.0 : -1.0;
    for (int k = K + 1; k < K + 8001; k += 2) {
        const double a = k + s, b = k + 1 + s;
        sum += sign * (std::pow(a, -p) - std::pow(b, -p));
    }
    return sum;
}

double spectrum_tail_mean(const Spectrum& sp, int decay_power) {
    const std::size_t K = sp.mu.size();
    if (K < 2) throw ParameterError("spectrum_tail_mean: need >= 2 eigenvalues");
    if (decay_power != 2 && decay_power != 4) {
        throw ParameterError("spectrum_tail_mean: decay power must be 2 or 4");
    }
    const double muK = sp.mu[K - 1];
    const double muKm = sp.mu[K - 2];
    // Fit mu_k = A (k + s)^-p through the last two entries.
    const double q = std::pow(muKm / muK, 1.0 / decay_power);
    double s = 0.0;
    if (std::abs(1.0 - q) > 1e-12) {
        s = (q * (static_cast<double>(K) - 1.0) - static_cast<double>(K)) / (1.0 - q);
    }
    if (!std::isfinite(s) || std::abs(s) > 0.5 * static_cast<double>(K)) s = 0.0;
    const double A = muK * std::pow(static_cast<double>(K) + s, decay_power);
    return A * power_tail(decay_power, static_cast<double>(K) + s);
}

double log_ratio_tail(std::span<const double> r, int window) {
    const int K = static_cast<int>(r.size());
    const int m = std::min(window, K);
    if (m < 8) throw ParameterError("log_ratio_tail: too few terms");

    // Least squares for r_k = a/k^2 + b/k^3 + c(-1)^k/k^2 + d(-1)^k/k^3
    // over the last m indices, via normal equations on the 4x4 system.
    std::array<std::array<double, 4>, 4> ata{};
    std::array<double, 4> atb{};
    for (int k = K - m + 1; k <= K; ++k) {
        const double kk = static_cast<double>(k);
        const double sg = (k % 2 == 0) ? 1.0 : -1.0;
        const std::array<double, 4> row{1.0 / (kk * kk), 1.0 / (kk * kk * kk),
                                        sg / (kk * kk), sg / (kk * kk * kk)};
        const double y = r[k - 1];
        for (int i = 0; i < 4; ++i) {
            atb[i] += row[i] * y;
            for (int j = 0; j < 4; ++j) ata[i][j] += row[i] * row[j];
        }
    }
    // Gaussian elimination with partial pivoting.
    std::array<std::array<double, 5>, 4> aug{};
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) aug[i][j] = ata[i][j];
        aug[i][4] = atb[i];
    }
    for (int col = 0; col < 4; ++col) {
        int piv = col;
        for (int rix = col + 1; rix < 4; ++rix) {
            if (std::abs(aug[rix][col]) > std::abs(aug[piv][col])) piv = rix;
        }
        std::swap(aug[col], aug[piv]);
        if (aug[col][col] == 0.0) throw DivergenceError("log_ratio_tail: singular fit");
        for (int rix = col + 1; rix < 4; ++rix) {
            const double f = aug[rix][col] / aug[col][col];
            for (int j = col; j < 5; ++j) aug[rix][j] -= f * aug[col][j];
        }
    }
    std::array<double, 4> coef{};
    for (int i = 3; i >= 0; --i) {
        double v = aug[i][4];
        for (int j = i + 1; j < 4; ++j) v -= aug[i][j] * coef[j];
        coef[i] = v / aug[i][i];
    }

    return coef[0] * power_tail(2, static_cast<double>(K)) +
           coef[1] * power_tail(3, static_cast<double>(K)) +
           coef[2] * alternating_power_tail(2, K) +
           coef[3] * alternating_power_tail(3, K);
}

} // namespace smallball
