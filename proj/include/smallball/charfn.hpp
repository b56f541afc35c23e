#pragma once

#include <complex>
#include <vector>

#include "smallball/process.hpp"
#include "smallball/spectrum.hpp"

namespace smallball {

/// Complex value carried as mantissa * exp(log_scale) so determinants of
/// size e^{|zeta|} stay representable; log_abs() is always finite-safe.
struct LogComplex {
    std::complex<double> mantissa{0.0, 0.0};
    double log_scale = 0.0;

    std::complex<double> value() const;
    double log_abs() const;
    LogComplex normalized() const;
};

/// F_beta(zeta): determinant condition for the demeaned OU process.
/// Entire after the removable singularity at zeta = 0, which is handled
/// by the Maclaurin-series path for |zeta| <= 0.5. beta = 0 degenerates
/// to 2 sin(zeta)/zeta.
std::complex<double> charfn_ou(std::complex<double> zeta, double beta);

/// F^o_beta(zeta): same for the demeaned OU process started at zero;
/// beta = 0 gives sin(zeta)/zeta.
std::complex<double> charfn_ou0(std::complex<double> zeta, double beta);

/// The 4x4 boundary determinant for the demeaned integrated OU process,
/// with zeta0 = zeta and zeta1 = i sqrt(zeta^2 + beta^2) (principal
/// branch). Columns are rescaled by exp(-max(Re lambda, 0)) wholesale so
/// the result is exact in logarithm form; throws RangeError if the
/// scaled determinant still leaves the floating range.
LogComplex det_F(std::complex<double> zeta, double beta);

/// Vandermonde of (zeta0, -zeta0, zeta1, -zeta1) in closed form:
/// 4 zeta zeta1 (2 zeta^2 + beta^2)^2.
std::complex<double> vandermonde_factor(std::complex<double> zeta, double beta);

/// F2 = F / (V * (zeta^4 + beta^2 zeta^2)); removable points at 0 and
/// +-i*beta are evaluated by even-order Richardson limits from outside
/// the cancellation zone. |F2(0)| = 2 beta e^beta.
LogComplex charfn_F2(std::complex<double> zeta, double beta);

enum class CharFamily { F_ou, F_ou0, Fdet, Fdet2 };

/// A characteristic function whose positive real roots parameterize the
/// KL eigenvalues of one demeaned family.
struct CharFunction {
    CharFamily family = CharFamily::F_ou;
    double beta = 1.0;
    double removable_radius = 0.05;

    std::complex<double> eval(std::complex<double> zeta) const;
    LogComplex eval_log(std::complex<double> zeta) const;

    /// Real-axis evaluation rescaled to O(1) growth: same sign and zeros
    /// as the underlying function for zeta > 0 (Fdet2 is divided by
    /// (1/2) cosh zeta and the positive determinant prefactors).
    double eval_real_scaled(double zeta) const;

    /// Asymptotic location of the k-th positive real root.
    double root_spacing(int k) const;
};

CharFunction make_charfn(CharFamily family, double beta);

/// The characteristic function of a demeaned catalog process
/// (OU -> F_ou, OUZero -> F_ou0, IntegratedOU -> Fdet2).
CharFunction charfn_for(const ProcessSpec& spec);

struct RootList {
    std::vector<double> zeta;
    std::vector<double> residual;       // |scaled f| at the root
    std::vector<double> local_scale;    // max |scaled f| near the root
    std::vector<double> bracket_width;  // final bisection interval
};

struct RootOptions {
    double rel_tol = 1e-13;
    int scan_cells = 32;
};

/// Locates the first k_max positive real roots. Each root is bracketed
/// near root_spacing(k) and bisected; when a bracket fails to isolate
/// exactly one sign change the whole range is re-scanned at increasing
/// resolution, and a RootIsolationError is raised if the count never
/// stabilizes.
RootList find_roots(const CharFunction& f, int k_max, const RootOptions& opt = {});

/// Maps roots to KL eigenvalues: mu = 1/(zeta^2 + beta^2) for the OU
/// families, mu = 1/(zeta^4 + beta^2 zeta^2) for the integrated family
/// (numbering already shifted past the zero eigenvalue).
Spectrum spectrum_from_roots(const CharFunction& f, const RootList& roots);

enum class DistortionMethod { closed_form, product };

struct DistortionResult {
    double value = 0.0;        // the requested method's value
    double closed_form = 0.0;
    double product = 0.0;      // partial product with tail correction
    double partial = 0.0;      // partial product without the tail
    double tail_correction = 0.0;
    double abs_diff = 0.0;     // |product - closed_form|
    std::vector<double> trace; // running partial values at checkpoints
};

/// Distortion constants of the demeaned OU/OUZero/IntegratedOU families:
/// closed forms 2 e^b/(2+b), e^b and 2 sqrt(b e^b), or the convergent
/// product over the first K eigenvalue ratios with an analytic tail.
DistortionResult distortion_constant(const ProcessSpec& spec,
                                     DistortionMethod method, int K = 500);

} // namespace smallball
