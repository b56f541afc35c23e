#pragma once

#include <array>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace smallball {

enum class Family {
    Wiener,
    BrownianBridge,
    Xalpha,
    OU,
    OUZero,
    IntegratedOU,
};

std::string family_name(Family f);

/// A process from the catalog: family plus parameters.
///
/// beta = 0 is accepted for OU/OUZero as the documented Wiener limit so
/// that closed-form constants and asymptotics can be evaluated there;
/// covariance construction rejects it (the kernel scale 1/(2*beta)
/// degenerates).
struct ProcessSpec {
    Family family = Family::Wiener;
    double alpha = 0.0;   // Xalpha only, != -1
    double beta = 1.0;    // OU families, >= 0 (> 0 for IntegratedOU)
    bool demeaned = false;

    void validate() const;
    bool uses_beta() const;
    std::string label() const;

    static ProcessSpec wiener(bool demeaned = false);
    static ProcessSpec brownian_bridge(bool demeaned = false);
    static ProcessSpec xalpha(double alpha, bool demeaned = false);
    static ProcessSpec ou(double beta, bool demeaned = false);
    static ProcessSpec ou_zero(double beta, bool demeaned = false);
    static ProcessSpec integrated_ou(double beta, bool demeaned = false);
};

/// Symmetric covariance kernel on [0,1]^2.
///
/// row_mean/total_mean carry closed forms of t -> Int_0^1 k(t,s) ds and
/// of the double integral when the kernel admits them; demeaning and the
/// oracle tests fall back to kink-aware quadrature when absent.
struct Kernel {
    std::function<double(double, double)> eval;
    std::string label;
    int smoothness_hint = 0;  // continuous derivatives across the diagonal
    bool annihilates_constants = false;
    std::function<double(double)> row_mean;  // may be empty
    std::optional<double> total_mean;

    double operator()(double t, double s) const { return eval(t, s); }

    /// Int_0^1 k(t,s) ds: closed form when present, quadrature otherwise.
    double mean_over_rows(double t) const;
    /// Double integral of k over the unit square.
    double mean_total() const;
};

/// One linear boundary form sum_j at0[j] u^(j)(0) + sum_j at1[j] u^(j)(1).
struct BoundaryForm {
    std::array<double, 4> at0{0, 0, 0, 0};
    std::array<double, 4> at1{0, 0, 0, 0};
    std::string label;
};

/// Constant-coefficient differential operator L u = sum_j coeff[j] u^(j)
/// of order 2 or 4 with its boundary forms.
struct OperatorSpec {
    int order = 2;
    std::array<double, 5> coeff{0, 0, 0, 0, 0};
    std::vector<BoundaryForm> boundary_forms;

    void validate() const;
    bool has_zero_order_term() const { return coeff[0] != 0.0; }
};

struct ResidualReport {
    double max_interior_residual = 0.0;   // max |L u - lambda u| off the ends
    double interior_scale = 0.0;          // |lambda| * max |u|
    std::vector<double> boundary_values;  // one entry per boundary form
    std::vector<double> boundary_scales;  // magnitude proxy per form
    double h = 0.0;
};

/// Covariance kernel of the (possibly demeaned) process.
Kernel kernel(const ProcessSpec& spec);

/// Demeaned kernel: k(t,s) - I(t) - I(s) + J with I the row mean and J
/// the total mean. Kernels that already annihilate constants are
/// returned unchanged.
Kernel demean_kernel(const Kernel& k);

/// (t,s) -> Int_0^t Int_0^s k(u,v) dv du. Closed form for the OU kernel,
/// nested quadrature otherwise.
Kernel integrated_kernel(const Kernel& k);

/// Finite-difference residual of (L - lambda) u on a uniform grid plus
/// the values of every boundary form of `op` (4th-order stencils; the
/// interior excludes a boundary layer of op.order points).
ResidualReport operator_residual(const OperatorSpec& op,
                                 std::span<const double> u, double lambda);

/// Boundary value problem of the (possibly demeaned) catalog process.
/// Demeaned variants exist only when the base operator has no zero-order
/// term; OU/OUZero demeaned requests raise NotApplicableError.
OperatorSpec catalog_operator(const ProcessSpec& spec);

} // namespace smallball
