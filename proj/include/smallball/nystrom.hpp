#pragma once

#include <span>
#include <string>
#include <vector>

#include "smallball/process.hpp"
#include "smallball/spectrum.hpp"

namespace smallball {

struct NystromOptions {
    int k_max = 10;
    bool refine = true;        // Richardson-extrapolate eigenvalues in h^2
    bool want_vectors = true;
    bool parallel = true;
};

struct NystromResult {
    Spectrum spectrum;            // top k_max eigenvalues (refined if asked)
    std::vector<double> mu_raw;   // unextrapolated values at n_nodes
    std::vector<EigenPair> pairs; // present when want_vectors
    double min_eig_ratio = 0.0;   // smallest/largest eigenvalue of the matrix
};

/// Symmetrized Nystrom matrix W^{1/2} G W^{1/2} on the uniform
/// trapezoid grid with n_nodes subintervals (n_nodes + 1 points), stored
/// densely column-major. The trapezoid grid puts the |t-s| kink of the
/// catalog kernels exactly on nodes, so the eigenvalue error has a clean
/// even-power expansion in h that the refinement step exploits.
std::vector<double> assemble_nystrom_matrix(const Kernel& k, int n_nodes);
std::vector<double> assemble_nystrom_matrix_serial(const Kernel& k, int n_nodes);

/// Eigenvalues/eigenfunctions of the covariance integral equation by
/// Nystrom discretization. Demeaned kernels have their constant null
/// vector deflated exactly, so zero_modes reports 1 for them at any n.
/// Throws ResolutionError when n_nodes < 4 * k_max and KernelError when
/// the matrix fails the PSD tolerance.
NystromResult nystrom_spectrum(const Kernel& k, int n_nodes,
                               const NystromOptions& opt);
NystromResult nystrom_spectrum(const Kernel& k, int n_nodes, int k_max);

/// Natural Nystrom extension of an eigenpair to an arbitrary point:
/// u(t) = (1/mu) sum_j w_j k(t, s_j) u(s_j).
double nystrom_extend(const Kernel& k, const EigenPair& pair, double t);

/// Eigenfunction resampled on a uniform grid through the extension.
std::vector<double> nystrom_extend_grid(const Kernel& k, const EigenPair& pair,
                                        int grid_points);

struct FormCheck {
    std::string label;
    double value = 0.0;
    double scale = 1.0;
    double normalized = 0.0;
    bool pass = false;
};

struct Theorem1Report {
    double mu = 0.0;
    double lambda = 0.0;
    std::vector<FormCheck> forms;
    double interior_normalized = 0.0;
    bool interior_pass = false;
    bool passed = false;
};

struct Theorem1Options {
    int n_nodes = 2000;
    double form_tol = 1e-3;
    double interior_tol = 1e-3;
};

/// Checks that the k-th Nystrom eigenfunction of the demeaned kernel
/// satisfies the demeaned boundary value problem: interior ODE residual
/// plus every boundary form including (Lu')(0) - (Lu')(1). Requires a
/// demeaned spec whose base operator has no zero-order term; demeaned
/// OU/OUZero raise NotApplicableError.
Theorem1Report verify_theorem1(const ProcessSpec& spec, int k,
                               const Theorem1Options& opt = {});

} // namespace smallball
