#pragma once

#include <vector>

#include "thinshell/errors.hpp"

namespace thinshell {

// Bent-ribbon toy model: a cylindrical shell of bend radius R and thickness
// eps, 0 < z < L, R - eps/2 < r < R + eps/2.  The 3D problem separates in
// cylindrical coordinates, which makes it an exact, independent check of the
// effective 2D theory: the angular transport flux picks up the radial weight
//   <(R/r)^2> = int (R/r)^2 |chi(r)|^2 dr
// whose expansion in eps/R is 1 + 3 et2/R^2 + O((eps/R)^4), and the exact
// annulus eigenvalue checks the eps^2 energy formula.
struct RibbonSpec {
    double bend_radius = 1.0; // R
    double thickness = 0.1;   // eps
    double z_extent = 1.0;    // L (bookkeeping only; z is uniform here)
    int level = 1;            // transverse level N
    int m_wave = 1;           // integer angular wavenumber of the surface wave
    double hbar = 1.0;
    double mass = 1.0;
};

void validate(const RibbonSpec& spec);

// Exact radial weight <(R/r)^2>, by 128-point Gauss-Legendre quadrature of
// the transverse mode density.  >= 1 for all eps < R.
double radial_weight_exact(const RibbonSpec& spec);

// Second-order expansion of the weight: 1 + 3 et2 / R^2.
double radial_weight_expansion(const RibbonSpec& spec);

// Total angular flux through the shell for a given flat-surface current
// (hbar/m) Im(phi* d_s phi): exact radial quadrature vs the expansion.  The
// expansion value is, by construction, the same curvature factor the
// effective model's J^s + J_G^s carries on the cylinder chart.
double ribbon_flux_exact(const RibbonSpec& spec, double surface_current);
double ribbon_flux_expansion(const RibbonSpec& spec, double surface_current);

// Axial flux: the radial density integrates to one, so the current passes
// through unchanged; the straight direction has no geometric flow.
double ribbon_flux_z(const RibbonSpec& spec, double surface_current_z);

// Exact annulus eigenvalue for the N-th radial level in the m_wave sector
// (k_z = 0): the radial problem -(hbar^2/2m)[u'' + u'/r - m^2 u / r^2] = E u,
// u(R +- eps/2) = 0, transformed to the symmetric form v = sqrt(r) u and
// solved in a hard-wall mode basis so the dominant transverse energy enters
// exactly and only the O(1) potential shift is computed numerically.
//
// annulus_eigen_oracle uses the continuum basis (quadrature matrix elements);
// annulus_eigen_fd diagonalizes the dense finite-difference matrix at
// base_nodes, 2*base_nodes and 4*base_nodes radial intervals in the discrete
// box basis and Richardson-extrapolates.  Both deliver far better than
// 1e-9 relative error; they serve as cross-checks of each other.
double annulus_eigen_oracle(const RibbonSpec& spec, int basis_size = 32);
double annulus_eigen_fd(const RibbonSpec& spec, int base_nodes = 4000);

// Interior sign changes of the N-th radial eigenfunction (Sturm count: N-1).
int annulus_eigenfunction_nodes(const RibbonSpec& spec, int samples = 4001);

// Surface eigenvalue and quadratic-operator matrix element of the angular
// plane wave exp(i m s / R) on the cylinder surface.
double ribbon_lambda_n(const RibbonSpec& spec);
double ribbon_gnn(const RibbonSpec& spec);

// Perturbative three-term energy for the same sector.
double ribbon_energy_perturbative(const RibbonSpec& spec);

struct RibbonReportRow {
    double eps = 0.0;
    double weight_exact = 0.0;
    double weight_expansion = 0.0;
    double weight_err = 0.0; // |exact/expansion - 1|
    double e_exact = 0.0;
    double e_pert = 0.0;
    double e_resid = 0.0;     // |e_exact - e_pert|
    double resid_ratio = 0.0; // previous residual / this residual (0 on first row)
};

// Sweeps the thickness over eps_values (descending) and reports weights and
// energy residuals.  Throws SolverError if the residual fails to decrease
// monotonically, which flags a transcription bug in the assembled formulas.
std::vector<RibbonReportRow> eigen_perturbation_check(const RibbonSpec& base,
                                                      const std::vector<double>& eps_values);

} // namespace thinshell
