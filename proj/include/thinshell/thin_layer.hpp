#pragma once

#include <functional>

#include "thinshell/geometry.hpp"
#include "thinshell/operators.hpp"

namespace thinshell {

// Shell metric at normal offset q0 from the surface.
//
// The exact in-shell metric is
//   G_ij = g_ij + 2 q0 kappa_ij + q0^2 kappa_im kappa^m_j
// with exact determinant g * det(1 + q0 * shape)^2.  The truncated fields
// keep terms through q0^2:
//   det G  ~ g (1 + 2 kappa q0 + (kappa^2 + R) q0^2)
//   G^ij   ~ g^ij - 2 kappa^ij q0 + (3/2)(2 kappa kappa^ij - R g^ij) q0^2
struct OffsetMetric {
    double q0 = 0.0;
    RealField g11, g12, g22;          // exact G_ij
    RealField det_exact, sqrt_exact;  // closed-form determinant and its root
    RealField det_trunc;
    RealField inv11, inv12, inv22;    // truncated G^ij
};

// Throws ChartError when |q0| exceeds half the shell thickness or the shell
// self-intersects (eps * max|kappa| >= 1).  shell_thickness <= 0 skips the
// half-width check (pure offset evaluation).
OffsetMetric metric_at_offset(const GeometryFields& geo, double q0,
                              double shell_thickness = 0.0);

// Curvature-induced potentials and anisotropy tensors of the conformally
// rescaled shell Laplacian, through second order in the offset:
//   V0 = (1/4)(kappa^2 - 2R)
//   V1 = kappa (R - kappa^2/2) - (1/2) Lap kappa
//   V2 = (3/4)kappa^4 - (7/4)kappa^2 R + (1/2)R^2 + (1/2)kappa Lap kappa
//        + (1/4) |grad kappa|^2 + div(kappa^{ij} d_j kappa) - (1/4) Lap R
//   A1 = div(a1^{ij} d_j .) with a1^{ij} = -2 kappa^{ij}
//   A2 = div(a2^{ij} d_j .) with a2^{ij} = 3 kappa^{ik} kappa_k^j
//
// The braced term in V2 is read as a scalar field (the divergence of
// kappa^{ij} d_j kappa), not as an operator; operators are segregated into
// A1 and A2.  The expansion-verification oracle below adjudicates that
// reading.
struct CurvaturePotentials {
    RealField v0, v1, v2;
    RealField a1_11, a1_12, a1_22;
    RealField a2_11, a2_12, a2_22;
};

CurvaturePotentials curvature_potentials(const GeometryFields& geo);

// The offset-linear and offset-quadratic operators, realized in the same
// conservative divergence form as the rest of the stencil family, so their
// sqrtg-weighted grid integral over a periodic grid vanishes identically.
template <class T>
std::vector<T> apply_a1(const GeometryFields& geo, const CurvaturePotentials& pot,
                        const std::vector<T>& f) {
    return divergence_form_apply(geo, pot.a1_11, pot.a1_12, pot.a1_22, f);
}

template <class T>
std::vector<T> apply_a2(const GeometryFields& geo, const CurvaturePotentials& pot,
                        const std::vector<T>& f) {
    return divergence_form_apply(geo, pot.a2_11, pot.a2_12, pot.a2_22, f);
}

// Smooth test function on the shell, with analytic partial derivatives.
// Arguments are (q0, q1, q2).
struct ShellFunction {
    std::function<double(double, double, double)> value;
    std::function<double(double, double, double)> d0, d00;
    std::function<double(double, double, double)> d1, d2;
    std::function<double(double, double, double)> d11, d12, d22;
};

// Compares the truncated operator
//   Lap2 + d00 + V0 + q0 V1 + q0^2 V2 + q0 A1 + q0^2 A2
// against the exactly conjugated shell Laplacian evaluated from the
// closed-form offset metric, applied to f on the q0 slice.  Returns the
// max-norm of the difference over the grid nodes; contract: O(q0^3).
//
// Both sides are evaluated from analytic derivatives, so the residual is
// pure truncation error.  Requires a chart with covariantly constant shape
// operator (plane, cylinder, sphere); throws ChartError otherwise.
double verify_laplacian_expansion(const SurfaceChart& chart, const Grid2D& grid,
                                  const ShellFunction& f, double q0);

// CSV export: i,j,V0,V1,V2,a2_11,a2_12,a2_22
void write_potentials_csv(const GeometryFields& geo, const CurvaturePotentials& pot,
                          std::ostream& os);

} // namespace thinshell
