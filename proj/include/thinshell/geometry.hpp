#pragma once

#include <iosfwd>
#include <vector>

#include "thinshell/chart.hpp"
#include "thinshell/grid.hpp"
#include "thinshell/vec3.hpp"

namespace thinshell {

// Per-node differential geometry of a chart sampled on a structured grid.
// Everything is evaluated from the analytic derivatives of the embedding, so
// the geometric inputs to the solvers carry no discretization error.
//
// Index conventions: k11/k12/k22 is the (covariant) second fundamental form,
// km## the mixed form kappa^i_j, ku## fully raised.  gamma<k><ij> stores the
// Christoffel symbol Gamma^k_{ij}.
struct GeometryFields {
    Grid2D grid;

    std::vector<Vec3> b1, b2, nrm;
    RealField g11, g12, g22;     // metric
    RealField gi11, gi12, gi22;  // inverse metric
    RealField sqrtg;
    RealField gamma111, gamma112, gamma122;
    RealField gamma211, gamma212, gamma222;
    RealField k11, k12, k22;
    RealField km11, km12, km21, km22;
    RealField ku11, ku12, ku22;
    RealField kmean;   // g^{ij} kappa_{ij}
    RealField rgauss;  // 2 det(kappa^i_j)

    double max_abs_principal_curvature = 0.0;
};

// Populates all fields; throws GridError on a degenerate metric.
GeometryFields compute_geometry(const SurfaceChart& chart, const Grid2D& grid);

// Max-norm residual of the 2D curvature identity
//   (1/2) R g^{ij} = kappa kappa^{ij} - kappa^i_m kappa^{mj}
// over all nodes and components.
double curvature_identity_residual(const GeometryFields& geo);

// Max-norm residual of (kappa^{-1})^{ik} kappa_{kj} = delta^i_j with the
// inverse built as (2/R)(kappa g^{ij} - kappa^{ij}), skipping nodes where
// |R| <= tol.
double inverse_curvature_residual(const GeometryFields& geo, double tol = 1e-8);

// Max-norm of g^{ik} g_{kj} - delta^i_j.
double metric_inverse_residual(const GeometryFields& geo);

// CSV export, one row per node:
// i,j,q1,q2,g11,g12,g22,sqrtg,k11,k12,k22,kmean,Rgauss
void write_geometry_csv(const GeometryFields& geo, std::ostream& os);

} // namespace thinshell
