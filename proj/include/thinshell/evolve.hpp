#pragma once

#include <memory>

#include "thinshell/geometry.hpp"
#include "thinshell/operators.hpp"
#include "thinshell/thin_layer.hpp"

namespace thinshell {

enum class ModelKind { Classical, Quantum };

struct PhysicsParams {
    double hbar = 1.0;
    double mass = 1.0;
    double diffusion = 1.0; // classical diffusion constant D
    double eps = 0.0;       // shell thickness
    int level = 1;          // transverse level N (quantum)
};

// Discrete effective 2D generator on a curved shell of thickness eps.
//
// Classical (density phi):
//   dphi/dt = div( C^{ij} d_j phi ) + div( b^i phi )
//   C = D g^{ij} + Dt (3 kappa^{im} kappa_m^j - 2 kappa kappa^{ij}),  Dt = eps^2 D / 12
//   b = -(Dt/2) g^{ij} d_j R
//
// Quantum (amplitude psi):
//   H psi = -(hbar^2/2m) [ div( (g^{ij} + et2 * 3 kappa^{ik} kappa_k^j) d_j psi )
//                          + (V0 + et2 V2) psi ] + V psi
//   et2 = eps^2 <N|xi^2|N>
//
// Both generators are assembled from the shared flux-form stencils, so the
// classical one telescopes exactly on periodic grids and the quantum one is
// symmetric under the sqrtg-weighted inner product.
class EffectiveModel {
public:
    ModelKind kind = ModelKind::Classical;
    std::shared_ptr<const GeometryFields> geo;
    PhysicsParams params;

    double dtilde = 0.0;       // classical geometric diffusivity
    double eps_tilde_sq = 0.0; // quantum effective thickness^2

    RealField c11, c12, c22; // flux tensor
    VectorField drift;       // classical drift b^i (zero for quantum)
    RealField diag;          // quantum diagonal: -(hbar^2/2m)(V0 + et2 V2) + V
    RealField grad_r1, grad_r2; // d_j R, raised (for the classical flux report)

    // Time-derivative generator: L phi (classical).
    RealField apply_generator(const RealField& phi) const;
    // H psi (quantum).
    ComplexField apply_hamiltonian(const ComplexField& psi) const;
    // -(i/hbar) H psi.
    ComplexField apply_generator(const ComplexField& psi) const;

    // Largest stable explicit RK4 step for the classical generator.
    double cfl_dt_max() const;
};

// potential may be empty (V = 0) or one value per node.
EffectiveModel build_model(std::shared_ptr<const GeometryFields> geo,
                           const CurvaturePotentials& pot, ModelKind kind,
                           const PhysicsParams& params, const RealField& potential = {});

struct RealState {
    double t = 0.0;
    RealField phi;
};

struct ComplexState {
    double t = 0.0;
    ComplexField psi;
};

struct StepControls {
    bool implicit = false;     // classical: implicit Euler instead of RK4
    double solver_tol = 1e-14; // relative residual for the linear solves
    int max_iterations = 2000;
};

// Classical: explicit RK4 (throws CflError past the stability bound) or
// implicit Euler.  Quantum: one-step implicit midpoint, unitary in the
// weighted norm up to the solve tolerance; throws SolverError on
// non-convergence.
RealState step(const EffectiveModel& model, const RealState& state, double dt,
               const StepControls& controls = {});
ComplexState step(const EffectiveModel& model, const ComplexState& state, double dt,
                  const StepControls& controls = {});

// Contravariant transport flux and its curvature-induced correction.
//
// Classical: J^i = -D g^{ij} d_j phi
//            J_G^i = -Dt [ (3 kappa^{im} kappa_m^j - 2 kappa kappa^{ij}) d_j phi
//                          - (1/2) g^{ij} (d_j R) phi ]
// Quantum:   J^i = (hbar/m) g^{ij} Im(psi* d_j psi)
//            J_G^i = (3 hbar et2 / m) kappa^{ik} kappa^j_k Im(psi* d_j psi)
struct FluxPair {
    VectorField flow;
    VectorField geometric;
};

FluxPair fluxes(const EffectiveModel& model, const RealState& state);
FluxPair fluxes(const EffectiveModel& model, const ComplexState& state);

// Pointwise residual of d_t rho + div(J + J_G), with rho = phi (classical) or
// |psi|^2 (quantum).  The instantaneous form takes d_t rho from the
// generator; the three-state form uses a central time difference.
struct ContinuityResidual {
    RealField field;
    double max_norm = 0.0;
    double l2_weighted = 0.0;
};

ContinuityResidual continuity_residual(const EffectiveModel& model, const RealState& state,
                                       bool include_geometric = true);
ContinuityResidual continuity_residual(const EffectiveModel& model,
                                       const ComplexState& state,
                                       bool include_geometric = true);
ContinuityResidual continuity_residual(const EffectiveModel& model, const RealState& prev,
                                       const RealState& mid, const RealState& next,
                                       bool include_geometric = true);
ContinuityResidual continuity_residual(const EffectiveModel& model,
                                       const ComplexState& prev, const ComplexState& mid,
                                       const ComplexState& next,
                                       bool include_geometric = true);

double total_charge(const GeometryFields& geo, const RealState& state);
double total_charge(const GeometryFields& geo, const ComplexState& state);

// Scales psi so the weighted density integrates to 1.
void normalize(const GeometryFields& geo, ComplexState& state);

} // namespace thinshell
