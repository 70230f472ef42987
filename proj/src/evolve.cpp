#include "thinshell/evolve.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "thinshell/transverse.hpp"

namespace thinshell {

namespace {

using Complex = std::complex<double>;

RealField density_of(const ComplexField& psi) {
    RealField rho(psi.size());
    for (std::size_t p = 0; p < psi.size(); ++p)
        rho[p] = std::norm(psi[p]);
    return rho;
}

ContinuityResidual finish_residual(const GeometryFields& geo, RealField r) {
    ContinuityResidual out;
    out.max_norm = 0.0;
    double acc = 0.0;
    for (std::size_t p = 0; p < r.size(); ++p) {
        out.max_norm = std::max(out.max_norm, std::abs(r[p]));
        acc += geo.sqrtg[p] * r[p] * r[p];
    }
    out.l2_weighted = std::sqrt(acc * geo.grid.h1 * geo.grid.h2);
    out.field = std::move(r);
    return out;
}

} // namespace

RealField EffectiveModel::apply_generator(const RealField& phi) const {
    RealField out = divergence_form_apply(*geo, c11, c12, c22, phi);
    // drift part div(b^i phi)
    RealField w1(phi.size()), w2(phi.size());
    for (std::size_t p = 0; p < phi.size(); ++p) {
        w1[p] = drift.c1[p] * phi[p];
        w2[p] = drift.c2[p] * phi[p];
    }
    const RealField dv = covariant_divergence_t(*geo, w1, w2);
    for (std::size_t p = 0; p < phi.size(); ++p)
        out[p] += dv[p];
    return out;
}

ComplexField EffectiveModel::apply_hamiltonian(const ComplexField& psi) const {
    const double kin = -0.5 * params.hbar * params.hbar / params.mass;
    ComplexField out = divergence_form_apply(*geo, c11, c12, c22, psi);
    for (std::size_t p = 0; p < psi.size(); ++p)
        out[p] = kin * out[p] + diag[p] * psi[p];
    return out;
}

ComplexField EffectiveModel::apply_generator(const ComplexField& psi) const {
    ComplexField out = apply_hamiltonian(psi);
    const Complex factor(0.0, -1.0 / params.hbar);
    for (auto& v : out)
        v *= factor;
    return out;
}

double EffectiveModel::cfl_dt_max() const {
    const Grid2D& g = geo->grid;
    double s = 0.0;
    for (std::size_t p = 0; p < g.size(); ++p) {
        const double diffusive = std::abs(c11[p]) / (g.h1 * g.h1) +
                                 2.0 * std::abs(c12[p]) / (g.h1 * g.h2) +
                                 std::abs(c22[p]) / (g.h2 * g.h2);
        const double advective =
            std::abs(drift.c1[p]) / g.h1 + std::abs(drift.c2[p]) / g.h2;
        s = std::max(s, diffusive + advective);
    }
    return s > 0.0 ? 2.5 / s : std::numeric_limits<double>::infinity();
}

EffectiveModel build_model(std::shared_ptr<const GeometryFields> geo,
                           const CurvaturePotentials& pot, ModelKind kind,
                           const PhysicsParams& params, const RealField& potential) {
    const std::size_t n = geo->grid.size();
    if (pot.v0.size() != n)
        throw GridError("build_model: potentials computed on a different grid");
    if (!potential.empty() && potential.size() != n)
        throw GridError("build_model: external potential has wrong size");
    if (params.eps > 0.0 && params.eps * geo->max_abs_principal_curvature >= 1.0)
        throw ChartError("build_model: shell self-intersects (eps*kappa >= 1)");

    EffectiveModel m;
    m.kind = kind;
    m.geo = std::move(geo);
    m.params = params;
    m.c11.resize(n);
    m.c12.resize(n);
    m.c22.resize(n);
    m.drift.c1.assign(n, 0.0);
    m.drift.c2.assign(n, 0.0);
    m.diag.assign(n, 0.0);

    const GeometryFields& G = *m.geo;
    const VectorField grad_r_cov = smooth_gradient(G.grid, G.rgauss);
    const VectorField grad_r = raise_index(G, grad_r_cov);
    m.grad_r1 = grad_r.c1;
    m.grad_r2 = grad_r.c2;

    if (kind == ModelKind::Classical) {
        m.dtilde = params.eps * params.eps * params.diffusion / 12.0;
        for (std::size_t p = 0; p < n; ++p) {
            // A^{ij} = 3 kappa^{im} kappa_m^j - 2 kappa kappa^{ij}
            const double t11 = G.ku11[p] * G.km11[p] + G.ku12[p] * G.km12[p];
            const double t12 = G.ku11[p] * G.km21[p] + G.ku12[p] * G.km22[p];
            const double t22 = G.ku12[p] * G.km21[p] + G.ku22[p] * G.km22[p];
            const double a11 = 3.0 * t11 - 2.0 * G.kmean[p] * G.ku11[p];
            const double a12 = 3.0 * t12 - 2.0 * G.kmean[p] * G.ku12[p];
            const double a22 = 3.0 * t22 - 2.0 * G.kmean[p] * G.ku22[p];
            m.c11[p] = params.diffusion * G.gi11[p] + m.dtilde * a11;
            m.c12[p] = params.diffusion * G.gi12[p] + m.dtilde * a12;
            m.c22[p] = params.diffusion * G.gi22[p] + m.dtilde * a22;
            m.drift.c1[p] = -0.5 * m.dtilde * grad_r.c1[p];
            m.drift.c2[p] = -0.5 * m.dtilde * grad_r.c2[p];
        }
    } else {
        m.eps_tilde_sq = epsilon_tilde_sq(params.eps, params.level);
        const double kin = -0.5 * params.hbar * params.hbar / params.mass;
        for (std::size_t p = 0; p < n; ++p) {
            m.c11[p] = G.gi11[p] + m.eps_tilde_sq * pot.a2_11[p];
            m.c12[p] = G.gi12[p] + m.eps_tilde_sq * pot.a2_12[p];
            m.c22[p] = G.gi22[p] + m.eps_tilde_sq * pot.a2_22[p];
            m.diag[p] = kin * (pot.v0[p] + m.eps_tilde_sq * pot.v2[p]) +
                        (potential.empty() ? 0.0 : potential[p]);
        }
    }
    return m;
}

RealState step(const EffectiveModel& model, const RealState& state, double dt,
               const StepControls& controls) {
    if (model.kind != ModelKind::Classical)
        throw GridError("step: real state requires a classical model");
    if (!(dt > 0.0))
        throw std::invalid_argument("step: dt must be positive");
    const std::size_t n = state.phi.size();

    if (controls.implicit) {
        // Backward Euler: (I - dt L) phi_next = phi, by BiCGSTAB.  The
        // generator telescopes, so the total is conserved to solver accuracy.
        auto apply = [&](const RealField& x) {
            RealField lx = model.apply_generator(x);
            for (std::size_t p = 0; p < n; ++p)
                lx[p] = x[p] - dt * lx[p];
            return lx;
        };
        auto dot = [&](const RealField& a, const RealField& b) {
            double s = 0.0;
            for (std::size_t p = 0; p < n; ++p)
                s += a[p] * b[p];
            return s;
        };
        RealField x = state.phi;
        RealField r = apply(x);
        for (std::size_t p = 0; p < n; ++p)
            r[p] = state.phi[p] - r[p];
        RealField rhat = r, pvec = r, v(n, 0.0), svec(n), tvec(n);
        double rho_prev = dot(rhat, r);
        const double target =
            controls.solver_tol * std::max(std::sqrt(dot(state.phi, state.phi)), 1e-300);
        bool converged = std::sqrt(dot(r, r)) <= target;
        for (int it = 0; it < controls.max_iterations && !converged; ++it) {
            v = apply(pvec);
            const double alpha = rho_prev / dot(rhat, v);
            for (std::size_t p = 0; p < n; ++p)
                svec[p] = r[p] - alpha * v[p];
            tvec = apply(svec);
            const double omega = dot(tvec, svec) / dot(tvec, tvec);
            for (std::size_t p = 0; p < n; ++p) {
                x[p] += alpha * pvec[p] + omega * svec[p];
                r[p] = svec[p] - omega * tvec[p];
            }
            converged = std::sqrt(dot(r, r)) <= target;
            const double rho = dot(rhat, r);
            const double beta = (rho / rho_prev) * (alpha / omega);
            rho_prev = rho;
            for (std::size_t p = 0; p < n; ++p)
                pvec[p] = r[p] + beta * (pvec[p] - omega * v[p]);
        }
        if (!converged)
            throw SolverError("step: implicit Euler solve did not converge");
        return {state.t + dt, std::move(x)};
    }

    const double dt_max = model.cfl_dt_max();
    if (dt > dt_max)
        throw CflError("step: dt " + std::to_string(dt) + " exceeds RK4 stability bound " +
                       std::to_string(dt_max));

    const RealField k1 = model.apply_generator(state.phi);
    RealField tmp(n);
    for (std::size_t p = 0; p < n; ++p)
        tmp[p] = state.phi[p] + 0.5 * dt * k1[p];
    const RealField k2 = model.apply_generator(tmp);
    for (std::size_t p = 0; p < n; ++p)
        tmp[p] = state.phi[p] + 0.5 * dt * k2[p];
    const RealField k3 = model.apply_generator(tmp);
    for (std::size_t p = 0; p < n; ++p)
        tmp[p] = state.phi[p] + dt * k3[p];
    const RealField k4 = model.apply_generator(tmp);

    RealField next(n);
    for (std::size_t p = 0; p < n; ++p)
        next[p] = state.phi[p] + dt / 6.0 * (k1[p] + 2.0 * k2[p] + 2.0 * k3[p] + k4[p]);
    return {state.t + dt, std::move(next)};
}

ComplexState step(const EffectiveModel& model, const ComplexState& state, double dt,
                  const StepControls& controls) {
    if (model.kind != ModelKind::Quantum)
        throw GridError("step: complex state requires a quantum model");
    if (!(dt > 0.0))
        throw std::invalid_argument("step: dt must be positive");
    const GeometryFields& geo = *model.geo;
    const std::size_t n = state.psi.size();
    const double alpha = 0.5 * dt / model.params.hbar;

    // Implicit midpoint (I + i a H) psi_next = (I - i a H) psi, solved through
    // the normal equations: (I + a^2 H^2) psi_next = (I - 2 i a H - a^2 H^2) psi.
    // H is self-adjoint in the weighted inner product, so the left operator is
    // Hermitian positive definite there and plain CG applies.
    const ComplexField hpsi = model.apply_hamiltonian(state.psi);
    const ComplexField hhpsi = model.apply_hamiltonian(hpsi);
    ComplexField rhs(n);
    const Complex itwoa(0.0, 2.0 * alpha);
    for (std::size_t p = 0; p < n; ++p)
        rhs[p] = state.psi[p] - itwoa * hpsi[p] - alpha * alpha * hhpsi[p];

    auto apply = [&](const ComplexField& x) {
        ComplexField hx = model.apply_hamiltonian(x);
        ComplexField hhx = model.apply_hamiltonian(hx);
        for (std::size_t p = 0; p < n; ++p)
            hhx[p] = x[p] + alpha * alpha * hhx[p];
        return hhx;
    };

    ComplexField x = state.psi;
    ComplexField r = apply(x);
    for (std::size_t p = 0; p < n; ++p)
        r[p] = rhs[p] - r[p];
    ComplexField pvec = r;
    double rs = dot_weighted(geo, r, r).real();
    const double target =
        controls.solver_tol * std::sqrt(dot_weighted(geo, rhs, rhs).real());
    bool converged = std::sqrt(rs) <= target;
    for (int it = 0; it < controls.max_iterations && !converged; ++it) {
        const ComplexField ap = apply(pvec);
        const double pap = dot_weighted(geo, pvec, ap).real();
        const double step_len = rs / pap;
        for (std::size_t p = 0; p < n; ++p) {
            x[p] += step_len * pvec[p];
            r[p] -= step_len * ap[p];
        }
        const double rs_new = dot_weighted(geo, r, r).real();
        if (std::sqrt(rs_new) <= target) {
            converged = true;
            break;
        }
        const double beta = rs_new / rs;
        rs = rs_new;
        for (std::size_t p = 0; p < n; ++p)
            pvec[p] = r[p] + beta * pvec[p];
    }
    if (!converged)
        throw SolverError("step: midpoint solve did not converge");
    return {state.t + dt, std::move(x)};
}

FluxPair fluxes(const EffectiveModel& model, const RealState& state) {
    const GeometryFields& G = *model.geo;
    const std::size_t n = state.phi.size();
    auto [d1, d2] = gradient(G.grid, state.phi);
    FluxPair out{{RealField(n), RealField(n)}, {RealField(n), RealField(n)}};
    const double D = model.params.diffusion, Dt = model.dtilde;
    for (std::size_t p = 0; p < n; ++p) {
        const double up1 = G.gi11[p] * d1[p] + G.gi12[p] * d2[p];
        const double up2 = G.gi12[p] * d1[p] + G.gi22[p] * d2[p];
        out.flow.c1[p] = -D * up1;
        out.flow.c2[p] = -D * up2;
        const double t11 = G.ku11[p] * G.km11[p] + G.ku12[p] * G.km12[p];
        const double t12 = G.ku11[p] * G.km21[p] + G.ku12[p] * G.km22[p];
        const double t22 = G.ku12[p] * G.km21[p] + G.ku22[p] * G.km22[p];
        const double a11 = 3.0 * t11 - 2.0 * G.kmean[p] * G.ku11[p];
        const double a12 = 3.0 * t12 - 2.0 * G.kmean[p] * G.ku12[p];
        const double a22 = 3.0 * t22 - 2.0 * G.kmean[p] * G.ku22[p];
        out.geometric.c1[p] =
            -Dt * (a11 * d1[p] + a12 * d2[p] - 0.5 * model.grad_r1[p] * state.phi[p]);
        out.geometric.c2[p] =
            -Dt * (a12 * d1[p] + a22 * d2[p] - 0.5 * model.grad_r2[p] * state.phi[p]);
    }
    return out;
}

FluxPair fluxes(const EffectiveModel& model, const ComplexState& state) {
    const GeometryFields& G = *model.geo;
    const std::size_t n = state.psi.size();
    auto [d1, d2] = gradient(G.grid, state.psi);
    FluxPair out{{RealField(n), RealField(n)}, {RealField(n), RealField(n)}};
    const double hm = model.params.hbar / model.params.mass;
    const double et2 = model.eps_tilde_sq;
    for (std::size_t p = 0; p < n; ++p) {
        const double cur1 = std::imag(std::conj(state.psi[p]) * d1[p]);
        const double cur2 = std::imag(std::conj(state.psi[p]) * d2[p]);
        out.flow.c1[p] = hm * (G.gi11[p] * cur1 + G.gi12[p] * cur2);
        out.flow.c2[p] = hm * (G.gi12[p] * cur1 + G.gi22[p] * cur2);
        const double t11 = G.ku11[p] * G.km11[p] + G.ku12[p] * G.km12[p];
        const double t12 = G.ku11[p] * G.km21[p] + G.ku12[p] * G.km22[p];
        const double t22 = G.ku12[p] * G.km21[p] + G.ku22[p] * G.km22[p];
        out.geometric.c1[p] = 3.0 * hm * et2 * (t11 * cur1 + t12 * cur2);
        out.geometric.c2[p] = 3.0 * hm * et2 * (t12 * cur1 + t22 * cur2);
    }
    return out;
}

namespace {

RealField div_of_fluxes(const EffectiveModel& model, const FluxPair& fp,
                        bool include_geometric) {
    const std::size_t n = fp.flow.c1.size();
    VectorField total{RealField(n), RealField(n)};
    for (std::size_t p = 0; p < n; ++p) {
        total.c1[p] = fp.flow.c1[p] + (include_geometric ? fp.geometric.c1[p] : 0.0);
        total.c2[p] = fp.flow.c2[p] + (include_geometric ? fp.geometric.c2[p] : 0.0);
    }
    return covariant_divergence(*model.geo, total);
}

} // namespace

ContinuityResidual continuity_residual(const EffectiveModel& model, const RealState& state,
                                       bool include_geometric) {
    RealField r = div_of_fluxes(model, fluxes(model, state), include_geometric);
    const RealField dphi = model.apply_generator(state.phi);
    for (std::size_t p = 0; p < r.size(); ++p)
        r[p] += dphi[p];
    return finish_residual(*model.geo, std::move(r));
}

ContinuityResidual continuity_residual(const EffectiveModel& model,
                                       const ComplexState& state, bool include_geometric) {
    RealField r = div_of_fluxes(model, fluxes(model, state), include_geometric);
    const ComplexField hpsi = model.apply_hamiltonian(state.psi);
    const double two_over_hbar = 2.0 / model.params.hbar;
    for (std::size_t p = 0; p < r.size(); ++p)
        r[p] += two_over_hbar * std::imag(std::conj(state.psi[p]) * hpsi[p]);
    return finish_residual(*model.geo, std::move(r));
}

ContinuityResidual continuity_residual(const EffectiveModel& model, const RealState& prev,
                                       const RealState& mid, const RealState& next,
                                       bool include_geometric) {
    RealField r = div_of_fluxes(model, fluxes(model, mid), include_geometric);
    const double inv2dt = 1.0 / (next.t - prev.t);
    for (std::size_t p = 0; p < r.size(); ++p)
        r[p] += (next.phi[p] - prev.phi[p]) * inv2dt;
    return finish_residual(*model.geo, std::move(r));
}

ContinuityResidual continuity_residual(const EffectiveModel& model,
                                       const ComplexState& prev, const ComplexState& mid,
                                       const ComplexState& next, bool include_geometric) {
    RealField r = div_of_fluxes(model, fluxes(model, mid), include_geometric);
    const RealField rho_prev = density_of(prev.psi), rho_next = density_of(next.psi);
    const double inv2dt = 1.0 / (next.t - prev.t);
    for (std::size_t p = 0; p < r.size(); ++p)
        r[p] += (rho_next[p] - rho_prev[p]) * inv2dt;
    return finish_residual(*model.geo, std::move(r));
}

double total_charge(const GeometryFields& geo, const RealState& state) {
    return integral_weighted(geo, state.phi);
}

double total_charge(const GeometryFields& geo, const ComplexState& state) {
    return total_density(geo, state.psi);
}

void normalize(const GeometryFields& geo, ComplexState& state) {
    const double total = total_density(geo, state.psi);
    const double scale = 1.0 / std::sqrt(total);
    for (auto& v : state.psi)
        v *= scale;
}

} // namespace thinshell
