#include "thinshell/thin_layer.hpp"

#include <cmath>
#include <ostream>

#include "thinshell/csv.hpp"

namespace thinshell {

OffsetMetric metric_at_offset(const GeometryFields& geo, double q0,
                              double shell_thickness) {
    if (shell_thickness > 0.0) {
        if (std::abs(q0) > 0.5 * shell_thickness + 1e-15)
            throw ChartError("metric_at_offset: |q0| exceeds half the shell thickness");
        if (shell_thickness * geo.max_abs_principal_curvature >= 1.0)
            throw ChartError("metric_at_offset: shell self-intersects (eps*kappa >= 1)");
    }

    const std::size_t n = geo.grid.size();
    OffsetMetric m;
    m.q0 = q0;
    for (RealField* f : {&m.g11, &m.g12, &m.g22, &m.det_exact, &m.sqrt_exact,
                         &m.det_trunc, &m.inv11, &m.inv12, &m.inv22})
        f->resize(n);

    for (std::size_t p = 0; p < n; ++p) {
        // kappa_ik kappa^k_j (covariant)
        const double t11 = geo.k11[p] * geo.km11[p] + geo.k12[p] * geo.km21[p];
        const double t12 = geo.k11[p] * geo.km12[p] + geo.k12[p] * geo.km22[p];
        const double t22 = geo.k12[p] * geo.km12[p] + geo.k22[p] * geo.km22[p];
        m.g11[p] = geo.g11[p] + 2.0 * q0 * geo.k11[p] + q0 * q0 * t11;
        m.g12[p] = geo.g12[p] + 2.0 * q0 * geo.k12[p] + q0 * q0 * t12;
        m.g22[p] = geo.g22[p] + 2.0 * q0 * geo.k22[p] + q0 * q0 * t22;

        const double g = geo.sqrtg[p] * geo.sqrtg[p];
        const double kap = geo.kmean[p], R = geo.rgauss[p];
        // det(1 + q0 * shape) = 1 + kappa q0 + (R/2) q0^2, exactly.
        const double c = 1.0 + kap * q0 + 0.5 * R * q0 * q0;
        if (!(c > 0.0))
            throw ChartError("metric_at_offset: offset surface degenerates (1 + q0*kappa <= 0)");
        m.det_exact[p] = g * c * c;
        m.sqrt_exact[p] = geo.sqrtg[p] * c;
        m.det_trunc[p] = g * (1.0 + 2.0 * kap * q0 + (kap * kap + R) * q0 * q0);

        m.inv11[p] = geo.gi11[p] - 2.0 * geo.ku11[p] * q0 +
                     1.5 * (2.0 * kap * geo.ku11[p] - R * geo.gi11[p]) * q0 * q0;
        m.inv12[p] = geo.gi12[p] - 2.0 * geo.ku12[p] * q0 +
                     1.5 * (2.0 * kap * geo.ku12[p] - R * geo.gi12[p]) * q0 * q0;
        m.inv22[p] = geo.gi22[p] - 2.0 * geo.ku22[p] * q0 +
                     1.5 * (2.0 * kap * geo.ku22[p] - R * geo.gi22[p]) * q0 * q0;
    }
    return m;
}

CurvaturePotentials curvature_potentials(const GeometryFields& geo) {
    const std::size_t n = geo.grid.size();
    CurvaturePotentials pot;
    for (RealField* f : {&pot.v0, &pot.v1, &pot.v2, &pot.a1_11, &pot.a1_12, &pot.a1_22,
                         &pot.a2_11, &pot.a2_12, &pot.a2_22})
        f->resize(n);

    // Derivative ingredients.  Curvature fields are smooth chart fields, so
    // the edge rule is one-sided, not Dirichlet.
    const VectorField grad_k = smooth_gradient(geo.grid, geo.kmean);
    const VectorField grad_r = smooth_gradient(geo.grid, geo.rgauss);
    const RealField lap_k = smooth_divergence(geo, raise_index(geo, grad_k));
    const RealField lap_r = smooth_divergence(geo, raise_index(geo, grad_r));

    VectorField kflux{RealField(n), RealField(n)};
    for (std::size_t p = 0; p < n; ++p) {
        kflux.c1[p] = geo.ku11[p] * grad_k.c1[p] + geo.ku12[p] * grad_k.c2[p];
        kflux.c2[p] = geo.ku12[p] * grad_k.c1[p] + geo.ku22[p] * grad_k.c2[p];
    }
    const RealField div_kflux = smooth_divergence(geo, kflux);

    for (std::size_t p = 0; p < n; ++p) {
        const double kap = geo.kmean[p], R = geo.rgauss[p];
        pot.v0[p] = 0.25 * (kap * kap - 2.0 * R);
        pot.v1[p] = kap * (R - 0.5 * kap * kap) - 0.5 * lap_k[p];
        const double grad_k_sq = geo.gi11[p] * grad_k.c1[p] * grad_k.c1[p] +
                                 2.0 * geo.gi12[p] * grad_k.c1[p] * grad_k.c2[p] +
                                 geo.gi22[p] * grad_k.c2[p] * grad_k.c2[p];
        pot.v2[p] = 0.75 * kap * kap * kap * kap - 1.75 * kap * kap * R + 0.5 * R * R +
                    0.5 * kap * lap_k[p] + 0.25 * grad_k_sq + div_kflux[p] -
                    0.25 * lap_r[p];

        pot.a1_11[p] = -2.0 * geo.ku11[p];
        pot.a1_12[p] = -2.0 * geo.ku12[p];
        pot.a1_22[p] = -2.0 * geo.ku22[p];
        // 3 kappa^{ik} kappa_k^j with kappa_k^j = kappa^j_k
        pot.a2_11[p] = 3.0 * (geo.ku11[p] * geo.km11[p] + geo.ku12[p] * geo.km12[p]);
        pot.a2_12[p] = 3.0 * (geo.ku11[p] * geo.km21[p] + geo.ku12[p] * geo.km22[p]);
        pot.a2_22[p] = 3.0 * (geo.ku12[p] * geo.km21[p] + geo.ku22[p] * geo.km22[p]);
    }
    return pot;
}

namespace {

// Per-node chart algebra shared by both sides of the expansion check.
struct NodeGeometry {
    double gi11, gi12, gi22;
    double gamma111, gamma112, gamma122, gamma211, gamma212, gamma222;
    double ku11, ku12, ku22;    // kappa^{ij}
    double t2_11, t2_12, t2_22; // kappa^{ik} kappa_k^j
    double kmean, rgauss;
};

NodeGeometry node_geometry(const SurfaceChart& chart, double u, double v) {
    const Vec3 b1 = chart.d1(u, v), b2 = chart.d2(u, v);
    const Vec3 x11 = chart.d11(u, v), x12 = chart.d12(u, v), x22 = chart.d22(u, v);
    const Vec3 nv = chart.normal(u, v);
    const double g11 = b1.dot(b1), g12 = b1.dot(b2), g22 = b2.dot(b2);
    const double det = g11 * g22 - g12 * g12;
    NodeGeometry ng;
    ng.gi11 = g22 / det;
    ng.gi12 = -g12 / det;
    ng.gi22 = g11 / det;
    const double t111 = b1.dot(x11), t211 = b2.dot(x11);
    const double t112 = b1.dot(x12), t212 = b2.dot(x12);
    const double t122 = b1.dot(x22), t222 = b2.dot(x22);
    ng.gamma111 = ng.gi11 * t111 + ng.gi12 * t211;
    ng.gamma112 = ng.gi11 * t112 + ng.gi12 * t212;
    ng.gamma122 = ng.gi11 * t122 + ng.gi12 * t222;
    ng.gamma211 = ng.gi12 * t111 + ng.gi22 * t211;
    ng.gamma212 = ng.gi12 * t112 + ng.gi22 * t212;
    ng.gamma222 = ng.gi12 * t122 + ng.gi22 * t222;
    const double k11 = -nv.dot(x11), k12 = -nv.dot(x12), k22 = -nv.dot(x22);
    const double km11 = ng.gi11 * k11 + ng.gi12 * k12;
    const double km12 = ng.gi11 * k12 + ng.gi12 * k22;
    const double km21 = ng.gi12 * k11 + ng.gi22 * k12;
    const double km22 = ng.gi12 * k12 + ng.gi22 * k22;
    ng.ku11 = km11 * ng.gi11 + km12 * ng.gi12;
    ng.ku12 = km11 * ng.gi12 + km12 * ng.gi22;
    ng.ku22 = km21 * ng.gi12 + km22 * ng.gi22;
    ng.t2_11 = ng.ku11 * km11 + ng.ku12 * km12;
    ng.t2_12 = ng.ku11 * km21 + ng.ku12 * km22;
    ng.t2_22 = ng.ku12 * km21 + ng.ku22 * km22;
    ng.kmean = km11 + km22;
    ng.rgauss = 2.0 * (km11 * km22 - km12 * km21);
    return ng;
}

// Second-order covariant contraction c^{ij} (d_i d_j - Gamma^k_{ij} d_k) f.
double contract2(const NodeGeometry& ng, double c11, double c12, double c22, double f1,
                 double f2, double f11, double f12, double f22) {
    const double h11 = f11 - ng.gamma111 * f1 - ng.gamma211 * f2;
    const double h12 = f12 - ng.gamma112 * f1 - ng.gamma212 * f2;
    const double h22 = f22 - ng.gamma122 * f1 - ng.gamma222 * f2;
    return c11 * h11 + 2.0 * c12 * h12 + c22 * h22;
}

} // namespace

double verify_laplacian_expansion(const SurfaceChart& chart, const Grid2D& grid,
                                  const ShellFunction& f, double q0) {
    if (!chart.constant_curvature())
        throw ChartError("verify_laplacian_expansion: requires a chart with covariantly "
                         "constant shape operator (plane, cylinder, sphere)");

    double worst = 0.0;
    for (int i = 0; i < grid.n1; ++i) {
        for (int j = 0; j < grid.n2; ++j) {
            const double u = grid.q1(i), v = grid.q2(j);
            const NodeGeometry ng = node_geometry(chart, u, v);
            const double kap = ng.kmean, R = ng.rgauss;

            const double fv = f.value(q0, u, v);
            const double f0 = f.d0(q0, u, v), f00 = f.d00(q0, u, v);
            const double f1 = f.d1(q0, u, v), f2 = f.d2(q0, u, v);
            const double f11 = f.d11(q0, u, v), f12 = f.d12(q0, u, v),
                         f22 = f.d22(q0, u, v);

            // Truncated expansion side.
            const double lap2 = contract2(ng, ng.gi11, ng.gi12, ng.gi22, f1, f2, f11, f12, f22);
            const double v0 = 0.25 * (kap * kap - 2.0 * R);
            const double v1 = kap * (R - 0.5 * kap * kap);
            const double v2 =
                0.75 * kap * kap * kap * kap - 1.75 * kap * kap * R + 0.5 * R * R;
            const double a1f =
                -2.0 * contract2(ng, ng.ku11, ng.ku12, ng.ku22, f1, f2, f11, f12, f22);
            const double a2f =
                3.0 * contract2(ng, ng.t2_11, ng.t2_12, ng.t2_22, f1, f2, f11, f12, f22);
            const double lhs = lap2 + f00 + (v0 + q0 * v1 + q0 * q0 * v2) * fv +
                               q0 * a1f + q0 * q0 * a2f;

            // Exactly conjugated shell Laplacian, from the closed-form offset
            // metric.  c = det(1 + q0*shape), w = (G/g)^{1/4} = sqrt(c).
            const double c = 1.0 + kap * q0 + 0.5 * R * q0 * q0;
            const double cp = kap + R * q0;
            const double cpp = R;
            const double w = std::sqrt(c);
            const double wp = 0.5 * cp / w;
            const double wpp = 0.5 * cpp / w - 0.25 * cp * cp / (c * w);

            const double u0 = f0 / w - fv * wp / (w * w);
            const double u00 = f00 / w - 2.0 * f0 * wp / (w * w) - fv * wpp / (w * w) +
                               2.0 * fv * wp * wp / (w * w * w);
            const double u1 = f1 / w, u2 = f2 / w;
            const double u11 = f11 / w, u12 = f12 / w, u22 = f22 / w;

            double surf = 0.0;
            switch (chart.kind()) {
            case ChartKind::Plane:
                surf = u11 + u22;
                break;
            case ChartKind::Cylinder: {
                // Arclength chart: G^ss = 1/(1 + q0 kappa)^2, G^zz = 1, and all
                // coefficients are spatially constant.
                const double e = 1.0 / ((1.0 + q0 * kap) * (1.0 + q0 * kap));
                surf = e * u11 + u22;
                break;
            }
            case ChartKind::Sphere: {
                // G^ij = g^ij / (1 + q0/a)^2 with the common conformal factor
                // constant over the chart.
                const double e = 1.0 / (c); // (1 + q0/a)^2 = c for kappa = 2/a, R = 2/a^2
                surf = e * contract2(ng, ng.gi11, ng.gi12, ng.gi22, u1, u2, u11, u12, u22);
                break;
            }
            default:
                throw ChartError("verify_laplacian_expansion: unsupported chart kind");
            }

            const double rhs = w * (u00 + (cp / c) * u0 + surf);
            worst = std::max(worst, std::abs(lhs - rhs));
        }
    }
    return worst;
}

void write_potentials_csv(const GeometryFields& geo, const CurvaturePotentials& pot,
                          std::ostream& os) {
    os << "i,j,V0,V1,V2,a2_11,a2_12,a2_22\n";
    for (int i = 0; i < geo.grid.n1; ++i) {
        for (int j = 0; j < geo.grid.n2; ++j) {
            const std::size_t p = geo.grid.idx(i, j);
            os << i << ',' << j << ',' << csv_num(pot.v0[p]) << ',' << csv_num(pot.v1[p])
               << ',' << csv_num(pot.v2[p]) << ',' << csv_num(pot.a2_11[p]) << ','
               << csv_num(pot.a2_12[p]) << ',' << csv_num(pot.a2_22[p]) << '\n';
        }
    }
}

} // namespace thinshell
