#include "thinshell/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <ostream>

#include "thinshell/csv.hpp"
#include "thinshell/threads.hpp"

namespace thinshell {

GeometryFields compute_geometry(const SurfaceChart& chart, const Grid2D& grid) {
    if (std::abs(grid.q1min - chart.q1min()) > 1e-12 ||
        std::abs(grid.q2min - chart.q2min()) > 1e-12 ||
        grid.periodic1 != chart.periodic1() || grid.periodic2 != chart.periodic2())
        throw GridError("compute_geometry: grid does not match the chart domain");

    GeometryFields geo;
    geo.grid = grid;
    const std::size_t n = grid.size();
    geo.b1.resize(n);
    geo.b2.resize(n);
    geo.nrm.resize(n);
    for (RealField* f :
         {&geo.g11, &geo.g12, &geo.g22, &geo.gi11, &geo.gi12, &geo.gi22, &geo.sqrtg,
          &geo.gamma111, &geo.gamma112, &geo.gamma122, &geo.gamma211, &geo.gamma212,
          &geo.gamma222, &geo.k11, &geo.k12, &geo.k22, &geo.km11, &geo.km12, &geo.km21,
          &geo.km22, &geo.ku11, &geo.ku12, &geo.ku22, &geo.kmean, &geo.rgauss})
        f->resize(n);

    std::vector<double> max_kappa_per_chunk;
    bool degenerate = false;

    auto body = [&](std::size_t lo, std::size_t hi) {
        double local_max = 0.0;
        for (std::size_t p = lo; p < hi; ++p) {
            const int i = static_cast<int>(p) / grid.n2;
            const int j = static_cast<int>(p) % grid.n2;
            const double u = grid.q1(i), v = grid.q2(j);

            const Vec3 b1 = chart.d1(u, v);
            const Vec3 b2 = chart.d2(u, v);
            const Vec3 x11 = chart.d11(u, v);
            const Vec3 x12 = chart.d12(u, v);
            const Vec3 x22 = chart.d22(u, v);
            const Vec3 nv = chart.normal(u, v);

            const double g11 = b1.dot(b1), g12 = b1.dot(b2), g22 = b2.dot(b2);
            const double det = g11 * g22 - g12 * g12;
            if (!(det > 0.0)) {
                degenerate = true;
                return;
            }
            const double gi11 = g22 / det, gi12 = -g12 / det, gi22 = g11 / det;

            // Gauss equation: the tangential part of the second derivatives
            // gives Gamma, the normal part (with a minus sign) gives kappa.
            const double t111 = b1.dot(x11), t211 = b2.dot(x11);
            const double t112 = b1.dot(x12), t212 = b2.dot(x12);
            const double t122 = b1.dot(x22), t222 = b2.dot(x22);
            geo.gamma111[p] = gi11 * t111 + gi12 * t211;
            geo.gamma112[p] = gi11 * t112 + gi12 * t212;
            geo.gamma122[p] = gi11 * t122 + gi12 * t222;
            geo.gamma211[p] = gi12 * t111 + gi22 * t211;
            geo.gamma212[p] = gi12 * t112 + gi22 * t212;
            geo.gamma222[p] = gi12 * t122 + gi22 * t222;

            const double k11 = -nv.dot(x11);
            const double k12 = -nv.dot(x12);
            const double k22 = -nv.dot(x22);

            const double km11 = gi11 * k11 + gi12 * k12;
            const double km12 = gi11 * k12 + gi12 * k22;
            const double km21 = gi12 * k11 + gi22 * k12;
            const double km22 = gi12 * k12 + gi22 * k22;

            geo.b1[p] = b1;
            geo.b2[p] = b2;
            geo.nrm[p] = nv;
            geo.g11[p] = g11;
            geo.g12[p] = g12;
            geo.g22[p] = g22;
            geo.gi11[p] = gi11;
            geo.gi12[p] = gi12;
            geo.gi22[p] = gi22;
            geo.sqrtg[p] = std::sqrt(det);
            geo.k11[p] = k11;
            geo.k12[p] = k12;
            geo.k22[p] = k22;
            geo.km11[p] = km11;
            geo.km12[p] = km12;
            geo.km21[p] = km21;
            geo.km22[p] = km22;
            // kappa^{ij} = kappa^i_l g^{lj}
            geo.ku11[p] = km11 * gi11 + km12 * gi12;
            geo.ku12[p] = km11 * gi12 + km12 * gi22;
            geo.ku22[p] = km21 * gi12 + km22 * gi22;
            geo.kmean[p] = km11 + km22;
            geo.rgauss[p] = 2.0 * (km11 * km22 - km12 * km21);

            const double tr = km11 + km22, dt = km11 * km22 - km12 * km21;
            const double disc = std::sqrt(std::max(0.0, tr * tr / 4.0 - dt));
            local_max = std::max({local_max, std::abs(tr / 2.0 + disc),
                                  std::abs(tr / 2.0 - disc)});
        }
        static std::mutex m;
        std::lock_guard<std::mutex> lock(m);
        max_kappa_per_chunk.push_back(local_max);
    };

    parallel_for(n, body);
    if (degenerate)
        throw GridError("compute_geometry: degenerate metric (det g <= 0)");
    for (double m : max_kappa_per_chunk)
        geo.max_abs_principal_curvature = std::max(geo.max_abs_principal_curvature, m);
    return geo;
}

double curvature_identity_residual(const GeometryFields& geo) {
    double worst = 0.0;
    const std::size_t n = geo.grid.size();
    for (std::size_t p = 0; p < n; ++p) {
        // kappa^i_m kappa^{mj}, fully raised
        const double t11 = geo.km11[p] * geo.ku11[p] + geo.km12[p] * geo.ku12[p];
        const double t12 = geo.km11[p] * geo.ku12[p] + geo.km12[p] * geo.ku22[p];
        const double t22 = geo.km21[p] * geo.ku12[p] + geo.km22[p] * geo.ku22[p];
        const double r11 =
            0.5 * geo.rgauss[p] * geo.gi11[p] - (geo.kmean[p] * geo.ku11[p] - t11);
        const double r12 =
            0.5 * geo.rgauss[p] * geo.gi12[p] - (geo.kmean[p] * geo.ku12[p] - t12);
        const double r22 =
            0.5 * geo.rgauss[p] * geo.gi22[p] - (geo.kmean[p] * geo.ku22[p] - t22);
        worst = std::max({worst, std::abs(r11), std::abs(r12), std::abs(r22)});
    }
    return worst;
}

double inverse_curvature_residual(const GeometryFields& geo, double tol) {
    double worst = 0.0;
    const std::size_t n = geo.grid.size();
    for (std::size_t p = 0; p < n; ++p) {
        const double R = geo.rgauss[p];
        if (std::abs(R) <= tol)
            continue;
        const double inv11 = 2.0 / R * (geo.kmean[p] * geo.gi11[p] - geo.ku11[p]);
        const double inv12 = 2.0 / R * (geo.kmean[p] * geo.gi12[p] - geo.ku12[p]);
        const double inv22 = 2.0 / R * (geo.kmean[p] * geo.gi22[p] - geo.ku22[p]);
        const double d11 = inv11 * geo.k11[p] + inv12 * geo.k12[p];
        const double d12 = inv11 * geo.k12[p] + inv12 * geo.k22[p];
        const double d21 = inv12 * geo.k11[p] + inv22 * geo.k12[p];
        const double d22 = inv12 * geo.k12[p] + inv22 * geo.k22[p];
        worst = std::max({worst, std::abs(d11 - 1.0), std::abs(d12), std::abs(d21),
                          std::abs(d22 - 1.0)});
    }
    return worst;
}

double metric_inverse_residual(const GeometryFields& geo) {
    double worst = 0.0;
    const std::size_t n = geo.grid.size();
    for (std::size_t p = 0; p < n; ++p) {
        const double d11 = geo.gi11[p] * geo.g11[p] + geo.gi12[p] * geo.g12[p];
        const double d12 = geo.gi11[p] * geo.g12[p] + geo.gi12[p] * geo.g22[p];
        const double d22 = geo.gi12[p] * geo.g12[p] + geo.gi22[p] * geo.g22[p];
        worst = std::max({worst, std::abs(d11 - 1.0), std::abs(d12), std::abs(d22 - 1.0)});
    }
    return worst;
}

void write_geometry_csv(const GeometryFields& geo, std::ostream& os) {
    os << "i,j,q1,q2,g11,g12,g22,sqrtg,k11,k12,k22,kmean,Rgauss\n";
    for (int i = 0; i < geo.grid.n1; ++i) {
        for (int j = 0; j < geo.grid.n2; ++j) {
            const std::size_t p = geo.grid.idx(i, j);
            os << i << ',' << j << ',' << csv_num(geo.grid.q1(i)) << ','
               << csv_num(geo.grid.q2(j)) << ',' << csv_num(geo.g11[p]) << ','
               << csv_num(geo.g12[p]) << ',' << csv_num(geo.g22[p]) << ','
               << csv_num(geo.sqrtg[p]) << ',' << csv_num(geo.k11[p]) << ','
               << csv_num(geo.k12[p]) << ',' << csv_num(geo.k22[p]) << ','
               << csv_num(geo.kmean[p]) << ',' << csv_num(geo.rgauss[p]) << '\n';
        }
    }
}

} // namespace thinshell
