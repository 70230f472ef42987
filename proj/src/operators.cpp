#include "thinshell/operators.hpp"

#include <cmath>

namespace thinshell {

namespace {

// Kahan-compensated accumulator.
struct Kahan {
    double sum = 0.0, c = 0.0;
    void add(double x) {
        const double y = x - c;
        const double t = sum + y;
        c = (t - sum) - y;
        sum = t;
    }
};

double edge_aware_diff(const RealField& f, const Grid2D& g, int i, int j, int axis) {
    const int n = axis == 0 ? g.n1 : g.n2;
    const bool periodic = axis == 0 ? g.periodic1 : g.periodic2;
    const double h = axis == 0 ? g.h1 : g.h2;
    const int k = axis == 0 ? i : j;
    auto value = [&](int m) {
        if (periodic)
            m = (m % n + n) % n;
        return axis == 0 ? f[g.idx(m, j)] : f[g.idx(i, m)];
    };
    if (periodic || (k > 0 && k < n - 1))
        return (value(k + 1) - value(k - 1)) / (2.0 * h);
    if (k == 0)
        return (-3.0 * value(0) + 4.0 * value(1) - value(2)) / (2.0 * h);
    return (3.0 * value(n - 1) - 4.0 * value(n - 2) + value(n - 3)) / (2.0 * h);
}

} // namespace

VectorField smooth_gradient(const Grid2D& g, const RealField& f) {
    VectorField out{RealField(g.size()), RealField(g.size())};
    for (int i = 0; i < g.n1; ++i) {
        for (int j = 0; j < g.n2; ++j) {
            const std::size_t p = g.idx(i, j);
            out.c1[p] = edge_aware_diff(f, g, i, j, 0);
            out.c2[p] = edge_aware_diff(f, g, i, j, 1);
        }
    }
    return out;
}

VectorField raise_index(const GeometryFields& geo, const VectorField& covariant) {
    VectorField out{RealField(geo.grid.size()), RealField(geo.grid.size())};
    for (std::size_t p = 0; p < geo.grid.size(); ++p) {
        out.c1[p] = geo.gi11[p] * covariant.c1[p] + geo.gi12[p] * covariant.c2[p];
        out.c2[p] = geo.gi12[p] * covariant.c1[p] + geo.gi22[p] * covariant.c2[p];
    }
    return out;
}

RealField covariant_divergence(const GeometryFields& geo, const VectorField& v) {
    return covariant_divergence_t(geo, v.c1, v.c2);
}

RealField smooth_divergence(const GeometryFields& geo, const VectorField& v) {
    const Grid2D& g = geo.grid;
    RealField w1(g.size()), w2(g.size()), out(g.size());
    for (std::size_t p = 0; p < g.size(); ++p) {
        w1[p] = v.c1[p] * geo.sqrtg[p];
        w2[p] = v.c2[p] * geo.sqrtg[p];
    }
    for (int i = 0; i < g.n1; ++i) {
        for (int j = 0; j < g.n2; ++j) {
            const std::size_t p = g.idx(i, j);
            out[p] = (edge_aware_diff(w1, g, i, j, 0) + edge_aware_diff(w2, g, i, j, 1)) /
                     geo.sqrtg[p];
        }
    }
    return out;
}

RealField laplace_beltrami(const GeometryFields& geo, const RealField& f) {
    return divergence_form_apply(geo, geo.gi11, geo.gi12, geo.gi22, f);
}

ComplexField laplace_beltrami(const GeometryFields& geo, const ComplexField& f) {
    return divergence_form_apply(geo, geo.gi11, geo.gi12, geo.gi22, f);
}

double integral_weighted(const GeometryFields& geo, const RealField& f) {
    Kahan acc;
    for (std::size_t p = 0; p < geo.grid.size(); ++p)
        acc.add(geo.sqrtg[p] * f[p]);
    return acc.sum * geo.grid.h1 * geo.grid.h2;
}

double total_density(const GeometryFields& geo, const ComplexField& f) {
    Kahan acc;
    for (std::size_t p = 0; p < geo.grid.size(); ++p)
        acc.add(geo.sqrtg[p] * std::norm(f[p]));
    return acc.sum * geo.grid.h1 * geo.grid.h2;
}

double dot_weighted(const GeometryFields& geo, const RealField& u, const RealField& v) {
    Kahan acc;
    for (std::size_t p = 0; p < geo.grid.size(); ++p)
        acc.add(geo.sqrtg[p] * u[p] * v[p]);
    return acc.sum * geo.grid.h1 * geo.grid.h2;
}

std::complex<double> dot_weighted(const GeometryFields& geo, const ComplexField& u,
                                  const ComplexField& v) {
    Kahan re, im;
    for (std::size_t p = 0; p < geo.grid.size(); ++p) {
        const std::complex<double> t = std::conj(u[p]) * v[p] * geo.sqrtg[p];
        re.add(t.real());
        im.add(t.imag());
    }
    return {re.sum * geo.grid.h1 * geo.grid.h2, im.sum * geo.grid.h1 * geo.grid.h2};
}

} // namespace thinshell
