#pragma once

#include <complex>
#include <vector>

#include "thinshell/geometry.hpp"
#include "thinshell/grid.hpp"

namespace thinshell {

// Discrete covariant calculus on the structured grid.
//
// All divergence-type operators share one stencil family: a centered
// difference G_i (periodic wrap, or zero ghost values on non-periodic axes —
// the homogeneous Dirichlet contract).  Because G_i is antisymmetric under
// the plain grid sum, every operator below telescopes exactly:
//
//   sum_nodes sqrtg * covariant_divergence(V) * h1*h2 = 0   (periodic axes)
//   sum_nodes sqrtg * f * div(V) = -sum_nodes sqrtg * (G_i f) * V^i
//
// and divergence_form_apply is symmetric under the sqrtg-weighted inner
// product.  laplace_beltrami and covariant_divergence compose exactly:
// laplace_beltrami(f) == covariant_divergence(raise(gradient(f))).

namespace detail {

template <class T>
inline T sample(const std::vector<T>& f, const Grid2D& g, int i, int j) {
    if (g.periodic1) {
        i = (i % g.n1 + g.n1) % g.n1;
    } else if (i < 0 || i >= g.n1) {
        return T{};
    }
    if (g.periodic2) {
        j = (j % g.n2 + g.n2) % g.n2;
    } else if (j < 0 || j >= g.n2) {
        return T{};
    }
    return f[g.idx(i, j)];
}

} // namespace detail

// Covariant gradient (partial derivatives) of a grid field under the PDE
// boundary contract.  Returns the two components as fields.
template <class T>
std::pair<std::vector<T>, std::vector<T>> gradient(const Grid2D& g,
                                                   const std::vector<T>& f) {
    std::pair<std::vector<T>, std::vector<T>> out{std::vector<T>(g.size()),
                                                  std::vector<T>(g.size())};
    const double inv2h1 = 0.5 / g.h1, inv2h2 = 0.5 / g.h2;
    for (int i = 0; i < g.n1; ++i) {
        for (int j = 0; j < g.n2; ++j) {
            const std::size_t p = g.idx(i, j);
            out.first[p] =
                (detail::sample(f, g, i + 1, j) - detail::sample(f, g, i - 1, j)) * inv2h1;
            out.second[p] =
                (detail::sample(f, g, i, j + 1) - detail::sample(f, g, i, j - 1)) * inv2h2;
        }
    }
    return out;
}

// Gradient of a smooth geometric field (curvature, Gaussian curvature, ...):
// centered in the interior, second-order one-sided at non-periodic edges.
// These fields extend smoothly past the grid, so zero ghosts would be wrong.
VectorField smooth_gradient(const Grid2D& g, const RealField& f);

// Raise covariant components with the inverse metric.
VectorField raise_index(const GeometryFields& geo, const VectorField& covariant);

// Covariant divergence of a smooth geometric vector field with one-sided
// differences at non-periodic edges (same edge rule as smooth_gradient).
RealField smooth_divergence(const GeometryFields& geo, const VectorField& v);

// (1/sqrtg) d_i (sqrtg V^i) for a node-centered contravariant field.
template <class T>
std::vector<T> covariant_divergence_t(const GeometryFields& geo, const std::vector<T>& v1,
                                      const std::vector<T>& v2) {
    const Grid2D& g = geo.grid;
    std::vector<T> w1(g.size()), w2(g.size()), out(g.size());
    for (std::size_t p = 0; p < g.size(); ++p) {
        w1[p] = v1[p] * geo.sqrtg[p];
        w2[p] = v2[p] * geo.sqrtg[p];
    }
    const double inv2h1 = 0.5 / g.h1, inv2h2 = 0.5 / g.h2;
    for (int i = 0; i < g.n1; ++i) {
        for (int j = 0; j < g.n2; ++j) {
            const std::size_t p = g.idx(i, j);
            const T d1 =
                (detail::sample(w1, g, i + 1, j) - detail::sample(w1, g, i - 1, j)) * inv2h1;
            const T d2 =
                (detail::sample(w2, g, i, j + 1) - detail::sample(w2, g, i, j - 1)) * inv2h2;
            out[p] = (d1 + d2) / geo.sqrtg[p];
        }
    }
    return out;
}

RealField covariant_divergence(const GeometryFields& geo, const VectorField& v);

// (1/sqrtg) d_i (sqrtg C^{ij} d_j f) with a symmetric node-centered
// coefficient tensor.  This is the building block for the Laplace-Beltrami
// operator, the anisotropic curvature operators, and the effective
// generators.
template <class T>
std::vector<T> divergence_form_apply(const GeometryFields& geo, const RealField& c11,
                                     const RealField& c12, const RealField& c22,
                                     const std::vector<T>& f) {
    const Grid2D& g = geo.grid;
    auto [df1, df2] = gradient(g, f);
    std::vector<T> w1(g.size()), w2(g.size());
    for (std::size_t p = 0; p < g.size(); ++p) {
        w1[p] = (df1[p] * c11[p] + df2[p] * c12[p]) * geo.sqrtg[p];
        w2[p] = (df1[p] * c12[p] + df2[p] * c22[p]) * geo.sqrtg[p];
    }
    std::vector<T> out(g.size());
    const double inv2h1 = 0.5 / g.h1, inv2h2 = 0.5 / g.h2;
    for (int i = 0; i < g.n1; ++i) {
        for (int j = 0; j < g.n2; ++j) {
            const std::size_t p = g.idx(i, j);
            const T d1 =
                (detail::sample(w1, g, i + 1, j) - detail::sample(w1, g, i - 1, j)) * inv2h1;
            const T d2 =
                (detail::sample(w2, g, i, j + 1) - detail::sample(w2, g, i, j - 1)) * inv2h2;
            out[p] = (d1 + d2) / geo.sqrtg[p];
        }
    }
    return out;
}

// g^{-1/2} d_i (g^{1/2} g^{ij} d_j f), second-order accurate.
RealField laplace_beltrami(const GeometryFields& geo, const RealField& f);
ComplexField laplace_beltrami(const GeometryFields& geo, const ComplexField& f);

// Kahan-compensated weighted sums.
double integral_weighted(const GeometryFields& geo, const RealField& f);
double total_density(const GeometryFields& geo, const ComplexField& f); // sum sqrtg |f|^2 h1 h2
double dot_weighted(const GeometryFields& geo, const RealField& u, const RealField& v);
std::complex<double> dot_weighted(const GeometryFields& geo, const ComplexField& u,
                                  const ComplexField& v);

} // namespace thinshell
