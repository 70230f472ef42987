#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "thinshell/errors.hpp"

namespace thinshell {

using RealField = std::vector<double>;
using ComplexField = std::vector<std::complex<double>>;

// Contravariant (or covariant, by context) vector field on a 2D grid.
struct VectorField {
    RealField c1, c2;
};

// Structured tensor-product grid over a chart's parameter box.
//
// Periodic axes exclude the duplicate endpoint: node i sits at
// qmin + i*h with h = L/n.  Non-periodic axes include both endpoints,
// h = L/(n-1).
struct Grid2D {
    int n1 = 0, n2 = 0;
    double q1min = 0.0, q1max = 1.0;
    double q2min = 0.0, q2max = 1.0;
    bool periodic1 = false, periodic2 = false;
    double h1 = 0.0, h2 = 0.0;

    static Grid2D make(int n1, int n2, double q1min, double q1max, double q2min,
                       double q2max, bool periodic1, bool periodic2) {
        if (n1 < 8 || n2 < 8)
            throw GridError("grid: node counts must be >= 8");
        if (!(q1max > q1min) || !(q2max > q2min))
            throw GridError("grid: empty parameter box");
        Grid2D g;
        g.n1 = n1;
        g.n2 = n2;
        g.q1min = q1min;
        g.q1max = q1max;
        g.q2min = q2min;
        g.q2max = q2max;
        g.periodic1 = periodic1;
        g.periodic2 = periodic2;
        g.h1 = (q1max - q1min) / (periodic1 ? n1 : n1 - 1);
        g.h2 = (q2max - q2min) / (periodic2 ? n2 : n2 - 1);
        return g;
    }

    std::size_t size() const { return static_cast<std::size_t>(n1) * n2; }
    std::size_t idx(int i, int j) const { return static_cast<std::size_t>(i) * n2 + j; }
    double q1(int i) const { return q1min + i * h1; }
    double q2(int j) const { return q2min + j * h2; }

    bool same_shape(const Grid2D& o) const {
        return n1 == o.n1 && n2 == o.n2 && periodic1 == o.periodic1 &&
               periodic2 == o.periodic2 && q1min == o.q1min && q2min == o.q2min &&
               q1max == o.q1max && q2max == o.q2max;
    }
};

} // namespace thinshell
