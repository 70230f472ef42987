#pragma once

namespace thinshell {

// Hard-wall eigenmode across the shell thickness, in the scaled coordinate
// xi = q0/eps on [-1/2, 1/2]:
//   chi_N = sqrt(2) cos(N pi xi)  (N odd)
//   chi_N = sqrt(2) sin(N pi xi)  (N even)
// with eigenvalue E_N = pi^2 N^2 / 2 (units of hbar^2/m applied by callers).
class TransverseMode {
public:
    explicit TransverseMode(int level);

    int level() const { return level_; }
    bool even_parity() const { return level_ % 2 == 1; } // cosine branch
    double energy() const { return energy_; }

    double operator()(double xi) const;

    // <N| xi^2 |N>, computed by Gauss-Legendre quadrature at construction.
    double xi_squared_moment() const { return xi2_; }

private:
    int level_;
    double energy_;
    double xi2_;
};

// <K| xi^p |N> for p in {1, 2}, by 64-point Gauss-Legendre quadrature.
double xi_matrix_element(int k, int n, int power);

// eps^2 <N|xi^2|N> in closed form: (eps^2/12)(1 - 6/(pi^2 N^2)).
double epsilon_tilde_sq(double eps, int level);

// Energy of a transverse level dressed by the surface problem:
//   E = E_N hbar^2/(m eps^2) + lambda_n + eps^2 <N|xi^2|N> g_nn
// The odd orders in eps vanish identically and carry no fields here.
struct EnergyExpansion {
    double eps = 0.0;
    int level = 1;
    double lambda_n = 0.0;      // surface eigenvalue
    double gnn = 0.0;           // diagonal matrix element of the quadratic operator
    double hbar2_over_m = 1.0;

    double transverse_term = 0.0; // eps^-2 E_N hbar^2/m
    double curvature_term = 0.0;  // eps^2 <xi^2> gnn
    double total = 0.0;
};

EnergyExpansion energy_expansion(double eps, int level, double lambda_n, double gnn,
                                 double hbar2_over_m);

} // namespace thinshell
