#include "thinshell/transverse.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "thinshell/quadrature.hpp"

namespace thinshell {

namespace {

// 64 Gauss-Legendre nodes resolve the trig polynomials up to level 8 to
// machine precision; higher levels get proportionally more nodes.
GaussLegendre make_rule(int max_level) {
    return GaussLegendre(std::max(64, 6 * max_level), -0.5, 0.5);
}

const GaussLegendre& rule_for(int max_level) {
    static const GaussLegendre base(64, -0.5, 0.5);
    if (max_level <= 8)
        return base;
    thread_local GaussLegendre wide = make_rule(max_level);
    if (static_cast<int>(wide.nodes().size()) < 6 * max_level)
        wide = make_rule(max_level);
    return wide;
}

double chi(int n, double xi) {
    const double s = std::sqrt(2.0);
    return n % 2 == 1 ? s * std::cos(n * M_PI * xi) : s * std::sin(n * M_PI * xi);
}

} // namespace

TransverseMode::TransverseMode(int level) : level_(level) {
    if (level < 1)
        throw std::invalid_argument("TransverseMode: level must be >= 1");
    energy_ = 0.5 * M_PI * M_PI * level * level;
    xi2_ = rule_for(level).integrate([level](double xi) {
        const double c = chi(level, xi);
        return xi * xi * c * c;
    });
}

double TransverseMode::operator()(double xi) const { return chi(level_, xi); }

double xi_matrix_element(int k, int n, int power) {
    if (k < 1 || n < 1)
        throw std::invalid_argument("xi_matrix_element: levels must be >= 1");
    if (power != 1 && power != 2)
        throw std::invalid_argument("xi_matrix_element: power must be 1 or 2");
    return rule_for(std::max(k, n)).integrate([=](double xi) {
        const double w = power == 1 ? xi : xi * xi;
        return chi(k, xi) * w * chi(n, xi);
    });
}

double epsilon_tilde_sq(double eps, int level) {
    if (level < 1)
        throw std::invalid_argument("epsilon_tilde_sq: level must be >= 1");
    return eps * eps / 12.0 * (1.0 - 6.0 / (M_PI * M_PI * level * level));
}

EnergyExpansion energy_expansion(double eps, int level, double lambda_n, double gnn,
                                 double hbar2_over_m) {
    if (!(eps > 0.0))
        throw std::invalid_argument("energy_expansion: eps must be positive");
    const TransverseMode mode(level);
    EnergyExpansion e;
    e.eps = eps;
    e.level = level;
    e.lambda_n = lambda_n;
    e.gnn = gnn;
    e.hbar2_over_m = hbar2_over_m;
    e.transverse_term = mode.energy() * hbar2_over_m / (eps * eps);
    e.curvature_term = eps * eps * mode.xi_squared_moment() * gnn;
    e.total = e.transverse_term + lambda_n + e.curvature_term;
    return e;
}

} // namespace thinshell
