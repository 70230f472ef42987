#include "thinshell/quadrature.hpp"

#include <cmath>
#include <stdexcept>

namespace thinshell {

// Nodes by Newton iteration on P_n with the three-term recurrence.
GaussLegendre::GaussLegendre(int points, double a, double b) {
    if (points < 1)
        throw std::invalid_argument("GaussLegendre: need at least one point");
    const int n = points;
    nodes_.resize(n);
    weights_.resize(n);

    const double xm = 0.5 * (b + a);
    const double xl = 0.5 * (b - a);
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int k = 0; k < n; ++k) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * k + 1.0) * x * p1 - k * p2) / (k + 1.0);
            }
            dp = n * (x * p0 - p1) / (x * x - 1.0);
            const double dx = p0 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15)
                break;
        }
        nodes_[i] = xm - xl * x;
        nodes_[n - 1 - i] = xm + xl * x;
        weights_[i] = 2.0 * xl / ((1.0 - x * x) * dp * dp);
        weights_[n - 1 - i] = weights_[i];
    }
}

} // namespace thinshell
