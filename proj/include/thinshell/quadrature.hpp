#pragma once

#include <functional>
#include <vector>

namespace thinshell {

// Gauss-Legendre rule on [a, b].
class GaussLegendre {
public:
    GaussLegendre(int points, double a, double b);

    const std::vector<double>& nodes() const { return nodes_; }
    const std::vector<double>& weights() const { return weights_; }

    template <class F>
    double integrate(F&& f) const {
        double acc = 0.0;
        for (std::size_t i = 0; i < nodes_.size(); ++i)
            acc += weights_[i] * f(nodes_[i]);
        return acc;
    }

private:
    std::vector<double> nodes_, weights_;
};

} // namespace thinshell
