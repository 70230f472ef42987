#include <doctest.h>

#include <cmath>

#include "thinshell/quadrature.hpp"
#include "thinshell/transverse.hpp"

using namespace thinshell;

namespace {

// Closed-form oracle for the mode matrix elements, via product-to-sum
// identities and the primitive integrals
//   I1(c) = int_{-1/2}^{1/2} xi sin(c pi xi) dxi
//   I2(c) = int_{-1/2}^{1/2} xi^2 cos(c pi xi) dxi
// Kept independent of the quadrature path it checks.
double primitive_i1(int c) {
    const double cp = c * M_PI;
    return 2.0 * (std::sin(0.5 * cp) / (cp * cp) - std::cos(0.5 * cp) / (2.0 * cp));
}

double primitive_i2(int c) {
    if (c == 0)
        return 1.0 / 12.0;
    const double cp = c * M_PI;
    return 2.0 * (std::cos(0.5 * cp) / (cp * cp) +
                  (0.25 / cp - 2.0 / (cp * cp * cp)) * std::sin(0.5 * cp));
}

double closed_form_element(int k, int n, int power) {
    const bool k_cos = k % 2 == 1, n_cos = n % 2 == 1;
    if (power == 1) {
        // odd weight: only cos-sin pairs survive
        if (k_cos == n_cos)
            return 0.0;
        // sqrt2 cos(a) * sqrt2 sin(b) = sin((a+b)) + sin((b-a))
        const int a = k_cos ? k : n; // cosine index
        const int b = k_cos ? n : k; // sine index
        return primitive_i1(b + a) + primitive_i1(b - a);
    }
    // even weight: only same-parity pairs survive
    if (k_cos != n_cos)
        return 0.0;
    if (k_cos) // 2 cos cos = cos(k-n) + cos(k+n)
        return primitive_i2(std::abs(k - n)) + primitive_i2(k + n);
    // 2 sin sin = cos(k-n) - cos(k+n)
    return primitive_i2(std::abs(k - n)) - primitive_i2(k + n);
}

} // namespace

TEST_CASE("transverse modes: boundary, normalization, energy") {
    for (int n = 1; n <= 8; ++n) {
        const TransverseMode mode(n);
        CHECK(std::abs(mode(-0.5)) < 1e-13);
        CHECK(std::abs(mode(0.5)) < 1e-13);
        CHECK(mode.energy() == doctest::Approx(0.5 * M_PI * M_PI * n * n).epsilon(1e-15));

        const GaussLegendre rule(64, -0.5, 0.5);
        const double norm = rule.integrate([&](double xi) { return mode(xi) * mode(xi); });
        CHECK(std::abs(norm - 1.0) < 1e-12);
    }
    CHECK(TransverseMode(1)(0.0) == doctest::Approx(std::sqrt(2.0)));
    CHECK(TransverseMode(1).energy() == doctest::Approx(4.9348022005446793));
    CHECK_THROWS(TransverseMode(0));
}

TEST_CASE("mode energies increase strictly") {
    double prev = 0.0;
    for (int n = 1; n <= 12; ++n) {
        const TransverseMode mode(n);
        CHECK(mode.energy() > prev);
        prev = mode.energy();
    }
}

TEST_CASE("orthonormality up to level 8") {
    const GaussLegendre rule(64, -0.5, 0.5);
    for (int m = 1; m <= 8; ++m) {
        for (int n = 1; n <= 8; ++n) {
            const TransverseMode a(m), b(n);
            const double ip = rule.integrate([&](double xi) { return a(xi) * b(xi); });
            CHECK(std::abs(ip - (m == n ? 1.0 : 0.0)) < 1e-12);
        }
    }
}

TEST_CASE("first-moment matrix elements") {
    for (int n = 1; n <= 8; ++n)
        CHECK(std::abs(xi_matrix_element(n, n, 1)) < 1e-14);

    CHECK(xi_matrix_element(1, 2, 1) ==
          doctest::Approx(16.0 / (9.0 * M_PI * M_PI)).epsilon(1e-12));

    for (int k = 1; k <= 6; ++k)
        for (int n = 1; n <= 6; ++n)
            CHECK(xi_matrix_element(k, n, 1) ==
                  doctest::Approx(closed_form_element(k, n, 1)).epsilon(1e-11).scale(1.0));
}

TEST_CASE("second-moment matrix elements") {
    CHECK(xi_matrix_element(1, 3, 2) ==
          doctest::Approx(-3.0 / (8.0 * M_PI * M_PI)).epsilon(1e-12));

    for (int n = 1; n <= 8; ++n) {
        const double closed = (1.0 / 12.0) * (1.0 - 6.0 / (M_PI * M_PI * n * n));
        CHECK(std::abs(xi_matrix_element(n, n, 2) - closed) < 1e-12);
        CHECK(std::abs(TransverseMode(n).xi_squared_moment() - closed) < 1e-12);
    }

    for (int k = 1; k <= 6; ++k)
        for (int n = 1; n <= 6; ++n)
            CHECK(xi_matrix_element(k, n, 2) ==
                  doctest::Approx(closed_form_element(k, n, 2)).epsilon(1e-11).scale(1.0));

    // large-level limit approaches the uniform-density moment 1/12
    CHECK(std::abs(TransverseMode(40).xi_squared_moment() - 1.0 / 12.0) < 1e-4);
    CHECK(std::abs(TransverseMode(80).xi_squared_moment() - 1.0 / 12.0) <
          std::abs(TransverseMode(40).xi_squared_moment() - 1.0 / 12.0));

    CHECK_THROWS(xi_matrix_element(1, 2, 3));
    CHECK_THROWS(xi_matrix_element(0, 2, 1));
}

TEST_CASE("effective squared thickness") {
    CHECK(epsilon_tilde_sq(1.0, 1) == doctest::Approx(0.032672741512164443).epsilon(1e-12));
    CHECK(epsilon_tilde_sq(1.0, 2) == doctest::Approx(0.070668185378041116).epsilon(1e-12));
    CHECK(epsilon_tilde_sq(0.0, 1) == 0.0);
    // quadrature and closed form agree at the stated tolerance
    for (int n = 1; n <= 8; ++n) {
        const double eps = 0.37;
        CHECK(std::abs(epsilon_tilde_sq(eps, n) -
                       eps * eps * TransverseMode(n).xi_squared_moment()) <
              1e-12 * eps * eps);
    }
}

TEST_CASE("energy assembly") {
    SUBCASE("transverse-only") {
        const EnergyExpansion e = energy_expansion(0.1, 2, 0.0, 0.0, 1.0);
        CHECK(e.total == doctest::Approx(0.5 * M_PI * M_PI * 4.0 / 0.01).epsilon(1e-13));
        CHECK(e.curvature_term == 0.0);
    }

    SUBCASE("cylinder sector values") {
        // R = 1, angular wavenumber 1, level 1, hbar^2/m = 1, eps = 0.05:
        // lambda = m^2/(2R^2) - 1/(8R^2), gnn = (3/2)(m^2 - 1/4)/R^4
        const double lambda = 0.5 - 0.125;
        const double gnn = 1.5 * 0.75;
        const EnergyExpansion e = energy_expansion(0.05, 1, lambda, gnn, 1.0);
        CHECK(e.transverse_term == doctest::Approx(1973.9208802178716).epsilon(1e-12));
        CHECK(e.lambda_n == doctest::Approx(0.375));
        CHECK(e.curvature_term == doctest::Approx(9.189208550296249e-05).epsilon(1e-9));
        CHECK(e.total == doctest::Approx(1973.9208802178716 + 0.375 + 9.1892085e-05)
                             .epsilon(1e-12));
    }

    SUBCASE("doubling the level quadruples the leading term") {
        const EnergyExpansion e1 = energy_expansion(0.1, 1, 0.0, 0.0, 1.0);
        const EnergyExpansion e2 = energy_expansion(0.1, 2, 0.0, 0.0, 1.0);
        CHECK(e2.transverse_term == doctest::Approx(4.0 * e1.transverse_term).epsilon(1e-14));
    }

    CHECK_THROWS(energy_expansion(0.0, 1, 0.0, 0.0, 1.0));
}
