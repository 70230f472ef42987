#include <doctest.h>

#include <cmath>
#include <memory>

#include "thinshell/evolve.hpp"
#include "thinshell/quadrature.hpp"
#include "thinshell/ribbon.hpp"
#include "thinshell/transverse.hpp"

using namespace thinshell;

namespace {

RibbonSpec make_spec(double eps, int m_wave = 1, int level = 1) {
    RibbonSpec s;
    s.bend_radius = 1.0;
    s.thickness = eps;
    s.m_wave = m_wave;
    s.level = level;
    return s;
}

} // namespace

TEST_CASE("ribbon spec validation") {
    CHECK_THROWS_AS(validate(make_spec(1.5)), ChartError);  // eps >= R
    CHECK_THROWS_AS(validate(make_spec(-0.1)), ChartError);
    RibbonSpec bad = make_spec(0.1);
    bad.level = 0;
    CHECK_THROWS_AS(validate(bad), ChartError);
}

TEST_CASE("radial weight: limits, frozen value, parity, convexity") {
    SUBCASE("weight tends to one as the shell thins") {
        CHECK(std::abs(radial_weight_exact(make_spec(1e-4)) - 1.0) < 1e-7);
    }

    SUBCASE("frozen value at eps/R = 0.1, level 1") {
        const double w = radial_weight_exact(make_spec(0.1));
        CHECK(radial_weight_expansion(make_spec(0.1)) ==
              doctest::Approx(1.0 + 3.0 * epsilon_tilde_sq(0.1, 1)).epsilon(1e-15));
        CHECK(w == doctest::Approx(1.000980).epsilon(5e-6));
        // deviation from the expansion is the quartic tail only
        CHECK(std::abs(w - radial_weight_expansion(make_spec(0.1))) < 5e-6);
    }

    SUBCASE("weight exceeds one and decreases towards one") {
        double prev = radial_weight_exact(make_spec(0.4));
        CHECK(prev > 1.0);
        for (double eps : {0.2, 0.1, 0.05}) {
            const double w = radial_weight_exact(make_spec(eps));
            CHECK(w > 1.0);
            CHECK(w < prev);
            prev = w;
        }
    }

    SUBCASE("odd moments of the density vanish by parity") {
        const GaussLegendre rule(128, -0.5, 0.5);
        for (int level : {1, 2, 3}) {
            const TransverseMode mode(level);
            const double m1 =
                rule.integrate([&](double xi) { return xi * mode(xi) * mode(xi); });
            const double m3 = rule.integrate(
                [&](double xi) { return xi * xi * xi * mode(xi) * mode(xi); });
            CHECK(std::abs(m1) < 1e-13);
            CHECK(std::abs(m3) < 1e-13);
        }
    }

    SUBCASE("parity-class swap moves the weight only through the quadratic moment") {
        const double eps = 0.08;
        const double w1 = radial_weight_exact(make_spec(eps, 1, 1));
        const double w2 = radial_weight_exact(make_spec(eps, 1, 2));
        const double predicted =
            3.0 * (epsilon_tilde_sq(eps, 1) - epsilon_tilde_sq(eps, 2));
        CHECK(w1 - w2 == doctest::Approx(predicted).epsilon(2e-3));
    }

    SUBCASE("fourth-order shrinkage of the expansion error") {
        const double e1 = std::abs(radial_weight_exact(make_spec(0.1)) /
                                       radial_weight_expansion(make_spec(0.1)) -
                                   1.0);
        const double e2 = std::abs(radial_weight_exact(make_spec(0.05)) /
                                       radial_weight_expansion(make_spec(0.05)) -
                                   1.0);
        CHECK(e1 / e2 >= 12.0);
    }
}

TEST_CASE("flux helpers scale the surface current") {
    const RibbonSpec spec = make_spec(0.1);
    const double current = 0.37;
    CHECK(ribbon_flux_exact(spec, current) ==
          doctest::Approx(radial_weight_exact(spec) * current).epsilon(1e-15));
    CHECK(ribbon_flux_expansion(spec, current) ==
          doctest::Approx((1.0 + 3.0 * epsilon_tilde_sq(0.1, 1)) * current).epsilon(1e-15));
    // straight direction: no geometric factor at all
    CHECK(ribbon_flux_z(spec, current) == current);
}

TEST_CASE("expansion factor equals the effective model's flux factor on the cylinder") {
    const RibbonSpec spec = make_spec(0.1, 1, 1);
    ChartSpec cs;
    cs.kind = ChartKind::Cylinder;
    cs.radius = spec.bend_radius;
    const SurfaceChart chart = build_chart(cs);
    auto geo = std::make_shared<const GeometryFields>(
        compute_geometry(chart, chart.make_grid(32, 8)));
    const CurvaturePotentials pot = curvature_potentials(*geo);
    PhysicsParams params;
    params.eps = spec.thickness;
    params.level = spec.level;
    const EffectiveModel model = build_model(geo, pot, ModelKind::Quantum, params);

    ComplexState st;
    st.psi.resize(geo->grid.size());
    for (int i = 0; i < geo->grid.n1; ++i)
        for (int j = 0; j < geo->grid.n2; ++j)
            st.psi[geo->grid.idx(i, j)] =
                std::exp(std::complex<double>(0.0, spec.m_wave * geo->grid.q1(i)));
    normalize(*geo, st);

    // Feed the same discrete surface current to both routes; the curvature
    // factors must then agree to round-off.
    const FluxPair fp = fluxes(model, st);
    auto [d1, d2] = gradient(geo->grid, st.psi);
    for (std::size_t p = 0; p < st.psi.size(); ++p) {
        const double current =
            model.params.hbar / model.params.mass * std::imag(std::conj(st.psi[p]) * d1[p]);
        const double from_model = fp.flow.c1[p] + fp.geometric.c1[p];
        const double from_ribbon = ribbon_flux_expansion(spec, current);
        CHECK(std::abs(from_model - from_ribbon) <= 1e-12 * std::abs(from_ribbon));
    }
}

TEST_CASE("annulus oracle: flat-well limit and node counts") {
    SUBCASE("zero angular momentum, huge bend radius") {
        RibbonSpec spec = make_spec(0.05, 0, 1);
        spec.bend_radius = 1e6;
        const double e = annulus_eigen_oracle(spec);
        const double box = 0.5 * M_PI * M_PI / (0.05 * 0.05);
        CHECK(e == doctest::Approx(box).epsilon(1e-10));
    }

    SUBCASE("Sturm oscillation: N-th level has N-1 interior nodes") {
        for (int level : {1, 2, 3}) {
            const RibbonSpec spec = make_spec(0.1, 1, level);
            CHECK(annulus_eigenfunction_nodes(spec) == level - 1);
        }
    }

    SUBCASE("hard-wall ends: every basis component vanishes at the walls") {
        // Dirichlet eigenfunctions carry zero radial current at the walls.
        const TransverseMode m1(1), m4(4);
        CHECK(std::abs(m1(-0.5)) + std::abs(m1(0.5)) < 1e-12);
        CHECK(std::abs(m4(-0.5)) + std::abs(m4(0.5)) < 1e-12);
    }
}

TEST_CASE("finite-difference and basis oracles agree far below 1e-9 relative") {
    for (const RibbonSpec& spec :
         {make_spec(0.05, 1, 1), make_spec(0.08, 0, 1), make_spec(0.04, 1, 2)}) {
        const double e_fd = annulus_eigen_fd(spec);
        const double e_sp = annulus_eigen_oracle(spec);
        CHECK(std::abs(e_fd - e_sp) < 1e-9 * std::abs(e_sp));
    }
}

TEST_CASE("exact energy matches the three-term expansion at the expected order") {
    const RibbonSpec spec = make_spec(0.05, 1, 1);
    const double e_exact = annulus_eigen_oracle(spec);
    const double e_pert = ribbon_energy_perturbative(spec);
    CHECK(e_exact == doctest::Approx(1974.296).epsilon(1e-6));
    // the perturbative surface terms dominate the defect by a wide margin
    const double surface_terms = e_pert - 0.5 * M_PI * M_PI / (0.05 * 0.05);
    CHECK(std::abs(e_exact - e_pert) < 1e-3 * std::abs(surface_terms));
}

TEST_CASE("perturbation residual sweeps shrink by at least 7x per halving") {
    for (const auto& [m_wave, level] : {std::pair{1, 1}, std::pair{0, 1}, std::pair{1, 2}}) {
        const RibbonSpec base = make_spec(0.08, m_wave, level);
        const auto rows = eigen_perturbation_check(base, {0.08, 0.04, 0.02});
        REQUIRE(rows.size() == 3);
        CAPTURE(m_wave);
        CAPTURE(level);
        CHECK(rows[1].resid_ratio >= 7.0);
        CHECK(rows[2].resid_ratio >= 7.0);
        for (const auto& r : rows) {
            CHECK(std::isfinite(r.e_exact));
            CHECK(r.weight_exact >= 1.0);
        }
    }
}

TEST_CASE("level-2 moment feeds the level-2 expansion") {
    const RibbonSpec spec = make_spec(0.04, 1, 2);
    const double e_pert = ribbon_energy_perturbative(spec);
    const double expected_moment = 0.070668185378041116;
    const double manual = 0.5 * M_PI * M_PI * 4.0 / (0.04 * 0.04) + ribbon_lambda_n(spec) +
                          0.04 * 0.04 * expected_moment * ribbon_gnn(spec);
    CHECK(e_pert == doctest::Approx(manual).epsilon(1e-12));
}
