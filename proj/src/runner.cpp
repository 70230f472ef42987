#include "thinshell/runner.hpp"

#include <cmath>
#include <filesystem>
#include <limits>
#include <memory>
#include <ostream>

#include "thinshell/csv.hpp"
#include "thinshell/quadrature.hpp"
#include "thinshell/transverse.hpp"
#include "thinshell/version.hpp"

namespace thinshell {

namespace {

std::vector<std::string> csv_header(const RunConfig& cfg) {
    std::vector<std::string> lines;
    lines.push_back(version());
    for (const auto& l : resolved_config_lines(cfg))
        lines.push_back(l);
    return lines;
}

std::string out_path(const RunConfig& cfg, const std::string& name) {
    std::filesystem::create_directories(cfg.out_dir);
    return (std::filesystem::path(cfg.out_dir) / name).string();
}

int run_geometry(const RunConfig& cfg, std::ostream& log, bool quiet) {
    const SurfaceChart chart = build_chart(cfg.chart);
    const Grid2D grid = chart.make_grid(cfg.n1, cfg.n2);
    const GeometryFields geo = compute_geometry(chart, grid);
    const CurvaturePotentials pot = curvature_potentials(geo);

    {
        CsvWriter w(out_path(cfg, "geometry.csv"), csv_header(cfg));
        write_geometry_csv(geo, w.stream());
    }
    {
        CsvWriter w(out_path(cfg, "potentials.csv"), csv_header(cfg));
        write_potentials_csv(geo, pot, w.stream());
    }
    const double resid = curvature_identity_residual(geo);
    if (!quiet)
        log << "geometry: " << chart.describe() << "  curvature-identity residual "
            << csv_num(resid) << (resid <= cfg.tol.identity ? " (ok)" : " (EXCEEDS TOL)")
            << "\n";
    return resid <= cfg.tol.identity ? 0 : 2;
}

int run_modes(const RunConfig& cfg, std::ostream& log, bool quiet) {
    CsvWriter w(out_path(cfg, "modes.csv"), csv_header(cfg));
    w.stream() << "N,E_N,xi2_moment,eps_tilde_sq_over_eps_sq\n";
    for (int n = 1; n <= cfg.modes_max_level; ++n) {
        const TransverseMode mode(n);
        w.stream() << n << ',' << csv_num(mode.energy()) << ','
                   << csv_num(mode.xi_squared_moment()) << ','
                   << csv_num(epsilon_tilde_sq(1.0, n)) << '\n';
    }
    if (!quiet)
        log << "modes: wrote levels 1.." << cfg.modes_max_level << "\n";
    return 0;
}

int run_evolve(const RunConfig& cfg, std::ostream& log, bool quiet) {
    const SurfaceChart chart = build_chart(cfg.chart);
    const Grid2D grid = chart.make_grid(cfg.n1, cfg.n2);
    auto geo = std::make_shared<const GeometryFields>(compute_geometry(chart, grid));
    const CurvaturePotentials pot = curvature_potentials(*geo);
    const RealField potential = load_potential(cfg, grid);
    const EffectiveModel model =
        build_model(geo, pot, cfg.physics_kind, cfg.physics, potential);

    CsvWriter w(out_path(cfg, "evolve.csv"), csv_header(cfg));
    w.stream() << "t,total_charge,norm,max_continuity_residual,l2_continuity_residual\n";

    const double L1 = grid.q1max - grid.q1min;
    const double L2 = grid.q2max - grid.q2min;
    StepControls controls;
    controls.implicit = cfg.implicit;
    controls.solver_tol = cfg.tol.solver;

    auto snapshot_name = [&](int k) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "field_%06d.csv", k);
        return std::string(buf);
    };

    double initial_charge = 0.0, final_charge = 0.0;
    double worst_resid = 0.0;

    if (cfg.physics_kind == ModelKind::Classical) {
        RealState state;
        state.phi.resize(grid.size());
        for (int i = 0; i < grid.n1; ++i)
            for (int j = 0; j < grid.n2; ++j)
                state.phi[grid.idx(i, j)] =
                    1.0 + cfg.initial.amplitude *
                              std::cos(2.0 * M_PI * (grid.q1(i) - grid.q1min) / L1) *
                              std::cos(2.0 * M_PI * (grid.q2(j) - grid.q2min) / L2);
        initial_charge = total_charge(*geo, state);
        for (int k = 0; k <= cfg.steps; ++k) {
            const ContinuityResidual res = continuity_residual(model, state);
            const double q = total_charge(*geo, state);
            const double nrm = std::sqrt(dot_weighted(*geo, state.phi, state.phi));
            w.stream() << csv_num(state.t) << ',' << csv_num(q) << ',' << csv_num(nrm)
                       << ',' << csv_num(res.max_norm) << ',' << csv_num(res.l2_weighted)
                       << '\n';
            worst_resid = std::max(worst_resid, res.max_norm);
            if (cfg.snapshot_stride > 0 && k % cfg.snapshot_stride == 0) {
                CsvWriter snap(out_path(cfg, snapshot_name(k)), csv_header(cfg));
                snap.stream() << "i,j,phi\n";
                for (int i = 0; i < grid.n1; ++i)
                    for (int j = 0; j < grid.n2; ++j)
                        snap.stream() << i << ',' << j << ','
                                      << csv_num(state.phi[grid.idx(i, j)]) << '\n';
            }
            if (k < cfg.steps)
                state = step(model, state, cfg.dt, controls);
            final_charge = q;
        }
    } else {
        ComplexState state;
        state.psi.resize(grid.size());
        for (int i = 0; i < grid.n1; ++i) {
            for (int j = 0; j < grid.n2; ++j) {
                const double u = (grid.q1(i) - grid.q1min) / L1;
                state.psi[grid.idx(i, j)] =
                    std::exp(std::complex<double>(0.0, 2.0 * M_PI * cfg.initial.m1 * u)) +
                    0.5 * std::exp(std::complex<double>(0.0, 2.0 * M_PI * cfg.initial.m2 * u));
            }
        }
        normalize(*geo, state);
        initial_charge = total_charge(*geo, state);
        for (int k = 0; k <= cfg.steps; ++k) {
            const ContinuityResidual res = continuity_residual(model, state);
            const double q = total_charge(*geo, state);
            w.stream() << csv_num(state.t) << ',' << csv_num(q) << ',' << csv_num(std::sqrt(q))
                       << ',' << csv_num(res.max_norm) << ',' << csv_num(res.l2_weighted)
                       << '\n';
            worst_resid = std::max(worst_resid, res.max_norm);
            if (cfg.snapshot_stride > 0 && k % cfg.snapshot_stride == 0) {
                CsvWriter snap(out_path(cfg, snapshot_name(k)), csv_header(cfg));
                snap.stream() << "i,j,re,im\n";
                for (int i = 0; i < grid.n1; ++i)
                    for (int j = 0; j < grid.n2; ++j)
                        snap.stream() << i << ',' << j << ','
                                      << csv_num(state.psi[grid.idx(i, j)].real()) << ','
                                      << csv_num(state.psi[grid.idx(i, j)].imag()) << '\n';
            }
            if (k < cfg.steps)
                state = step(model, state, cfg.dt, controls);
            final_charge = q;
        }
    }

    if (!quiet)
        log << "evolve: conservation drift " << csv_num(std::abs(final_charge - initial_charge))
            << "  max continuity residual " << csv_num(worst_resid) << "\n";
    return 0;
}

int run_ribbon(const RunConfig& cfg, std::ostream& log, bool quiet) {
    RibbonSpec base;
    base.bend_radius = cfg.chart.kind == ChartKind::Cylinder ? cfg.chart.radius : 1.0;
    base.thickness = cfg.ribbon_thickness > 0.0 ? cfg.ribbon_thickness : cfg.physics.eps;
    base.level = cfg.ribbon_level;
    base.m_wave = cfg.ribbon_m_wave;
    base.hbar = cfg.physics.hbar;
    base.mass = cfg.physics.mass;

    std::vector<double> eps_values;
    double e = base.thickness;
    for (int i = 0; i < cfg.ribbon_halvings; ++i, e *= 0.5)
        eps_values.push_back(e);

    const auto rows = eigen_perturbation_check(base, eps_values);

    CsvWriter w(out_path(cfg, "ribbon.csv"), csv_header(cfg));
    w.stream() << "eps,weight_exact,weight_expansion,weight_err,E_exact,E_pert,E_resid,"
                  "resid_ratio\n";
    double min_ratio = std::numeric_limits<double>::infinity();
    for (const auto& r : rows) {
        w.stream() << csv_num(r.eps) << ',' << csv_num(r.weight_exact) << ','
                   << csv_num(r.weight_expansion) << ',' << csv_num(r.weight_err) << ','
                   << csv_num(r.e_exact) << ',' << csv_num(r.e_pert) << ','
                   << csv_num(r.e_resid) << ',' << csv_num(r.resid_ratio) << '\n';
        if (r.resid_ratio > 0.0)
            min_ratio = std::min(min_ratio, r.resid_ratio);
    }
    if (!quiet)
        log << "ribbon: " << rows.size() << " thickness values, min residual ratio "
            << csv_num(min_ratio) << "\n";
    return 0;
}

int run_eigencheck(const RunConfig& cfg, std::ostream& log, bool quiet) {
    const SurfaceChart chart = build_chart(cfg.chart);
    const Grid2D grid = chart.make_grid(cfg.n1, cfg.n2);

    // Built-in smooth test function: two angular periods across the first
    // axis, a Gaussian profile along the second, mild offset dependence.
    const double a = 4.0 * M_PI / (grid.q1max - grid.q1min);
    const double zc = 0.5 * (grid.q2min + grid.q2max);
    ShellFunction f;
    auto base = [a, zc](double q1, double q2) {
        return std::cos(a * q1) * std::exp(-(q2 - zc) * (q2 - zc));
    };
    auto off = [](double q0) { return 1.0 + 0.5 * q0 + 0.25 * q0 * q0; };
    f.value = [=](double q0, double q1, double q2) { return base(q1, q2) * off(q0); };
    f.d0 = [=](double q0, double q1, double q2) {
        return base(q1, q2) * (0.5 + 0.5 * q0);
    };
    f.d00 = [=](double, double q1, double q2) { return base(q1, q2) * 0.5; };
    f.d1 = [=](double q0, double q1, double q2) {
        return -a * std::sin(a * q1) * std::exp(-(q2 - zc) * (q2 - zc)) * off(q0);
    };
    f.d11 = [=](double q0, double q1, double q2) {
        return -a * a * base(q1, q2) * off(q0);
    };
    f.d2 = [=](double q0, double q1, double q2) {
        return base(q1, q2) * (-2.0 * (q2 - zc)) * off(q0);
    };
    f.d22 = [=](double q0, double q1, double q2) {
        return base(q1, q2) * (4.0 * (q2 - zc) * (q2 - zc) - 2.0) * off(q0);
    };
    f.d12 = [=](double q0, double q1, double q2) {
        return -a * std::sin(a * q1) * std::exp(-(q2 - zc) * (q2 - zc)) *
               (-2.0 * (q2 - zc)) * off(q0);
    };

    CsvWriter w(out_path(cfg, "eigencheck.csv"), csv_header(cfg));
    w.stream() << "q0,residual,ratio\n";
    double q0 = cfg.eigencheck_q0;
    double prev = 0.0;
    double min_ratio = std::numeric_limits<double>::infinity();
    for (int i = 0; i < cfg.eigencheck_halvings; ++i, q0 *= 0.5) {
        const double resid = verify_laplacian_expansion(chart, grid, f, q0);
        const double ratio = i == 0 ? 0.0 : prev / resid;
        w.stream() << csv_num(q0) << ',' << csv_num(resid) << ',' << csv_num(ratio) << '\n';
        if (i > 0)
            min_ratio = std::min(min_ratio, ratio);
        prev = resid;
    }
    if (!quiet)
        log << "eigencheck: min truncation-residual ratio per halving "
            << csv_num(min_ratio) << "\n";
    return 0;
}

} // namespace

int run(const RunConfig& cfg, Subcommand subcommand, std::ostream& log, bool quiet) {
    try {
        switch (subcommand) {
        case Subcommand::Geometry: return run_geometry(cfg, log, quiet);
        case Subcommand::Modes: return run_modes(cfg, log, quiet);
        case Subcommand::Evolve: return run_evolve(cfg, log, quiet);
        case Subcommand::Ribbon: return run_ribbon(cfg, log, quiet);
        case Subcommand::Eigencheck: return run_eigencheck(cfg, log, quiet);
        }
    } catch (const CflError& e) {
        log << "numerical failure: " << e.what() << "\n";
        return 2;
    } catch (const SolverError& e) {
        log << "numerical failure: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        log << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}

} // namespace thinshell
