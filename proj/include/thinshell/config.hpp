#pragma once

#include <optional>
#include <string>
#include <vector>

#include "thinshell/chart.hpp"
#include "thinshell/evolve.hpp"
#include "thinshell/ribbon.hpp"

namespace thinshell {

enum class Subcommand { Geometry, Modes, Evolve, Ribbon, Eigencheck };

std::string to_string(Subcommand s);
std::optional<Subcommand> subcommand_from_string(const std::string& name);

struct ToleranceConfig {
    double identity = 1e-8; // curvature identity check in the geometry summary
    double solver = 1e-14;  // relative residual for linear solves
};

struct InitialCondition {
    double amplitude = 0.5; // classical bump amplitude
    int m1 = 1, m2 = 2;     // quantum plane-wave indices along axis 1
};

// Fully resolved run description.  Defaults are centralized here and in
// the README's configuration table.
struct RunConfig {
    int schema_version = 1;
    std::optional<Subcommand> subcommand;

    ChartSpec chart;
    int n1 = 64, n2 = 64;

    ModelKind physics_kind = ModelKind::Classical;
    PhysicsParams physics{1.0, 1.0, 1.0, 0.05, 1};
    std::string potential_spec = "none"; // none | constant:<v> | file:<path>

    double dt = 1e-3;
    int steps = 100;
    int snapshot_stride = 0;
    bool implicit = false;

    InitialCondition initial;

    int modes_max_level = 8;

    double eigencheck_q0 = 0.04;
    int eigencheck_halvings = 3;

    double ribbon_thickness = 0.0; // 0 = use physics.eps
    int ribbon_m_wave = 1;
    int ribbon_level = 1;
    int ribbon_halvings = 3;

    std::string out_dir = "out";
    ToleranceConfig tol;
};

struct ConfigIssue {
    int line = 0; // 0 when the issue is semantic rather than positional
    int col = 0;
    std::string message;
};

// Either a validated config, or the full list of violations (syntax errors
// report line and column; semantic checks are all evaluated, not just the
// first).
struct ParseResult {
    std::optional<RunConfig> config;
    std::vector<ConfigIssue> issues;
    bool ok() const { return config.has_value(); }
};

ParseResult parse_config(const std::string& text);

// Deterministic one-line-per-key rendering of a resolved config, used in the
// CSV metadata headers.
std::vector<std::string> resolved_config_lines(const RunConfig& cfg);

// Materializes the external potential field (may be empty for V = 0).
RealField load_potential(const RunConfig& cfg, const Grid2D& grid);

} // namespace thinshell
