#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "thinshell/config.hpp"
#include "thinshell/runner.hpp"

using namespace thinshell;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream is(path);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

} // namespace

TEST_CASE("minimal config parses with defaults") {
    const ParseResult r = parse_config("schema_version = 1\n"
                                       "[chart]\n"
                                       "kind = plane\n");
    REQUIRE(r.ok());
    CHECK(r.config->chart.kind == ChartKind::Plane);
    CHECK(r.config->n1 == 64);
    CHECK(r.config->physics_kind == ModelKind::Classical);
    CHECK(r.config->dt == 1e-3);
    CHECK(r.config->out_dir == "out");
}

TEST_CASE("self-intersecting shell is rejected") {
    const ParseResult r = parse_config("[chart]\n"
                                       "kind = cylinder\n"
                                       "radius = 0.4\n"
                                       "[physics]\n"
                                       "epsilon = 0.5\n");
    REQUIRE_FALSE(r.ok());
    bool found = false;
    for (const auto& issue : r.issues)
        found = found || issue.message.find("self-intersection") != std::string::npos;
    CHECK(found);
}

TEST_CASE("unknown chart kind names the offending key") {
    const ParseResult r = parse_config("[chart]\nkind = banana\n");
    REQUIRE_FALSE(r.ok());
    REQUIRE(r.issues.size() >= 1);
    CHECK(r.issues.front().message.find("chart.kind") != std::string::npos);
    CHECK(r.issues.front().message.find("banana") != std::string::npos);
}

TEST_CASE("syntax errors carry line and column") {
    const ParseResult r = parse_config("[chart]\nkind = plane\nthis line has no equals\n");
    REQUIRE_FALSE(r.ok());
    CHECK(r.issues.front().line == 3);
    CHECK(r.issues.front().col >= 1);
    CHECK(r.issues.front().message.find("syntax") != std::string::npos);
}

TEST_CASE("all semantic violations are collected, not just the first") {
    const ParseResult r = parse_config("[chart]\n"
                                       "kind = torus\n"
                                       "major_radius = 0.2\n"
                                       "minor_radius = 0.5\n"
                                       "[grid]\n"
                                       "n1 = 4\n"
                                       "[physics]\n"
                                       "mass = -1\n"
                                       "[time]\n"
                                       "dt = -0.5\n"
                                       "mystery_key = 7\n");
    REQUIRE_FALSE(r.ok());
    CHECK(r.issues.size() >= 4); // grid, mass, dt, unknown key, chart radii
}

TEST_CASE("unknown keys are reported by full name") {
    const ParseResult r = parse_config("[chart]\nkind = plane\nwobble = 3\n");
    REQUIRE_FALSE(r.ok());
    bool found = false;
    for (const auto& issue : r.issues)
        found = found || issue.message.find("chart.wobble") != std::string::npos;
    CHECK(found);
}

TEST_CASE("graph terms parse into the chart spec") {
    const ParseResult r = parse_config("[chart]\n"
                                       "kind = graph\n"
                                       "term = 6.283185307179586 0 0.05\n"
                                       "term = 6.283185307179586 12.566370614359172 0.02 0.4\n"
                                       "periodic1 = true\n"
                                       "periodic2 = true\n");
    REQUIRE(r.ok());
    REQUIRE(r.config->chart.terms.size() == 2);
    CHECK(r.config->chart.terms[1].phase == doctest::Approx(0.4));
}

TEST_CASE("runner writes deterministic artifacts") {
    const std::string dir = std::filesystem::temp_directory_path() / "thinshell_test_out";
    std::filesystem::remove_all(dir);

    ParseResult parsed = parse_config("[chart]\n"
                                      "kind = plane\n"
                                      "[grid]\n"
                                      "n1 = 16\n"
                                      "n2 = 16\n"
                                      "[physics]\n"
                                      "kind = classical\n"
                                      "diffusion = 0.001\n"
                                      "epsilon = 0.05\n"
                                      "[time]\n"
                                      "dt = 0.01\n"
                                      "steps = 20\n");
    REQUIRE(parsed.ok());
    RunConfig cfg = *parsed.config;
    cfg.out_dir = dir + "/a";
    std::ostringstream log;
    REQUIRE(run(cfg, Subcommand::Evolve, log, true) == 0);
    cfg.out_dir = dir + "/b";
    REQUIRE(run(cfg, Subcommand::Evolve, log, true) == 0);

    const std::string a = read_file(dir + "/a/evolve.csv");
    const std::string b = read_file(dir + "/b/evolve.csv");
    REQUIRE_FALSE(a.empty());
    CHECK(a == b); // byte-identical output for identical configs

    // total charge column stays constant to 1e-12
    std::istringstream is(a);
    std::string line;
    double first = 0.0;
    bool have_first = false;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#' || line[0] == 't')
            continue;
        const auto c1 = line.find(',');
        const auto c2 = line.find(',', c1 + 1);
        const double q = std::stod(line.substr(c1 + 1, c2 - c1 - 1));
        if (!have_first) {
            first = q;
            have_first = true;
        }
        CHECK(std::abs(q - first) <= 1e-12 * std::abs(first));
    }
    CHECK(have_first);
    std::filesystem::remove_all(dir);
}

TEST_CASE("modes artifact lists the level-1 moment") {
    const std::string dir =
        (std::filesystem::temp_directory_path() / "thinshell_modes_out").string();
    std::filesystem::remove_all(dir);
    ParseResult parsed = parse_config("[chart]\nkind = plane\n");
    REQUIRE(parsed.ok());
    RunConfig cfg = *parsed.config;
    cfg.out_dir = dir;
    std::ostringstream log;
    REQUIRE(run(cfg, Subcommand::Modes, log, true) == 0);
    const std::string table = read_file(dir + "/modes.csv");
    CHECK(table.find("0.032672741512164") != std::string::npos);
    std::filesystem::remove_all(dir);
}

TEST_CASE("numerical failures map to exit code 2") {
    ParseResult parsed = parse_config("[chart]\n"
                                      "kind = plane\n"
                                      "[physics]\n"
                                      "kind = classical\n"
                                      "diffusion = 1.0\n"
                                      "epsilon = 0.05\n"
                                      "[time]\n"
                                      "dt = 10.0\n" // far beyond the RK4 bound
                                      "steps = 2\n");
    REQUIRE(parsed.ok());
    RunConfig cfg = *parsed.config;
    cfg.out_dir =
        (std::filesystem::temp_directory_path() / "thinshell_cfl_out").string();
    std::ostringstream log;
    CHECK(run(cfg, Subcommand::Evolve, log, true) == 2);
    std::filesystem::remove_all(cfg.out_dir);
}

TEST_CASE("config subcommand must match the requested one") {
    ParseResult parsed = parse_config("subcommand = modes\n[chart]\nkind = plane\n");
    REQUIRE(parsed.ok());
    CHECK(parsed.config->subcommand == Subcommand::Modes);
}
