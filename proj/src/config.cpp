#include "thinshell/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "thinshell/csv.hpp"

namespace thinshell {

std::string to_string(Subcommand s) {
    switch (s) {
    case Subcommand::Geometry: return "geometry";
    case Subcommand::Modes: return "modes";
    case Subcommand::Evolve: return "evolve";
    case Subcommand::Ribbon: return "ribbon";
    case Subcommand::Eigencheck: return "eigencheck";
    }
    return "?";
}

std::optional<Subcommand> subcommand_from_string(const std::string& name) {
    if (name == "geometry") return Subcommand::Geometry;
    if (name == "modes") return Subcommand::Modes;
    if (name == "evolve") return Subcommand::Evolve;
    if (name == "ribbon") return Subcommand::Ribbon;
    if (name == "eigencheck") return Subcommand::Eigencheck;
    return std::nullopt;
}

namespace {

struct RawEntry {
    std::string value;
    int line = 0;
    int col = 0;
};

struct RawConfig {
    std::map<std::string, std::vector<RawEntry>> entries; // "section.key" -> values
};

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    std::size_t e = s.find_last_not_of(" \t\r");
    if (b == std::string::npos)
        return "";
    return s.substr(b, e - b + 1);
}

// Line-oriented "[section]" / "key = value" syntax with '#' comments.
std::optional<RawConfig> tokenize(const std::string& text, std::vector<ConfigIssue>& issues) {
    RawConfig raw;
    std::string section;
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const std::size_t hash = line.find('#');
        std::string body = hash == std::string::npos ? line : line.substr(0, hash);
        const std::string t = trim(body);
        if (t.empty())
            continue;
        if (t.front() == '[') {
            if (t.back() != ']' || t.size() < 3) {
                issues.push_back({lineno, 1, "syntax error: malformed section header"});
                return std::nullopt;
            }
            section = trim(t.substr(1, t.size() - 2));
            continue;
        }
        const std::size_t eq = body.find('=');
        if (eq == std::string::npos) {
            issues.push_back(
                {lineno, static_cast<int>(body.find_first_not_of(" \t") + 1),
                 "syntax error: expected 'key = value'"});
            return std::nullopt;
        }
        const std::string key = trim(body.substr(0, eq));
        const std::string value = trim(body.substr(eq + 1));
        if (key.empty()) {
            issues.push_back({lineno, 1, "syntax error: empty key"});
            return std::nullopt;
        }
        const std::string full = section.empty() ? key : section + "." + key;
        raw.entries[full].push_back({value, lineno, static_cast<int>(eq + 2)});
    }
    return raw;
}

class Reader {
public:
    Reader(RawConfig raw, std::vector<ConfigIssue>& issues)
        : raw_(std::move(raw)), issues_(issues) {}

    bool has(const std::string& key) const { return raw_.entries.count(key) > 0; }

    std::optional<std::string> take_string(const std::string& key) {
        auto it = raw_.entries.find(key);
        if (it == raw_.entries.end())
            return std::nullopt;
        consumed_.insert(key);
        return it->second.back().value;
    }

    std::optional<double> take_number(const std::string& key) {
        auto it = raw_.entries.find(key);
        if (it == raw_.entries.end())
            return std::nullopt;
        consumed_.insert(key);
        const RawEntry& e = it->second.back();
        try {
            std::size_t pos = 0;
            const double v = std::stod(e.value, &pos);
            if (pos != e.value.size()) {
                issues_.push_back({e.line, e.col, "not a number: '" + e.value + "' (" + key + ")"});
                return std::nullopt;
            }
            return v;
        } catch (const std::exception&) {
            issues_.push_back({e.line, e.col, "not a number: '" + e.value + "' (" + key + ")"});
            return std::nullopt;
        }
    }

    std::optional<int> take_int(const std::string& key) {
        const auto v = take_number(key);
        if (!v)
            return std::nullopt;
        if (*v != std::floor(*v)) {
            issues_.push_back({0, 0, "expected an integer (" + key + ")"});
            return std::nullopt;
        }
        return static_cast<int>(*v);
    }

    std::optional<bool> take_bool(const std::string& key) {
        const auto v = take_string(key);
        if (!v)
            return std::nullopt;
        if (*v == "true" || *v == "1" || *v == "yes")
            return true;
        if (*v == "false" || *v == "0" || *v == "no")
            return false;
        issues_.push_back({0, 0, "expected a boolean (" + key + ")"});
        return std::nullopt;
    }

    std::vector<RawEntry> take_all(const std::string& key) {
        auto it = raw_.entries.find(key);
        if (it == raw_.entries.end())
            return {};
        consumed_.insert(key);
        return it->second;
    }

    void report_unknown() {
        for (const auto& [key, entries] : raw_.entries) {
            if (consumed_.count(key))
                continue;
            issues_.push_back({entries.front().line, 1, "unknown key '" + key + "'"});
        }
    }

private:
    RawConfig raw_;
    std::vector<ConfigIssue>& issues_;
    std::set<std::string> consumed_;
};

} // namespace

ParseResult parse_config(const std::string& text) {
    ParseResult result;
    auto raw = tokenize(text, result.issues);
    if (!raw)
        return result;

    Reader rd(std::move(*raw), result.issues);
    RunConfig cfg;
    auto issue = [&](const std::string& msg) { result.issues.push_back({0, 0, msg}); };

    if (const auto v = rd.take_int("schema_version")) {
        cfg.schema_version = *v;
        if (*v != 1)
            issue("unsupported schema_version " + std::to_string(*v));
    }
    if (const auto v = rd.take_string("subcommand")) {
        cfg.subcommand = subcommand_from_string(*v);
        if (!cfg.subcommand)
            issue("unknown subcommand '" + *v + "' (subcommand)");
    }

    // chart
    if (const auto v = rd.take_string("chart.kind")) {
        const auto kind = chart_kind_from_string(*v);
        if (!kind)
            issue("unknown chart kind '" + *v + "' (chart.kind)");
        else
            cfg.chart.kind = *kind;
    }
    if (const auto v = rd.take_number("chart.radius")) cfg.chart.radius = *v;
    if (const auto v = rd.take_number("chart.major_radius")) cfg.chart.major_radius = *v;
    if (const auto v = rd.take_number("chart.minor_radius")) cfg.chart.minor_radius = *v;
    if (const auto v = rd.take_number("chart.polar_cap")) cfg.chart.polar_cap = *v;
    if (const auto v = rd.take_number("chart.q1min")) cfg.chart.q1min = *v;
    if (const auto v = rd.take_number("chart.q1max")) cfg.chart.q1max = *v;
    if (const auto v = rd.take_number("chart.q2min")) cfg.chart.q2min = *v;
    if (const auto v = rd.take_number("chart.q2max")) cfg.chart.q2max = *v;
    if (const auto v = rd.take_number("chart.zmin")) cfg.chart.q2min = *v; // cylinder alias
    if (const auto v = rd.take_number("chart.zmax")) cfg.chart.q2max = *v;
    if (const auto v = rd.take_bool("chart.periodic1")) cfg.chart.periodic1 = *v;
    if (const auto v = rd.take_bool("chart.periodic2")) cfg.chart.periodic2 = *v;
    for (const RawEntry& e : rd.take_all("chart.term")) {
        std::istringstream ts(e.value);
        FourierTerm term;
        if (!(ts >> term.k1 >> term.k2 >> term.amplitude)) {
            result.issues.push_back(
                {e.line, e.col, "chart.term expects 'k1 k2 amplitude [phase]'"});
            continue;
        }
        ts >> term.phase; // optional
        cfg.chart.terms.push_back(term);
    }

    // grid
    if (const auto v = rd.take_int("grid.n1")) cfg.n1 = *v;
    if (const auto v = rd.take_int("grid.n2")) cfg.n2 = *v;
    if (cfg.n1 < 8 || cfg.n2 < 8)
        issue("grid node counts must be >= 8 (grid.n1, grid.n2)");

    // physics
    if (const auto v = rd.take_string("physics.kind")) {
        if (*v == "classical")
            cfg.physics_kind = ModelKind::Classical;
        else if (*v == "quantum")
            cfg.physics_kind = ModelKind::Quantum;
        else
            issue("physics.kind must be 'classical' or 'quantum'");
    }
    if (const auto v = rd.take_number("physics.diffusion")) cfg.physics.diffusion = *v;
    if (const auto v = rd.take_number("physics.hbar")) cfg.physics.hbar = *v;
    if (const auto v = rd.take_number("physics.mass")) cfg.physics.mass = *v;
    if (const auto v = rd.take_number("physics.epsilon")) cfg.physics.eps = *v;
    if (const auto v = rd.take_int("physics.level")) cfg.physics.level = *v;
    if (const auto v = rd.take_string("physics.potential")) cfg.potential_spec = *v;

    if (!(cfg.physics.hbar > 0.0)) issue("physics.hbar must be positive");
    if (!(cfg.physics.mass > 0.0)) issue("physics.mass must be positive");
    if (!(cfg.physics.diffusion > 0.0)) issue("physics.diffusion must be positive");
    if (!(cfg.physics.eps > 0.0)) issue("physics.epsilon must be positive");
    if (cfg.physics.level < 1) issue("physics.level must be >= 1");

    if (cfg.potential_spec != "none" && cfg.potential_spec.rfind("constant:", 0) != 0 &&
        cfg.potential_spec.rfind("file:", 0) != 0)
        issue("physics.potential must be 'none', 'constant:<value>' or 'file:<path>'");
    if (cfg.potential_spec.rfind("file:", 0) == 0) {
        const std::string path = cfg.potential_spec.substr(5);
        if (!std::filesystem::exists(path))
            issue("potential file does not exist: " + path);
    }

    // time
    if (const auto v = rd.take_number("time.dt")) cfg.dt = *v;
    if (const auto v = rd.take_int("time.steps")) cfg.steps = *v;
    if (const auto v = rd.take_int("time.snapshot_stride")) cfg.snapshot_stride = *v;
    if (const auto v = rd.take_string("time.scheme")) {
        if (*v == "implicit")
            cfg.implicit = true;
        else if (*v != "rk4")
            issue("time.scheme must be 'rk4' or 'implicit'");
    }
    if (!(cfg.dt > 0.0)) issue("time.dt must be positive");
    if (cfg.steps < 1) issue("time.steps must be >= 1");
    if (cfg.snapshot_stride < 0) issue("time.snapshot_stride must be >= 0");

    // initial
    if (const auto v = rd.take_number("initial.amplitude")) cfg.initial.amplitude = *v;
    if (const auto v = rd.take_int("initial.m1")) cfg.initial.m1 = *v;
    if (const auto v = rd.take_int("initial.m2")) cfg.initial.m2 = *v;

    // modes
    if (const auto v = rd.take_int("modes.max_level")) cfg.modes_max_level = *v;
    if (cfg.modes_max_level < 1) issue("modes.max_level must be >= 1");

    // eigencheck
    if (const auto v = rd.take_number("eigencheck.q0_start")) cfg.eigencheck_q0 = *v;
    if (const auto v = rd.take_int("eigencheck.halvings")) cfg.eigencheck_halvings = *v;
    if (!(cfg.eigencheck_q0 > 0.0)) issue("eigencheck.q0_start must be positive");
    if (cfg.eigencheck_halvings < 1) issue("eigencheck.halvings must be >= 1");

    // ribbon
    if (const auto v = rd.take_number("ribbon.thickness")) cfg.ribbon_thickness = *v;
    if (const auto v = rd.take_int("ribbon.m_wave")) cfg.ribbon_m_wave = *v;
    if (const auto v = rd.take_int("ribbon.level")) cfg.ribbon_level = *v;
    if (const auto v = rd.take_int("ribbon.halvings")) cfg.ribbon_halvings = *v;
    if (cfg.ribbon_level < 1) issue("ribbon.level must be >= 1");
    if (cfg.ribbon_halvings < 1) issue("ribbon.halvings must be >= 1");

    // output / tolerances
    if (const auto v = rd.take_string("output.dir")) cfg.out_dir = *v;
    if (const auto v = rd.take_number("tolerances.identity")) cfg.tol.identity = *v;
    if (const auto v = rd.take_number("tolerances.solver")) cfg.tol.solver = *v;

    rd.report_unknown();

    // Chart-level validation, including the shell bound eps * max|kappa| < 1.
    try {
        const SurfaceChart chart = build_chart(cfg.chart);
        const double max_kappa = chart.max_principal_curvature();
        if (cfg.physics.eps > 0.0 && cfg.physics.eps * max_kappa >= 1.0) {
            std::ostringstream os;
            os << "shell self-intersection: epsilon*kappa = "
               << cfg.physics.eps * max_kappa << " >= 1 (physics.epsilon, chart)";
            issue(os.str());
        }
    } catch (const ChartError& e) {
        issue(std::string(e.what()) + " (chart)");
    }

    if (!result.issues.empty())
        return result;
    result.config = cfg;
    return result;
}

std::vector<std::string> resolved_config_lines(const RunConfig& cfg) {
    std::vector<std::string> out;
    auto add = [&](const std::string& k, const std::string& v) { out.push_back(k + " = " + v); };
    add("schema_version", std::to_string(cfg.schema_version));
    if (cfg.subcommand)
        add("subcommand", to_string(*cfg.subcommand));
    add("chart.kind", to_string(cfg.chart.kind));
    add("chart.radius", csv_num(cfg.chart.radius));
    add("chart.major_radius", csv_num(cfg.chart.major_radius));
    add("chart.minor_radius", csv_num(cfg.chart.minor_radius));
    add("chart.polar_cap", csv_num(cfg.chart.polar_cap));
    add("chart.q1min", csv_num(cfg.chart.q1min));
    add("chart.q1max", csv_num(cfg.chart.q1max));
    add("chart.q2min", csv_num(cfg.chart.q2min));
    add("chart.q2max", csv_num(cfg.chart.q2max));
    for (const auto& t : cfg.chart.terms)
        add("chart.term", csv_num(t.k1) + " " + csv_num(t.k2) + " " + csv_num(t.amplitude) +
                              " " + csv_num(t.phase));
    add("grid.n1", std::to_string(cfg.n1));
    add("grid.n2", std::to_string(cfg.n2));
    add("physics.kind", cfg.physics_kind == ModelKind::Classical ? "classical" : "quantum");
    add("physics.diffusion", csv_num(cfg.physics.diffusion));
    add("physics.hbar", csv_num(cfg.physics.hbar));
    add("physics.mass", csv_num(cfg.physics.mass));
    add("physics.epsilon", csv_num(cfg.physics.eps));
    add("physics.level", std::to_string(cfg.physics.level));
    add("physics.potential", cfg.potential_spec);
    add("time.dt", csv_num(cfg.dt));
    add("time.steps", std::to_string(cfg.steps));
    add("time.snapshot_stride", std::to_string(cfg.snapshot_stride));
    add("time.scheme", cfg.implicit ? "implicit" : "rk4");
    add("initial.amplitude", csv_num(cfg.initial.amplitude));
    add("initial.m1", std::to_string(cfg.initial.m1));
    add("initial.m2", std::to_string(cfg.initial.m2));
    add("modes.max_level", std::to_string(cfg.modes_max_level));
    add("eigencheck.q0_start", csv_num(cfg.eigencheck_q0));
    add("eigencheck.halvings", std::to_string(cfg.eigencheck_halvings));
    add("ribbon.thickness", csv_num(cfg.ribbon_thickness));
    add("ribbon.m_wave", std::to_string(cfg.ribbon_m_wave));
    add("ribbon.level", std::to_string(cfg.ribbon_level));
    add("ribbon.halvings", std::to_string(cfg.ribbon_halvings));
    add("tolerances.identity", csv_num(cfg.tol.identity));
    add("tolerances.solver", csv_num(cfg.tol.solver));
    return out;
}

RealField load_potential(const RunConfig& cfg, const Grid2D& grid) {
    if (cfg.potential_spec == "none")
        return {};
    if (cfg.potential_spec.rfind("constant:", 0) == 0) {
        const double v = std::stod(cfg.potential_spec.substr(9));
        return RealField(grid.size(), v);
    }
    // file:<path> with one value per line (node order i*n2+j), '#' comments.
    const std::string path = cfg.potential_spec.substr(5);
    std::ifstream is(path);
    if (!is)
        throw std::runtime_error("cannot open potential file: " + path);
    RealField out;
    out.reserve(grid.size());
    std::string line;
    while (std::getline(is, line)) {
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#')
            continue;
        out.push_back(std::stod(t));
    }
    if (out.size() != grid.size())
        throw std::runtime_error("potential file has " + std::to_string(out.size()) +
                                 " values, expected " + std::to_string(grid.size()));
    return out;
}

} // namespace thinshell
