#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "thinshell/runner.hpp"
#include "thinshell/threads.hpp"
#include "thinshell/version.hpp"

namespace {

int run_subcommand(thinshell::Subcommand sub, const std::string& config_path,
                   const std::string& out_dir, bool quiet) {
    std::ifstream is(config_path);
    if (!is) {
        std::cerr << "error: cannot open config file: " << config_path << "\n";
        return 1;
    }
    std::stringstream buffer;
    buffer << is.rdbuf();

    const thinshell::ParseResult parsed = thinshell::parse_config(buffer.str());
    if (!parsed.ok()) {
        std::cerr << "config validation failed (" << parsed.issues.size() << " issue"
                  << (parsed.issues.size() == 1 ? "" : "s") << "):\n";
        for (const auto& issue : parsed.issues) {
            std::cerr << "  ";
            if (issue.line > 0)
                std::cerr << config_path << ":" << issue.line << ":" << issue.col << ": ";
            std::cerr << issue.message << "\n";
        }
        return 1;
    }

    thinshell::RunConfig cfg = *parsed.config;
    if (cfg.subcommand && *cfg.subcommand != sub) {
        std::cerr << "error: config names subcommand '" << to_string(*cfg.subcommand)
                  << "' but '" << to_string(sub) << "' was requested\n";
        return 1;
    }
    if (!out_dir.empty())
        cfg.out_dir = out_dir;
    return thinshell::run(cfg, sub, std::cout, quiet);
}

} // namespace

int main(int argc, char** argv) {
    if (const char* env = std::getenv("THINSHELL_THREADS"))
        thinshell::set_worker_threads(std::atoi(env));

    CLI::App app{std::string(thinshell::version()) +
                 " - transport on thin curved shells (geometry, transverse modes, "
                 "effective evolution, ribbon checks)"};
    app.set_version_flag("--version", thinshell::version());
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    bool quiet = false;
    app.add_option("--config", config_path, "path to the run configuration")->required();
    app.add_option("--out", out_dir, "output directory (overrides output.dir)");
    app.add_flag("--quiet", quiet, "suppress the summary line");

    struct Sub {
        const char* name;
        const char* help;
        thinshell::Subcommand id;
    };
    const Sub subs[] = {
        {"geometry", "export per-node geometry and curvature potentials", thinshell::Subcommand::Geometry},
        {"modes", "tabulate transverse modes", thinshell::Subcommand::Modes},
        {"evolve", "time-evolve the effective 2D field", thinshell::Subcommand::Evolve},
        {"ribbon", "bent-ribbon flux and energy report", thinshell::Subcommand::Ribbon},
        {"eigencheck", "offset-expansion truncation check", thinshell::Subcommand::Eigencheck},
    };
    for (const Sub& s : subs)
        app.add_subcommand(s.name, s.help)->fallthrough();

    CLI11_PARSE(app, argc, argv);

    for (const Sub& s : subs) {
        if (app.got_subcommand(s.name))
            return run_subcommand(s.id, config_path, out_dir, quiet);
    }
    return 1;
}
