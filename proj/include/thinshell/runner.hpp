#pragma once

#include <iosfwd>

#include "thinshell/config.hpp"

namespace thinshell {

// Executes one subcommand and writes the CSV artifacts into cfg.out_dir.
// Returns 0 on success, 1 on validation failure, 2 on numerical failure
// (CFL violation or solver non-convergence).  Prints a one-line summary per
// artifact to `log` unless quiet.
int run(const RunConfig& cfg, Subcommand subcommand, std::ostream& log, bool quiet = false);

} // namespace thinshell
