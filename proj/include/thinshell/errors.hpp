#pragma once

#include <stdexcept>
#include <string>

namespace thinshell {

// Invalid chart description or chart/grid mismatch.
class ChartError : public std::invalid_argument {
public:
    explicit ChartError(const std::string& what) : std::invalid_argument(what) {}
};

class GridError : public std::invalid_argument {
public:
    explicit GridError(const std::string& what) : std::invalid_argument(what) {}
};

// Explicit time step exceeds the stability bound.
class CflError : public std::runtime_error {
public:
    explicit CflError(const std::string& what) : std::runtime_error(what) {}
};

// Iterative linear or eigenvalue solve failed to converge.
class SolverError : public std::runtime_error {
public:
    explicit SolverError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace thinshell
