#pragma once

#include <cstddef>
#include <functional>

namespace thinshell {

// Global worker count used by node-parallel maps.  Operator applications are
// pure elementwise writes to disjoint indices, so results do not depend on
// the partitioning.  Default is 1 (serial).
void set_worker_threads(int n);
int worker_threads();

// Runs fn(begin, end) over chunks of [0, n) on the configured workers.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& fn);

} // namespace thinshell
