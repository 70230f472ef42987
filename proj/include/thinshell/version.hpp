#pragma once

namespace thinshell {

// Build version string (git describe when available).
const char* version();

} // namespace thinshell
