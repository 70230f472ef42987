#include "thinshell/version.hpp"

#ifndef THINSHELL_VERSION
#define THINSHELL_VERSION "0.1.0"
#endif

namespace thinshell {

const char* version() { return "thinshell " THINSHELL_VERSION; }

} // namespace thinshell
