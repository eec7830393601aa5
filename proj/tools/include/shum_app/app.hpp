#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace shum::app {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 2;
inline constexpr int kExitFit = 3;

/// Runs the command line `args` (without the program name). Reports go to the
/// output directory; tables and messages to `out` and `err`. Returns the exit
/// code. SHUM_OUT_DIR and SHUM_WORKERS supply defaults for --out and --workers.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace shum::app
