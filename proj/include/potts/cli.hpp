#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace potts::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitViolation = 1;
inline constexpr int kExitInputError = 2;

// Runs the command line `args` (args[0] is the program name). Reports go to
// `out` as JSON lines with a summary object last; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace potts::cli
