#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace maiv::cli {

// Process exit statuses.
inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitIo = 3;
inline constexpr int kExitBackend = 4;

// Runs one command line (args[0] is the program name). Structured output
// goes to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace maiv::cli
