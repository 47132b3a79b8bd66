#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace sntk::cli {

/// Exit codes of run().
inline constexpr int kOk = 0;
inline constexpr int kUsage = 1;
inline constexpr int kNumerical = 2;

/// Runs one subcommand. `args` excludes the program name. Results go to
/// `out` (or the --out file), diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sntk::cli
