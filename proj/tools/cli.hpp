#ifndef PFC_TOOLS_CLI_HPP
#define PFC_TOOLS_CLI_HPP

#include <ostream>

namespace pfc::cli {

enum ExitCode : int { kPass = 0, kAssertion = 1, kInvalidInput = 2, kNonConvergence = 3 };

/// Runs one command; results go to out (or the --out file), diagnostics to err.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace pfc::cli

#endif  // PFC_TOOLS_CLI_HPP
