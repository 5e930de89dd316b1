#pragma once

#include <iosfwd>

namespace ppinfer {

/// Exit codes of the command-line tool.
enum ExitCode : int { kExitOk = 0, kExitUsage = 2, kExitData = 3, kExitNumerical = 4 };

/// Entry point of the `ppinfer` tool; "-" as an input path reads `in`.
int cli_main(int argc, const char* const* argv, std::istream& in, std::ostream& out,
             std::ostream& err);

}  // namespace ppinfer
