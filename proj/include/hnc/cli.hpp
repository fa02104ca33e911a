#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace hnc {

enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitInvariant = 2 };

/// Subcommands: bound-sweep, k-study, compare, retrieve, selftest.
int cli_main(int argc, char** argv);

/// `args` excludes the program name.
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace hnc
