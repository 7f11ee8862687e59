#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace qmine {

/// Exit codes of the command line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitQuery = 1;  // parse, query and parameter errors
inline constexpr int kExitIo = 2;

/// Runs the qmine command line with args (without the program name).
int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err);

}  // namespace qmine
