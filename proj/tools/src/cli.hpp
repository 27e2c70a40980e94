#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace srcpool::cli {

/// Exit codes of `run`.
inline constexpr int kOk = 0;
inline constexpr int kRuntimeError = 1;
inline constexpr int kConfigError = 2;

/// Entry point of the command-line tool, minus argv[0]. The first line
/// written to `out` is the fully resolved command ("# runspec: srcpool ..."),
/// which can be passed back verbatim to reproduce the run.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Splits an echoed runspec line back into arguments.
std::vector<std::string> parse_runspec(const std::string& line);

}  // namespace srcpool::cli
