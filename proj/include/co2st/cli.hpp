#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace co2st {

/// Exit codes of the command-line tool.
enum ExitCode : int {
    exit_ok = 0,
    exit_validation = 1,
    exit_io = 2,
};

/// Environment variable holding an RFC 3339 timestamp used instead of the
/// clock for new entries and report headers.
inline constexpr const char* now_env_var = "CO2ST_NOW";

/// Runs the command line `argv` (argv[0] is the program name). Results go to
/// `out`, diagnostics to `err`.
int run_cli(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err);

} // namespace co2st
