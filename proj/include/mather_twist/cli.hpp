#pragma once

#include <iosfwd>
#include <string>

namespace mather_twist {

inline constexpr const char* kToolVersion = "0.1.0";

enum ExitCode : int { exit_ok = 0, exit_usage = 1, exit_numerical = 2, exit_inconclusive = 3 };

/// Runs one subcommand (validate, map, orbit, minimize, barrier, circle, beta,
/// alpha, scan, connect). Output files and manifest.json go to --out.
int cli_dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// "golden" or a decimal literal.
double parse_omega(const std::string& s);

}  // namespace mather_twist
