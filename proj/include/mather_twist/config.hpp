#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "mather_twist/generating_function.hpp"

namespace mather_twist {

/// Resolved tool configuration. Key names in the file format are given next
/// to each field.
struct ToolConfig {
    GeneratingFunctionSpec gf;  ///< family, k, expr, coercivity_window
    double tol_residual = 1e-10;  ///< tol.residual
    double tol_barrier = 1e-9;    ///< tol.barrier
    double joint_tol = 1e-3;      ///< joint_tol
    int grid_a = 64;              ///< grid.a
    int grid_dp = 64;             ///< grid.dp
    int farey_order = 8;          ///< farey_order
    int cf_depth = 8;             ///< cf.depth
    int dp_n = 16;                ///< dp.N
    int restarts = 8;             ///< restarts
    std::uint64_t seed = 0;       ///< seed
};

/// Parses `key = value` lines; `#` starts a comment, strings may be quoted.
/// Throws UsageError with the line number on malformed input, unknown or
/// repeated keys, and with the key name when a value violates its bounds.
ToolConfig parse_config(std::string_view text, const std::string& source = "<config>");

/// Reads and parses a config file. A missing file is a UsageError.
ToolConfig load_config(const std::string& path);

/// Checks the bounds of every field; throws UsageError naming the key.
void validate_config(const ToolConfig& cfg);

/// Canonical `key = value` rendering of every field, one per line.
std::string render_config(const ToolConfig& cfg);

}  // namespace mather_twist
