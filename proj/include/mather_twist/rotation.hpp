#pragma once

#include <optional>
#include <vector>

#include "mather_twist/twist_dynamics.hpp"
#include "mather_twist/variational.hpp"

namespace mather_twist {

/// (sqrt(5) - 1) / 2
inline constexpr double kGoldenMean = 0.61803398874989484820;

struct RotationEstimate {
    double value;
    /// Set when the orbit closes up: x_{i+q} = x_i + p for every available i.
    std::optional<RotationClass> exact;
};

/// Rotation number of a lifted orbit. Periodic orbits (closure within
/// `periodic_tol`) return p/q exactly; otherwise the mean advance over the
/// last 80% of the orbit.
RotationEstimate rotation_number(const OrbitSample& orbit, double periodic_tol = 1e-7);

struct ConvergentList {
    double omega;
    std::vector<RotationClass> entries;  ///< q increasing, each strictly inside (0, 1)
    bool terminated;                     ///< expansion ended before `depth` (omega rational)
};

/// Continued-fraction convergents of omega in (0, 1). A partial remainder
/// above 1e12 is treated as the end of a rational expansion.
ConvergentList convergents(double omega, int depth);

}  // namespace mather_twist
