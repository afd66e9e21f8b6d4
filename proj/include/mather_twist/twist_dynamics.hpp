#pragma once

#include <vector>

#include "mather_twist/generating_function.hpp"

namespace mather_twist {

struct PhasePoint {
    double x;  ///< lifted angle
    double y;  ///< momentum
};

/// Orbit in lifted coordinates. points[0] is the seed; n = points.size() - 1 steps.
struct OrbitSample {
    std::vector<PhasePoint> points;
    long steps() const { return static_cast<long>(points.size()) - 1; }
};

/// One step of the twist map: solves y = -d1 h(x, x') for x' and returns
/// (x', d2 h(x, x')). Throws MomentumOutOfRange if x' is not bracketed inside
/// the coercivity window.
PhasePoint forward(const GeneratingFunction& h, double x, double y);

/// n forward steps from (x, y). The failing step index is attached to
/// MomentumOutOfRange.
OrbitSample iterate(const GeneratingFunction& h, double x, double y, long n);

/// Central-difference Jacobian determinant of (x, y) -> (x', y').
double jacobian_det(const GeneratingFunction& h, double x, double y, double step = 1e-5);

}  // namespace mather_twist
