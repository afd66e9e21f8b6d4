#include "mather_twist/errors.hpp"

#include <cstdio>

namespace mather_twist {

namespace {
std::string fmt_window(double x, double xp, double window) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "lift gap |%.6g - %.6g| exceeds coercivity window %.6g",
                  xp, x, window);
    return buf;
}

std::string fmt_momentum(double x, double y, long step) {
    char buf[160];
    if (step >= 0)
        std::snprintf(buf, sizeof buf, "momentum out of range at step %ld: (x, y) = (%.6g, %.6g)",
                      step, x, y);
    else
        std::snprintf(buf, sizeof buf, "momentum out of range: (x, y) = (%.6g, %.6g)", x, y);
    return buf;
}
}  // namespace

WindowExceeded::WindowExceeded(double x_, double xp_, double window_)
    : std::domain_error(fmt_window(x_, xp_, window_)), x(x_), xp(xp_), window(window_) {}

MomentumOutOfRange::MomentumOutOfRange(double x_, double y_, long step_)
    : std::domain_error(fmt_momentum(x_, y_, step_)), x(x_), y(y_), step(step_) {}

}  // namespace mather_twist
