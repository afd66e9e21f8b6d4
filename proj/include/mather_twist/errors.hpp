#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace mather_twist {

/// Bad arguments or malformed input. Maps to CLI exit code 1.
class UsageError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A lift gap |x' - x| exceeded the coercivity window.
class WindowExceeded : public std::domain_error {
public:
    WindowExceeded(double x, double xp, double window);
    double x, xp, window;
};

/// The forward map could not bracket x' inside the coercivity window.
class MomentumOutOfRange : public std::domain_error {
public:
    MomentumOutOfRange(double x, double y, long step = -1);
    double x, y;
    long step;
};

/// An optimizer did not converge. Carries the best iterate it reached.
class NumericalFailure : public std::runtime_error {
public:
    NumericalFailure(const std::string& what, std::vector<double> best = {},
                     double best_residual = 0.0)
        : std::runtime_error(what), best_iterate(std::move(best)),
          best_residual(best_residual) {}
    std::vector<double> best_iterate;
    double best_residual;
};

}  // namespace mather_twist
