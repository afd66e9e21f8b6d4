#pragma once

#include <optional>
#include <string>

#include "mather_twist/expression.hpp"

namespace mather_twist {

enum class Family { standard, custom };

/// User-facing description of a generating function h(x, x').
struct GeneratingFunctionSpec {
    Family family = Family::standard;
    double k = 0.0;                   ///< coupling of the standard family
    std::string expr;                 ///< h(x, x') for the custom family
    double coercivity_window = 4.0;   ///< |x' - x| beyond this is treated as +inf
};

struct Partials {
    double d1, d2, d12;
};

/// First and second partial derivatives of h at one point.
struct Derivatives {
    double d1, d2, d11, d12, d22;
};

struct MomentumPair {
    double y;       ///< -d1 h(x, x')
    double y_next;  ///< d2 h(x, x')
};

/// Optional replacement derivative expressions for custom families. Only
/// useful for exercising the derivative self-check.
struct DerivativeOverrides {
    std::optional<Expression> d1, d2, d11, d12, d22;
};

/// A validated, ready-to-evaluate generating function of an exact twist map on
/// the cylinder. Periodic: h(x+1, x'+1) = h(x, x').
class GeneratingFunction {
public:
    explicit GeneratingFunction(const GeneratingFunctionSpec& spec,
                                const DerivativeOverrides& overrides = {});

    static GeneratingFunction standard(double k, double window = 4.0);
    static GeneratingFunction custom(const std::string& expr, double window = 4.0);

    const GeneratingFunctionSpec& spec() const { return spec_; }
    double window() const { return spec_.coercivity_window; }
    bool is_standard() const { return spec_.family == Family::standard; }
    double k() const { return spec_.k; }

    /// Throws WindowExceeded when |x' - x| > window.
    double operator()(double x, double xp) const;
    Partials partials(double x, double xp) const;
    Derivatives derivatives(double x, double xp) const;
    MomentumPair momenta(double x, double xp) const;

    void check_window(double x, double xp) const;

private:
    GeneratingFunctionSpec spec_;
    Expression h_, d1_, d2_, d11_, d12_, d22_;
};

struct TwistReport {
    double min_twist;  ///< min of -d12 h over the grid
    double at_x, at_xp;
    bool pass;
};

/// Samples -d12 h on a grid_n x grid_n grid over [0,1) x [x - window, x + window].
TwistReport check_twist(const GeneratingFunction& h, int grid_n);

struct SelfCheckReport {
    bool pass;
    double worst_error;  ///< max scaled error seen
    double at_x, at_xp;
    std::string worst_quantity;  ///< "d1", "d2", "d11", "d12" or "d22"
};

/// Finite-difference step used by derivative_selfcheck.
inline constexpr double kFiniteDifferenceStep = 1e-5;

/// Compares analytic partials against central differences (d1, d2 from h;
/// second partials from the analytic first partials). A point passes when
/// |fd - analytic| <= tol * max(1, |analytic|) or the difference is below 1e-12.
SelfCheckReport derivative_selfcheck(const GeneratingFunction& h, double tol, int grid_n);

}  // namespace mather_twist
