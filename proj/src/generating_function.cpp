#include "mather_twist/generating_function.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "mather_twist/errors.hpp"

namespace mather_twist {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kFourPiSq = 4.0 * std::numbers::pi * std::numbers::pi;
}  // namespace

GeneratingFunction::GeneratingFunction(const GeneratingFunctionSpec& spec,
                                       const DerivativeOverrides& overrides)
    : spec_(spec) {
    if (!(spec_.coercivity_window > 0.0) || !std::isfinite(spec_.coercivity_window))
        throw UsageError("coercivity_window must be a positive finite number");
    if (spec_.family == Family::standard) {
        if (!(spec_.k >= 0.0) || !std::isfinite(spec_.k))
            throw UsageError("k must be >= 0 for the standard family");
        return;
    }
    if (spec_.expr.empty()) throw UsageError("custom family requires a non-empty expr");
    h_ = Expression::parse(spec_.expr);
    d1_ = overrides.d1.value_or(h_.derivative(Variable::x));
    d2_ = overrides.d2.value_or(h_.derivative(Variable::xp));
    d11_ = overrides.d11.value_or(d1_.derivative(Variable::x));
    d12_ = overrides.d12.value_or(d1_.derivative(Variable::xp));
    d22_ = overrides.d22.value_or(d2_.derivative(Variable::xp));
}

GeneratingFunction GeneratingFunction::standard(double k, double window) {
    return GeneratingFunction(GeneratingFunctionSpec{Family::standard, k, {}, window});
}

GeneratingFunction GeneratingFunction::custom(const std::string& expr, double window) {
    return GeneratingFunction(GeneratingFunctionSpec{Family::custom, 0.0, expr, window});
}

void GeneratingFunction::check_window(double x, double xp) const {
    if (!(std::abs(xp - x) <= spec_.coercivity_window))
        throw WindowExceeded(x, xp, spec_.coercivity_window);
}

double GeneratingFunction::operator()(double x, double xp) const {
    check_window(x, xp);
    if (spec_.family == Family::standard) {
        const double d = xp - x;
        return 0.5 * d * d - spec_.k / kFourPiSq * std::cos(kTwoPi * x);
    }
    return h_(x, xp);
}

Partials GeneratingFunction::partials(double x, double xp) const {
    check_window(x, xp);
    if (spec_.family == Family::standard) {
        const double d = xp - x;
        return {-d + spec_.k / kTwoPi * std::sin(kTwoPi * x), d, -1.0};
    }
    return {d1_(x, xp), d2_(x, xp), d12_(x, xp)};
}

Derivatives GeneratingFunction::derivatives(double x, double xp) const {
    check_window(x, xp);
    if (spec_.family == Family::standard) {
        const double d = xp - x;
        const double s = std::sin(kTwoPi * x), c = std::cos(kTwoPi * x);
        return {-d + spec_.k / kTwoPi * s, d, 1.0 + spec_.k * c, -1.0, 1.0};
    }
    return {d1_(x, xp), d2_(x, xp), d11_(x, xp), d12_(x, xp), d22_(x, xp)};
}

MomentumPair GeneratingFunction::momenta(double x, double xp) const {
    const Partials p = partials(x, xp);
    return {-p.d1, p.d2};
}

TwistReport check_twist(const GeneratingFunction& h, int grid_n) {
    if (grid_n < 2) throw UsageError("check_twist: grid_n must be >= 2");
    const double w = h.window();
    TwistReport rep{std::numeric_limits<double>::infinity(), 0.0, 0.0, false};
    for (int i = 0; i < grid_n; ++i) {
        const double x = static_cast<double>(i) / grid_n;
        for (int j = 0; j < grid_n; ++j) {
            const double xp = x - w + 2.0 * w * j / (grid_n - 1);
            const double t = -h.partials(x, xp).d12;
            if (t < rep.min_twist) rep = {t, x, xp, false};
        }
    }
    rep.pass = rep.min_twist > 0.0;
    return rep;
}

SelfCheckReport derivative_selfcheck(const GeneratingFunction& h, double tol, int grid_n) {
    if (!(tol > 0.0)) throw UsageError("derivative_selfcheck: tol must be > 0");
    if (grid_n < 2) throw UsageError("derivative_selfcheck: grid_n must be >= 2");
    const double e = kFiniteDifferenceStep;
    // keep the stencil inside the window
    const double w = h.window() - 2.0 * e;
    SelfCheckReport rep{true, 0.0, 0.0, 0.0, {}};
    const auto consider = [&](const char* what, double fd, double an, double x, double xp) {
        const double diff = std::abs(fd - an);
        const double scaled = diff / std::max(1.0, std::abs(an));
        const bool ok = scaled <= tol || diff <= 1e-12;
        if (!ok) rep.pass = false;
        if (scaled > rep.worst_error) rep = {rep.pass, scaled, x, xp, what};
    };
    for (int i = 0; i < grid_n; ++i) {
        const double x = static_cast<double>(i) / grid_n;
        for (int j = 0; j < grid_n; ++j) {
            const double xp = x - w + 2.0 * w * j / (grid_n - 1);
            const Derivatives d = h.derivatives(x, xp);
            consider("d1", (h(x + e, xp) - h(x - e, xp)) / (2 * e), d.d1, x, xp);
            consider("d2", (h(x, xp + e) - h(x, xp - e)) / (2 * e), d.d2, x, xp);
            const Derivatives xr = h.derivatives(x + e, xp), xl = h.derivatives(x - e, xp);
            const Derivatives pr = h.derivatives(x, xp + e), pl = h.derivatives(x, xp - e);
            consider("d11", (xr.d1 - xl.d1) / (2 * e), d.d11, x, xp);
            consider("d12", (pr.d1 - pl.d1) / (2 * e), d.d12, x, xp);
            consider("d22", (pr.d2 - pl.d2) / (2 * e), d.d22, x, xp);
        }
    }
    return rep;
}

}  // namespace mather_twist
