#include "mather_twist/twist_dynamics.hpp"

#include <algorithm>
#include <limits>
#include <cmath>

#include "mather_twist/errors.hpp"

namespace mather_twist {

PhasePoint forward(const GeneratingFunction& h, double x, double y) {
    const double w = h.window();
    const double lo_limit = x - w, hi_limit = x + w;
    // F(x') = -d1 h(x, x') - y is strictly increasing in x' under the twist condition.
    const auto F = [&](double xp) { return -h.partials(x, xp).d1 - y; };

    double guess = std::clamp(x + y, lo_limit, hi_limit);
    double slack = 0.125;
    double lo = std::max(guess - slack, lo_limit), hi = std::min(guess + slack, hi_limit);
    double flo = F(lo), fhi = F(hi);
    while (flo > 0.0 || fhi < 0.0) {
        if ((flo > 0.0 && lo == lo_limit) || (fhi < 0.0 && hi == hi_limit)) throw MomentumOutOfRange(x, y);
        slack *= 2.0;
        if (flo > 0.0) {
            hi = lo;
            fhi = flo;
            lo = std::max(guess - slack, lo_limit);
            flo = F(lo);
        } else {
            lo = hi;
            flo = fhi;
            hi = std::min(guess + slack, hi_limit);
            fhi = F(hi);
        }
    }
    if (flo == 0.0) return {lo, h.partials(x, lo).d2};
    if (fhi == 0.0) return {hi, h.partials(x, hi).d2};

    // Safeguarded Newton inside [lo, hi].
    double xp = std::clamp(guess, lo, hi);
    for (int it = 0; it < 200; ++it) {
        const Partials p = h.partials(x, xp);
        const double f = -p.d1 - y;
        if (f == 0.0) break;
        if (f < 0.0) lo = xp;
        else hi = xp;
        double next = xp - f / (-p.d12);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (std::abs(next - xp) <= 4.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(xp))) {
            xp = next;
            break;
        }
        xp = next;
        if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(xp))) break;
    }
    return {xp, h.partials(x, xp).d2};
}

OrbitSample iterate(const GeneratingFunction& h, double x, double y, long n) {
    if (n < 0) throw UsageError("iterate: n must be >= 0");
    OrbitSample orbit;
    orbit.points.reserve(static_cast<std::size_t>(n) + 1);
    orbit.points.push_back({x, y});
    for (long i = 0; i < n; ++i) {
        const PhasePoint& cur = orbit.points.back();
        try {
            orbit.points.push_back(forward(h, cur.x, cur.y));
        } catch (const MomentumOutOfRange& e) {
            throw MomentumOutOfRange(e.x, e.y, i);
        }
    }
    return orbit;
}

double jacobian_det(const GeneratingFunction& h, double x, double y, double step) {
    const PhasePoint xr = forward(h, x + step, y), xl = forward(h, x - step, y);
    const PhasePoint yr = forward(h, x, y + step), yl = forward(h, x, y - step);
    const double a = (xr.x - xl.x) / (2 * step), b = (yr.x - yl.x) / (2 * step);
    const double c = (xr.y - xl.y) / (2 * step), d = (yr.y - yl.y) / (2 * step);
    return a * d - b * c;
}

}  // namespace mather_twist
