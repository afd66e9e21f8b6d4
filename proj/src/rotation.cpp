#include "mather_twist/rotation.hpp"

#include <cmath>
#include <numeric>

#include "mather_twist/errors.hpp"

namespace mather_twist {

RotationEstimate rotation_number(const OrbitSample& orbit, double periodic_tol) {
    const long n = orbit.steps();
    if (n < 2) throw UsageError("rotation_number needs an orbit with at least 2 steps");
    const auto& pts = orbit.points;
    for (long q = 1; q <= n; ++q) {
        const double jump = pts[static_cast<std::size_t>(q)].x - pts[0].x;
        const double p = std::round(jump);
        if (std::abs(jump - p) > periodic_tol) continue;
        bool closes = true;
        for (long i = 1; i + q <= n && closes; ++i)
            closes = std::abs(pts[static_cast<std::size_t>(i + q)].x - pts[static_cast<std::size_t>(i)].x - p) <=
                     periodic_tol;
        if (!closes) continue;
        const long pl = static_cast<long>(p);
        if (std::gcd(std::abs(pl), q) != 1) continue;
        return {static_cast<double>(pl) / static_cast<double>(q), RotationClass{pl, q}};
    }
    const long start = n / 5;
    const double v = (pts[static_cast<std::size_t>(n)].x - pts[static_cast<std::size_t>(start)].x) /
                     static_cast<double>(n - start);
    return {v, std::nullopt};
}

ConvergentList convergents(double omega, int depth) {
    if (!(omega > 0.0 && omega < 1.0)) throw UsageError("convergents: omega must lie in (0, 1)");
    if (depth < 1) throw UsageError("convergents: depth must be >= 1");
    ConvergentList out{omega, {}, false};
    // p_{-1}/q_{-1} = 1/0, p_0/q_0 = 0/1 (a_0 = 0)
    long p_prev = 1, q_prev = 0, p = 0, q = 1;
    double frac = omega;
    while (static_cast<int>(out.entries.size()) < depth) {
        const double r = 1.0 / frac;
        if (!(r <= 1e12)) {
            out.terminated = true;
            break;
        }
        const double a_real = std::floor(r);
        long a = static_cast<long>(a_real);
        frac = r - a_real;
        // a remainder that rounds to the next integer ends the expansion
        if (1.0 - frac < 1e-12) {
            ++a;
            frac = 0.0;
        }
        const long p_next = a * p + p_prev, q_next = a * q + q_prev;
        p_prev = p;
        q_prev = q;
        p = p_next;
        q = q_next;
        if (p > 0 && p < q) out.entries.push_back(RotationClass{p, q});
        if (frac <= 0.0) {
            out.terminated = static_cast<int>(out.entries.size()) < depth;
            break;
        }
    }
    return out;
}

}  // namespace mather_twist
