#pragma once

// Independent reference computations for the standard family. Nothing here
// calls into the library's solvers.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <utility>
#include <vector>

namespace oracle {

inline constexpr double pi = std::numbers::pi;

inline double std_h(double k, double x, double xp) {
    return 0.5 * (xp - x) * (xp - x) - k / (4.0 * pi * pi) * std::cos(2.0 * pi * x);
}

/// Closed-form standard map (x, y) -> (x', y').
inline std::pair<double, double> std_map(double k, double x, double y) {
    const double yn = y + k / (2.0 * pi) * std::sin(2.0 * pi * x);
    return {x + yn, yn};
}

/// Minimizes f over a box by a grid scan followed by repeated zoomed scans.
inline std::pair<std::vector<double>, double> grid_zoom_min(
    const std::function<double(const std::vector<double>&)>& f, std::vector<double> lo,
    std::vector<double> hi, int points, int zooms) {
    const std::size_t dim = lo.size();
    std::vector<double> best(dim);
    double best_f = std::numeric_limits<double>::infinity();
    for (int z = 0; z <= zooms; ++z) {
        std::vector<int> idx(dim, 0);
        std::vector<double> x(dim);
        while (true) {
            for (std::size_t d = 0; d < dim; ++d) x[d] = lo[d] + (hi[d] - lo[d]) * idx[d] / (points - 1);
            const double v = f(x);
            if (v < best_f) {
                best_f = v;
                best = x;
            }
            std::size_t d = 0;
            while (d < dim && ++idx[d] == points) idx[d++] = 0;
            if (d == dim) break;
        }
        for (std::size_t d = 0; d < dim; ++d) {
            const double w = 4.0 * (hi[d] - lo[d]) / (points - 1);
            lo[d] = best[d] - w;
            hi[d] = best[d] + w;
        }
    }
    return {best, best_f};
}

/// Minimal (1, 2) periodic action: x_2 = x_0 + 1.
inline double periodic_12_action(double k) {
    const auto f = [k](const std::vector<double>& v) {
        return std_h(k, v[0], v[1]) + std_h(k, v[1], v[0] + 1.0);
    };
    return grid_zoom_min(f, {0.0, 0.0}, {1.0, 2.0}, 400, 6).second;
}

/// Minimal (1, 2) action with x_0 = a pinned; one free variable.
inline double constrained_12_action(double k, double a) {
    const auto f = [k, a](const std::vector<double>& v) {
        return std_h(k, a, v[0]) + std_h(k, v[0], a + 1.0);
    };
    return grid_zoom_min(f, {a - 0.5}, {a + 1.5}, 4001, 8).second;
}

/// Exact continued-fraction convergents of the binary fraction num / 2^shift
/// by the Euclidean algorithm on integers.
inline std::vector<std::pair<std::int64_t, std::int64_t>> euclid_convergents(double omega, int depth) {
    int e = 0;
    const double m = std::frexp(omega, &e);  // omega = m * 2^e, m in [0.5, 1)
    __int128 num = static_cast<__int128>(std::ldexp(m, 53));
    __int128 den = static_cast<__int128>(1) << (53 - e);
    std::vector<std::pair<std::int64_t, std::int64_t>> out;
    __int128 p0 = 0, q0 = 1, p1 = 1, q1 = 0;  // p_{-2}/q_{-2}, p_{-1}/q_{-1}
    bool first = true;
    while (den != 0 && static_cast<int>(out.size()) < depth) {
        const __int128 a = num / den;
        const __int128 r = num % den;
        const __int128 p = a * p1 + p0, q = a * q1 + q0;
        p0 = p1;
        q0 = q1;
        p1 = p;
        q1 = q;
        if (!first) out.emplace_back(static_cast<std::int64_t>(p), static_cast<std::int64_t>(q));
        first = false;
        num = den;
        den = r;
    }
    return out;
}

/// Lower convex hull (monotone chain) of points sorted by x; returns its value at x.
inline double lower_hull_at(const std::vector<std::pair<double, double>>& pts, double x) {
    std::vector<std::pair<double, double>> hull;
    for (const auto& pt : pts) {
        while (hull.size() >= 2) {
            const auto& a = hull[hull.size() - 2];
            const auto& b = hull.back();
            const double cross = (b.first - a.first) * (pt.second - a.second) - (b.second - a.second) * (pt.first - a.first);
            if (cross <= 0) hull.pop_back();
            else break;
        }
        hull.push_back(pt);
    }
    for (std::size_t i = 0; i + 1 < hull.size(); ++i) {
        if (x >= hull[i].first && x <= hull[i + 1].first) {
            const double t = (x - hull[i].first) / (hull[i + 1].first - hull[i].first);
            return (1 - t) * hull[i].second + t * hull[i + 1].second;
        }
    }
    return hull.size() == 1 && x == hull[0].first ? hull[0].second : std::numeric_limits<double>::infinity();
}

/// Gaussian elimination with partial pivoting on a dense n x n system.
inline std::vector<double> dense_solve(std::vector<double> a, std::vector<double> b) {
    const std::size_t n = b.size();
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t piv = c;
        for (std::size_t r = c + 1; r < n; ++r)
            if (std::abs(a[r * n + c]) > std::abs(a[piv * n + c])) piv = r;
        for (std::size_t j = 0; j < n; ++j) std::swap(a[c * n + j], a[piv * n + j]);
        std::swap(b[c], b[piv]);
        for (std::size_t r = c + 1; r < n; ++r) {
            const double f = a[r * n + c] / a[c * n + c];
            for (std::size_t j = c; j < n; ++j) a[r * n + j] -= f * a[c * n + j];
            b[r] -= f * b[c];
        }
    }
    std::vector<double> x(n);
    for (std::size_t i = n; i-- > 0;) {
        double s = b[i];
        for (std::size_t j = i + 1; j < n; ++j) s -= a[i * n + j] * x[j];
        x[i] = s / a[i * n + i];
    }
    return x;
}

/// Periodic standard-family critical point of type p/q, followed by Newton
/// (dense solve) along a continuation in k from the rigid rotation
/// x_i = i p / q + shift. shift = 0 tracks the minimizer, which is symmetric
/// about x = 0. For odd q, shift = 1/(2q) puts one site at x = 1/2; that site
/// is held there, and the symmetry x -> 1 - x makes the result the minimax
/// orbit. `pinned_gradient` receives the EL residual at the held site.
inline double symmetric_critical_action(double k, long p, long q, double shift,
                                        double* pinned_gradient = nullptr) {
    std::vector<double> x(static_cast<std::size_t>(q));
    long held = -1;
    for (long i = 0; i < q; ++i) {
        x[static_cast<std::size_t>(i)] = static_cast<double>(i * p) / q + shift;
        if (shift != 0.0 && std::abs(x[static_cast<std::size_t>(i)] - std::round(x[static_cast<std::size_t>(i)] - 0.5) - 0.5) < 1e-12)
            held = i;
    }
    const auto at = [&](long i) {
        const long m = ((i % q) + q) % q;
        return x[static_cast<std::size_t>(m)] + static_cast<double>(p * ((i - m) / q));
    };
    constexpr int stages = 40;
    for (int stage = 1; stage <= stages; ++stage) {
    const double kk = k * stage / stages;
    const double s = kk / (2.0 * pi);
    for (int it = 0; it < 50; ++it) {
        std::vector<double> g(static_cast<std::size_t>(q)), hm(static_cast<std::size_t>(q * q), 0.0);
        double gmax = 0.0;
        for (long i = 0; i < q; ++i) {
            const auto ui = static_cast<std::size_t>(i);
            // d/dx_i of h(x_{i-1}, x_i) + h(x_i, x_{i+1})
            g[ui] = (at(i) - at(i - 1)) - (at(i + 1) - at(i)) + s * std::sin(2.0 * pi * at(i));
            gmax = std::max(gmax, std::abs(g[ui]));
            hm[ui * q + ui] += 2.0 + kk * std::cos(2.0 * pi * at(i));
            hm[ui * q + static_cast<std::size_t>((i + 1) % q)] -= 1.0;
            hm[ui * q + static_cast<std::size_t>((i + q - 1) % q)] -= 1.0;
        }
        if (held >= 0) {
            const auto uh = static_cast<std::size_t>(held);
            if (pinned_gradient) *pinned_gradient = g[uh];
            gmax = 0.0;
            for (std::size_t j = 0; j < g.size(); ++j) {
                hm[uh * q + j] = hm[j * q + uh] = 0.0;
                if (j != uh) gmax = std::max(gmax, std::abs(g[j]));
            }
            hm[uh * q + uh] = 1.0;
            g[uh] = 0.0;
        }
        if (gmax < 1e-13) break;
        const auto d = dense_solve(hm, g);
        for (std::size_t i = 0; i < x.size(); ++i) x[i] -= d[i];
    }
    }
    double w = 0.0;
    for (long i = 0; i < q; ++i) w += std_h(k, at(i), at(i + 1));
    return w;
}

}  // namespace oracle
