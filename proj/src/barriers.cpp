#include "mather_twist/barriers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mather_twist/errors.hpp"
#include "mather_twist/parallel.hpp"

namespace mather_twist {

double BarrierProfile::max_value() const {
    double m = -std::numeric_limits<double>::infinity();
    for (double v : values) m = std::max(m, v);
    return m;
}

double BarrierProfile::min_value() const {
    double m = std::numeric_limits<double>::infinity();
    for (double v : values) m = std::min(m, v);
    return m;
}

std::vector<double> BarrierProfile::zero_set(double tol) const {
    std::vector<double> z;
    for (std::size_t i = 0; i < values.size(); ++i)
        if (values[i] <= tol) z.push_back(grid[i]);
    return z;
}

std::vector<double> barrier_grid(int grid_m, const Configuration* minimizer) {
    if (grid_m < 2) throw UsageError("barrier grid needs at least 2 points");
    std::vector<double> g;
    for (int j = 0; j < grid_m; ++j) g.push_back(static_cast<double>(j) / grid_m);
    if (minimizer) {
        for (std::size_t i = 0; i + 1 < minimizer->xs.size(); ++i) {
            const double z = minimizer->xs[i] - std::floor(minimizer->xs[i]);
            g.push_back(z >= 1.0 ? 0.0 : z);
        }
    }
    std::sort(g.begin(), g.end());
    std::vector<double> out;
    for (double v : g)
        if (out.empty() || v - out.back() > 1e-12) out.push_back(v);
    return out;
}

namespace {

// x_t for any integer t of a periodic configuration: x_{t+q} = x_t + p.
double extended(const Configuration& c, long t) {
    const long q = c.rc.q;
    const long m = ((t % q) + q) % q;
    return c.xs[static_cast<std::size_t>(m)] + static_cast<double>(c.rc.p * ((t - m) / q));
}

// Starts for the constrained problem at a: the periodic minimizer relabeled
// so that its orbit point just below (and just above) a comes first.
std::vector<std::vector<double>> shifted_minimizer_hints(const Configuration& base, double a) {
    const long q = base.rc.q;
    long below = 0, above = 0;
    double best_below = -std::numeric_limits<double>::infinity();
    double best_above = std::numeric_limits<double>::infinity();
    for (long t = 0; t < q; ++t) {
        const double z = base.xs[static_cast<std::size_t>(t)];
        const double zb = z + std::floor(a - z);  // largest lift <= a
        if (zb > best_below) {
            best_below = zb;
            below = t;
        }
        if (zb + 1.0 < best_above) {
            best_above = zb + 1.0;
            above = t;
        }
    }
    std::vector<std::vector<double>> hints;
    for (const auto& [site, lift] : {std::pair{below, best_below}, std::pair{above, best_above}}) {
        const double shift = lift - base.xs[static_cast<std::size_t>(site)];
        std::vector<double> hs(static_cast<std::size_t>(q));
        for (long s = 0; s < q; ++s) hs[static_cast<std::size_t>(s)] = extended(base, site + s) + shift;
        hints.push_back(std::move(hs));
    }
    return hints;
}

}  // namespace

std::vector<double> peierls_values(const GeneratingFunction& h, const MinimizerResult& base,
                                   const std::vector<double>& grid, const BarrierOptions& opts,
                                   double* refined_base_action) {
    const RotationClass rc = base.config.rc;
    MinimizeOptions copts = opts.minimize;
    copts.restarts = std::max(1, opts.constrained_restarts);
    std::vector<MinimizerResult> constrained(grid.size());
    parallel_for(grid.size(), [&](std::size_t j) {
        try {
            constrained[j] = minimize_constrained(h, rc, grid[j], copts,
                                                  shifted_minimizer_hints(base.config, grid[j]));
        } catch (const NumericalFailure& e) {
            throw NumericalFailure("barrier: constrained minimization failed at a = " +
                                       std::to_string(grid[j]) + ": " + e.what(),
                                   e.best_iterate, e.best_residual);
        }
    });
    double base_action = base.action;
    // A constrained configuration is itself periodic; if one undercuts the
    // periodic minimum, the restarts missed the global minimizer.
    std::size_t lowest = 0;
    for (std::size_t j = 1; j < grid.size(); ++j)
        if (constrained[j].action < constrained[lowest].action) lowest = j;
    if (!grid.empty() && constrained[lowest].action < base_action - 1e-12) {
        MinimizerResult refined = refine_periodic(h, rc, constrained[lowest].config.xs, opts.minimize);
        base_action = std::min(refined.action, constrained[lowest].action);
    }
    if (refined_base_action) *refined_base_action = base_action;
    std::vector<double> values(grid.size());
    for (std::size_t j = 0; j < grid.size(); ++j) values[j] = constrained[j].action - base_action;
    return values;
}

BarrierProfile peierls_rational(const GeneratingFunction& h, const RotationClass& rc, int grid_m,
                                const BarrierOptions& opts) {
    if (grid_m < 2) throw UsageError("peierls_rational: grid_m must be >= 2");
    const MinimizerResult base = minimize_periodic(h, rc, opts.minimize);
    BarrierProfile prof;
    prof.label = BarrierLabel::peierls;
    prof.rc = base.config.rc;
    prof.omega = prof.rc.value();
    prof.grid = barrier_grid(grid_m, opts.include_orbit_points ? &base.config : nullptr);
    prof.values = peierls_values(h, base, prof.grid, opts);
    return prof;
}

const char* to_string(Trend t) {
    switch (t) {
        case Trend::vanished: return "vanished";
        case Trend::decreasing: return "decreasing";
        case Trend::stable: return "stable";
        case Trend::growing: return "growing";
        case Trend::terminal: return "terminal";
    }
    return "?";
}

const char* to_string(CircleVerdict v) {
    switch (v) {
        case CircleVerdict::exists_likely: return "exists-likely";
        case CircleVerdict::destroyed: return "destroyed";
        case CircleVerdict::inconclusive: return "inconclusive";
    }
    return "?";
}

namespace {

void classify_trend(LimitDiagnostics& d, bool terminated) {
    const auto& m = d.max_by_depth;
    const double last = m.back();
    if (terminated) {
        d.trend = Trend::terminal;
        d.slope = 0.0;
        return;
    }
    const std::size_t back = std::min<std::size_t>(2, m.size() - 1);
    const double earlier = m[m.size() - 1 - back];
    const auto lg = [](double v) { return std::log10(std::max(v, kBarrierNoiseFloor)); };
    d.slope = back > 0 ? (lg(last) - lg(earlier)) / static_cast<double>(back) : 0.0;
    if (last <= kBarrierNoiseFloor) d.trend = Trend::vanished;
    else if (d.slope < -kStableSlope) d.trend = Trend::decreasing;
    else if (d.slope <= kStableSlope) d.trend = Trend::stable;
    else d.trend = Trend::growing;
}

}  // namespace

PeierlsLimit peierls_limit(const GeneratingFunction& h, double omega, int depth, int grid_m,
                           const BarrierOptions& opts) {
    if (depth < 2) throw UsageError("peierls_limit: depth must be >= 2");
    if (grid_m < 2) throw UsageError("peierls_limit: grid_m must be >= 2");
    const ConvergentList cl = convergents(omega, depth);
    if (cl.entries.empty()) throw UsageError("peierls_limit: omega has no convergent inside (0, 1)");

    std::vector<MinimizerResult> bases(cl.entries.size());
    parallel_for(bases.size(), [&](std::size_t i) {
        bases[i] = minimize_periodic(h, cl.entries[i], opts.minimize);
    });
    PeierlsLimit out;
    out.profile.label = BarrierLabel::peierls_limit;
    out.profile.omega = omega;
    out.profile.depth = depth;
    out.profile.rc = cl.entries.back();
    out.profile.grid = barrier_grid(grid_m, opts.include_orbit_points ? &bases.back().config : nullptr);
    out.diagnostics.classes = cl.entries;
    for (std::size_t i = 0; i < bases.size(); ++i) {
        std::vector<double> v = peierls_values(h, bases[i], out.profile.grid, opts);
        out.diagnostics.max_by_depth.push_back(*std::max_element(v.begin(), v.end()));
        if (i + 1 == bases.size()) out.profile.values = std::move(v);
    }
    classify_trend(out.diagnostics, cl.terminated);
    return out;
}

CircleVerdict classify_circle(const LimitDiagnostics& d, double tol) {
    const double m = d.max_by_depth.back();
    const bool settled = d.trend == Trend::stable || d.trend == Trend::terminal;
    const bool shrinking =
        d.trend == Trend::vanished || d.trend == Trend::decreasing || d.trend == Trend::terminal;
    if (m > tol && settled) return CircleVerdict::destroyed;
    if (m < tol && shrinking) return CircleVerdict::exists_likely;
    return CircleVerdict::inconclusive;
}

CircleTest invariant_circle_test(const GeneratingFunction& h, double omega, int depth, double tol,
                                 int grid_m, const BarrierOptions& opts) {
    if (!(tol > 0.0)) throw UsageError("invariant_circle_test: tol must be > 0");
    PeierlsLimit lim = peierls_limit(h, omega, depth, grid_m, opts);
    CircleTest t{classify_circle(lim.diagnostics, tol), lim.diagnostics.max_by_depth.back(), tol,
                 std::move(lim)};
    return t;
}

double hc_cost(const GeneratingFunction& h, double c, double alpha_c, double x, double xp) {
    return h(x, xp) - c * (xp - x) + alpha_c;
}

DPValueTable hc_one_step(const GeneratingFunction& h, double c, double alpha_c, int grid_m) {
    if (grid_m < 2) throw UsageError("hc tables need grid_m >= 2");
    DPValueTable t;
    t.c = c;
    t.alpha_c = alpha_c;
    t.n = 1;
    t.m = grid_m;
    for (int i = 0; i < grid_m; ++i) t.grid.push_back(static_cast<double>(i) / grid_m);
    t.values.assign(static_cast<std::size_t>(grid_m) * grid_m, 0.0);
    const double w = h.window();
    parallel_for(static_cast<std::size_t>(grid_m), [&](std::size_t i) {
        const double xi = t.grid[i];
        for (int j = 0; j < grid_m; ++j) {
            const double eta = t.grid[static_cast<std::size_t>(j)];
            double best = std::numeric_limits<double>::infinity();
            for (long lift = static_cast<long>(std::ceil(xi - eta - w));
                 lift <= static_cast<long>(std::floor(xi - eta + w)); ++lift) {
                const double xp = eta + static_cast<double>(lift);
                if (std::abs(xp - xi) > w) continue;
                best = std::min(best, hc_cost(h, c, alpha_c, xi, xp));
            }
            t.values[i * static_cast<std::size_t>(grid_m) + static_cast<std::size_t>(j)] = best;
        }
    });
    return t;
}

DPValueTable compose(const DPValueTable& lhs, const DPValueTable& step) {
    if (lhs.m != step.m) throw UsageError("compose: grid mismatch");
    const int m = lhs.m;
    DPValueTable out = lhs;
    out.n = lhs.n + step.n;
    parallel_for(static_cast<std::size_t>(m), [&](std::size_t i) {
        for (int j = 0; j < m; ++j) {
            double best = std::numeric_limits<double>::infinity();
            for (int l = 0; l < m; ++l) {
                const double v = lhs.at(static_cast<int>(i), l) + step.at(l, j);
                if (v < best) best = v;
            }
            out.values[i * static_cast<std::size_t>(m) + static_cast<std::size_t>(j)] = best;
        }
    });
    return out;
}

std::vector<DPValueTable> hc_tables(const GeneratingFunction& h, double c, double alpha_c,
                                    int n_max, int grid_m) {
    if (n_max < 1) throw UsageError("hc tables need n >= 1");
    std::vector<DPValueTable> tables;
    tables.push_back(hc_one_step(h, c, alpha_c, grid_m));
    for (int n = 2; n <= n_max; ++n) tables.push_back(compose(tables.back(), tables.front()));
    return tables;
}

DPValueTable hc_n(const GeneratingFunction& h, double c, double alpha_c, int n, int grid_m) {
    return hc_tables(h, c, alpha_c, n, grid_m).back();
}

DPValueTable hc_infinity(const std::vector<DPValueTable>& tables) {
    if (tables.size() < 2) throw UsageError("hc_infinity needs tables up to n >= 2");
    DPValueTable out = tables[1];
    for (std::size_t n = 2; n < tables.size(); ++n)
        for (std::size_t k = 0; k < out.values.size(); ++k)
            out.values[k] = std::min(out.values[k], tables[n].values[k]);
    out.n = static_cast<int>(tables.size());
    return out;
}

BarrierProfile barrier_B(const DPValueTable& hinf) {
    BarrierProfile p;
    p.label = BarrierLabel::bc;
    p.c = hinf.c;
    p.grid = hinf.grid;
    for (int i = 0; i < hinf.m; ++i) p.values.push_back(hinf.at(i, i));
    return p;
}

BarrierProfile barrier_B(const GeneratingFunction& h, double c, double alpha_c, int grid_m, int n_max) {
    if (n_max < 2) throw UsageError("barrier_B: N must be >= 2");
    return barrier_B(hc_infinity(hc_tables(h, c, alpha_c, n_max, grid_m)));
}

BarrierProfile bc_star(const DPValueTable& hinf, double tol_zero) {
    BarrierProfile p;
    p.label = BarrierLabel::bc_star;
    p.c = hinf.c;
    p.grid = hinf.grid;
    std::vector<int> zeros;
    for (int i = 0; i < hinf.m; ++i)
        if (hinf.at(i, i) <= tol_zero) zeros.push_back(i);
    if (zeros.empty()) {
        p.inconclusive = true;
        return p;
    }
    for (int mid = 0; mid < hinf.m; ++mid) {
        double best = std::numeric_limits<double>::infinity();
        for (int xi : zeros)
            for (int eta : zeros)
                best = std::min(best, hinf.at(xi, mid) + hinf.at(mid, eta) - hinf.at(xi, eta));
        p.values.push_back(best);
    }
    return p;
}

BarrierProfile bc_star(const GeneratingFunction& h, double c, double alpha_c, int grid_m, int n_max,
                       double tol_zero) {
    if (n_max < 2) throw UsageError("bc_star: N must be >= 2");
    return bc_star(hc_infinity(hc_tables(h, c, alpha_c, n_max, grid_m)), tol_zero);
}

}  // namespace mather_twist
