#include "mather_twist/mather_structures.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "mather_twist/errors.hpp"
#include "mather_twist/parallel.hpp"
#include "mather_twist/rotation.hpp"

namespace mather_twist {

EmpiricalMeasure EmpiricalMeasure::from_minimizer(const GeneratingFunction& h, const MinimizerResult& m) {
    EmpiricalMeasure mu;
    mu.rc = m.config.rc;
    mu.orbit = induced_orbit(h, m.config);
    mu.weights.assign(static_cast<std::size_t>(mu.rc.q), 1.0 / static_cast<double>(mu.rc.q));
    return mu;
}

double EmpiricalMeasure::expectation(const std::function<double(const PhasePoint&)>& f) const {
    double s = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) s += weights[i] * f(orbit.points[i]);
    return s;
}

namespace {

void require_closed(const EmpiricalMeasure& mu) {
    const auto q = static_cast<std::size_t>(mu.rc.q);
    if (mu.orbit.points.size() != q + 1 ||
        std::abs(mu.orbit.points[q].x - mu.orbit.points[0].x - static_cast<double>(mu.rc.p)) > 1e-9)
        throw UsageError("empirical measure: orbit is not periodic of type " + std::to_string(mu.rc.p) +
                         "/" + std::to_string(mu.rc.q));
}

}  // namespace

double average_action(const GeneratingFunction& h, const EmpiricalMeasure& mu) {
    require_closed(mu);
    double s = 0.0;
    for (std::size_t i = 0; i < mu.weights.size(); ++i)
        s += mu.weights[i] * h(mu.orbit.points[i].x, mu.orbit.points[i + 1].x);
    return s;
}

double rotation_vector(const EmpiricalMeasure& mu) {
    if (mu.orbit.steps() >= 2) {
        const RotationEstimate r = rotation_number(mu.orbit);
        if (r.exact) return r.exact->value();
    }
    return mu.rc.value();
}

double beta(const GeneratingFunction& h, const RotationClass& rc, const MinimizeOptions& opts) {
    return minimize_periodic(h, rc, opts).action / static_cast<double>(rc.q);
}

std::vector<RotationClass> farey_sequence(int order) {
    if (order < 1) throw UsageError("farey_order must be >= 1");
    std::vector<RotationClass> out;
    // next-term recurrence
    long a = 0, b = 1, c = 1, d = order;
    out.push_back({a, b});
    while (c <= order) {
        const long kk = (order + b) / d;
        const long e = kk * c - a, f = kk * d - b;
        a = c;
        b = d;
        c = e;
        d = f;
        out.push_back({a, b});
    }
    return out;
}

BetaSamples beta_grid(const GeneratingFunction& h, int farey_order, const MinimizeOptions& opts) {
    const std::vector<RotationClass> nodes = farey_sequence(farey_order);
    BetaSamples s;
    s.k = h.spec().k;
    s.farey_order = farey_order;
    s.entries.resize(nodes.size());
    parallel_for(nodes.size(), [&](std::size_t i) {
        s.entries[i] = {nodes[i], nodes[i].value(), beta(h, nodes[i], opts)};
    });
    return s;
}

double convexity_defect(const BetaSamples& s) {
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i + 1 < s.entries.size(); ++i) {
        const auto& l = s.entries[i - 1];
        const auto& m = s.entries[i];
        const auto& r = s.entries[i + 1];
        const double t = (m.omega - l.omega) / (r.omega - l.omega);
        worst = std::max(worst, m.beta - ((1.0 - t) * l.beta + t * r.beta));
    }
    return s.entries.size() < 3 ? 0.0 : worst;
}

bool is_convex(const BetaSamples& s, double tol) { return convexity_defect(s) <= tol; }

double alpha(double c, const BetaSamples& s) {
    if (s.entries.empty()) throw UsageError("alpha: no beta samples");
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& e : s.entries) best = std::max(best, c * e.omega - e.beta);
    return best;
}

ConjugateSamples alpha_grid(const std::vector<double>& cs, const BetaSamples& s) {
    if (s.entries.empty()) throw UsageError("alpha: no beta samples");
    ConjugateSamples out;
    out.farey_order = s.farey_order;
    for (double c : cs) out.entries.emplace_back(c, alpha(c, s));
    return out;
}

double biconjugate(double omega, const BetaSamples& s) {
    if (s.entries.empty()) throw UsageError("biconjugate: no beta samples");
    const auto& e = s.entries;
    if (omega < e.front().omega - 1e-15 || omega > e.back().omega + 1e-15)
        return std::numeric_limits<double>::infinity();
    // The sup over c of a piecewise-linear concave function of c is attained
    // at a breakpoint, i.e. at a slope between two samples.
    double best = -std::numeric_limits<double>::infinity();
    if (e.size() == 1) return e.front().beta;
    for (std::size_t i = 0; i < e.size(); ++i)
        for (std::size_t j = i + 1; j < e.size(); ++j) {
            const double c = (e[j].beta - e[i].beta) / (e[j].omega - e[i].omega);
            best = std::max(best, c * omega - alpha(c, s));
        }
    return best;
}

std::vector<RotationClass> c_minimal_rotation(double c, const BetaSamples& s) {
    const double top = alpha(c, s);
    std::vector<RotationClass> out;
    for (const auto& e : s.entries)
        if (c * e.omega - e.beta >= top - 1e-12) out.push_back(e.rc);
    return out;
}

std::vector<EmpiricalMeasure> mc_orbits(const GeneratingFunction& h, const std::vector<RotationClass>& classes,
                                        const MinimizeOptions& opts) {
    std::vector<EmpiricalMeasure> out(classes.size());
    parallel_for(classes.size(), [&](std::size_t i) {
        out[i] = EmpiricalMeasure::from_minimizer(h, minimize_periodic(h, classes[i], opts));
    });
    return out;
}

std::pair<double, double> subdifferential(const BetaSamples& s, std::size_t i) {
    const auto& e = s.entries;
    if (i >= e.size()) throw UsageError("subdifferential: index out of range");
    const auto slope = [&](std::size_t a, std::size_t b) {
        return (e[b].beta - e[a].beta) / (e[b].omega - e[a].omega);
    };
    if (e.size() == 1) return {0.0, 0.0};
    const double left = i > 0 ? slope(i - 1, i) : slope(0, 1);
    const double right = i + 1 < e.size() ? slope(i, i + 1) : slope(i - 1, i);
    return {left, right};
}

std::vector<InstabilityInterval> destroyed_runs(const std::vector<double>& grid,
                                                const std::vector<CircleVerdict>& verdicts) {
    std::vector<InstabilityInterval> out;
    const std::size_t n = verdicts.size();
    for (std::size_t i = 0; i < n;) {
        if (verdicts[i] != CircleVerdict::destroyed) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j + 1 < n && verdicts[j + 1] == CircleVerdict::destroyed) ++j;
        InstabilityInterval iv{i, j, grid[i], grid[j], std::nullopt, std::nullopt};
        if (i > 0 && verdicts[i - 1] == CircleVerdict::exists_likely) iv.surviving_below = grid[i - 1];
        if (j + 1 < n && verdicts[j + 1] == CircleVerdict::exists_likely) iv.surviving_above = grid[j + 1];
        out.push_back(iv);
        i = j + 1;
    }
    return out;
}

InstabilityReport instability_scan(const GeneratingFunction& h, const std::vector<double>& omega_grid,
                                   int depth, double tol, int grid_m, const BarrierOptions& opts) {
    if (omega_grid.empty()) throw UsageError("instability_scan: empty frequency grid");
    for (std::size_t i = 0; i < omega_grid.size(); ++i) {
        if (!(omega_grid[i] > 0.0 && omega_grid[i] < 1.0))
            throw UsageError("instability_scan: frequencies must lie in (0, 1)");
        if (i > 0 && !(omega_grid[i] > omega_grid[i - 1]))
            throw UsageError("instability_scan: frequency grid must be strictly increasing");
    }
    InstabilityReport rep;
    rep.k = h.spec().k;
    rep.grid = omega_grid;
    rep.verdicts.resize(omega_grid.size());
    rep.max_barrier.resize(omega_grid.size());
    parallel_for(omega_grid.size(), [&](std::size_t i) {
        const CircleTest t = invariant_circle_test(h, omega_grid[i], depth, tol, grid_m, opts);
        rep.verdicts[i] = t.verdict;
        rep.max_barrier[i] = t.max_barrier;
    });
    rep.intervals = destroyed_runs(rep.grid, rep.verdicts);
    return rep;
}

const char* to_string(ConnectVerdict v) {
    return v == ConnectVerdict::connected_candidate ? "connected-candidate" : "obstruction";
}

namespace {

double periodic_at(const Configuration& c, long t) {
    const long q = c.rc.q;
    const long m = ((t % q) + q) % q;
    return c.xs[static_cast<std::size_t>(m)] + static_cast<double>(c.rc.p * ((t - m) / q));
}

double el_at(const GeneratingFunction& h, const std::vector<double>& xs, std::size_t i) {
    return h.partials(xs[i - 1], xs[i]).d2 + h.partials(xs[i], xs[i + 1]).d1;
}

// c_i: midpoint of the sampled subdifferential of beta at p/q, using its
// Farey neighbours of order q + 1.
double closed_form(const GeneratingFunction& h, const RotationClass& rc, const MinimizeOptions& opts,
                   double beta_rc) {
    const auto seq = farey_sequence(static_cast<int>(rc.q) + 1);
    BetaSamples s;
    for (std::size_t i = 0; i < seq.size(); ++i) {
        if (!(seq[i] == rc)) continue;
        if (i > 0) s.entries.push_back({seq[i - 1], seq[i - 1].value(), beta(h, seq[i - 1], opts)});
        s.entries.push_back({rc, rc.value(), beta_rc});
        if (i + 1 < seq.size()) s.entries.push_back({seq[i + 1], seq[i + 1].value(), beta(h, seq[i + 1], opts)});
        const std::size_t at = i > 0 ? 1 : 0;
        const auto [l, r] = subdifferential(s, at);
        return 0.5 * (l + r);
    }
    return 0.0;
}

enum class JointState { free, lower, upper };

}  // namespace

ConnectingResult connecting_heuristic(const GeneratingFunction& h, const std::vector<RotationClass>& schedule,
                                      const std::vector<long>& lengths, const ConnectingOptions& opts) {
    if (schedule.empty()) throw UsageError("connect: empty schedule");
    if (lengths.size() != schedule.size()) throw UsageError("connect: need one waiting length per class");
    for (std::size_t i = 0; i < schedule.size(); ++i)
        if (lengths[i] < schedule[i].q)
            throw UsageError("connect: waiting length " + std::to_string(lengths[i]) + " shorter than q = " +
                             std::to_string(schedule[i].q));
    if (!(opts.joint_tol > 0.0) || !(opts.joint_window > 0.0))
        throw UsageError("connect: joint_tol and joint_window must be > 0");

    const std::size_t m = schedule.size();
    std::vector<MinimizerResult> mins(m);
    for (std::size_t i = 0; i < m; ++i) mins[i] = minimize_periodic(h, schedule[i], opts.minimize);

    ConnectingResult res;
    res.schedule = schedule;
    res.lengths = lengths;
    res.closed_forms.resize(m);
    for (std::size_t i = 0; i < m; ++i)
        res.closed_forms[i] = closed_form(h, mins[i].config.rc, opts.minimize,
                                          mins[i].action / static_cast<double>(schedule[i].q));

    const long total = std::accumulate(lengths.begin(), lengths.end(), 0L);
    std::vector<double> xs(static_cast<std::size_t>(total) + 1);
    // Initial chain: each class's minimizer, relabeled and shifted by an
    // integer so that it starts next to where the previous segment ended.
    long start = 0;
    for (std::size_t i = 0; i < m; ++i) {
        const Configuration& c = mins[i].config;
        long t0 = 0;
        double shift = 0.0;
        if (i == 0) {
            xs[0] = c.xs[0];
        } else {
            const double v = xs[static_cast<std::size_t>(start)];
            double best = std::numeric_limits<double>::infinity();
            for (long t = 0; t < c.rc.q; ++t) {
                const double z = periodic_at(c, t);
                const double n = std::round(v - z);
                if (std::abs(z + n - v) < best) {
                    best = std::abs(z + n - v);
                    t0 = t;
                    shift = n;
                }
            }
        }
        for (long s = 1; s <= lengths[i]; ++s)
            xs[static_cast<std::size_t>(start + s)] = periodic_at(c, t0 + s) + shift;
        if (i + 1 < m) res.joints.push_back(static_cast<std::size_t>(start + lengths[i]));
        start += lengths[i];
    }

    const std::size_t nj = res.joints.size();
    std::vector<double> target(nj);
    for (std::size_t j = 0; j < nj; ++j) target[j] = xs[res.joints[j]];
    std::vector<JointState> state(nj, JointState::free);

    const auto solve = [&] {
        std::vector<std::size_t> pins{0};
        std::vector<double> moved{0.0};
        for (std::size_t j = 0; j < nj; ++j) {
            if (state[j] == JointState::free) continue;
            const double to = target[j] + (state[j] == JointState::upper ? 1.0 : -1.0) * opts.joint_window;
            moved.push_back(to - xs[res.joints[j]]);
            xs[res.joints[j]] = to;
            pins.push_back(res.joints[j]);
        }
        pins.push_back(xs.size() - 1);
        moved.push_back(0.0);
        for (std::size_t s = 0; s + 1 < pins.size(); ++s) {
            const std::size_t a = pins[s], b = pins[s + 1];
            if (b - a < 2) continue;
            // carry the interior along with a newly pinned end
            for (std::size_t t = a + 1; t < b; ++t)
                xs[t] += (moved[s] * static_cast<double>(b - t) + moved[s + 1] * static_cast<double>(t - a)) /
                         static_cast<double>(b - a);
            std::vector<double> seg(xs.begin() + static_cast<long>(a), xs.begin() + static_cast<long>(b) + 1);
            ChainResult cr = minimize_pinned_chain(h, std::move(seg), {}, opts.minimize.tol, opts.max_iterations);
            std::copy(cr.xs.begin(), cr.xs.end(), xs.begin() + static_cast<long>(a));
            if (!cr.converged)
                throw NumericalFailure("connect: segment between sites " + std::to_string(a) + " and " +
                                           std::to_string(b) + " did not converge",
                                       xs, cr.residual_inf);
        }
    };

    // Active set over the joint windows.
    if (total >= 2) {
        for (int round = 0; round < 4 * static_cast<int>(nj) + 10; ++round) {
            solve();
            bool changed = false;
            for (std::size_t j = 0; j < nj; ++j) {
                if (state[j] != JointState::free) continue;
                const double d = xs[res.joints[j]] - target[j];
                if (d > opts.joint_window) state[j] = JointState::upper, changed = true;
                else if (d < -opts.joint_window) state[j] = JointState::lower, changed = true;
            }
            if (changed) continue;
            // release the pinned joint whose multiplier has the wrong sign the most
            std::size_t release = nj;
            double worst = 0.0;
            for (std::size_t j = 0; j < nj; ++j) {
                if (state[j] == JointState::free) continue;
                const double r = el_at(h, xs, res.joints[j]);
                const double wrong = state[j] == JointState::upper ? r : -r;
                if (wrong > worst) {
                    worst = wrong;
                    release = j;
                }
            }
            if (release == nj) break;
            state[release] = JointState::free;
        }
    }

    res.joint_residuals.resize(nj);
    for (std::size_t j = 0; j < nj; ++j) res.joint_residuals[j] = std::abs(el_at(h, xs, res.joints[j]));
    for (std::size_t i = 1; i + 1 < xs.size(); ++i)
        if (std::find(res.joints.begin(), res.joints.end(), i) == res.joints.end())
            res.max_interior_residual = std::max(res.max_interior_residual, std::abs(el_at(h, xs, i)));
    res.config = Configuration::free_segment(std::move(xs));
    res.verdict = ConnectVerdict::connected_candidate;
    for (std::size_t j = 0; j < nj; ++j) {
        if (res.joint_residuals[j] > res.joint_residuals[res.worst_joint]) res.worst_joint = j;
        if (res.joint_residuals[j] > opts.joint_tol) res.verdict = ConnectVerdict::obstruction;
    }
    return res;
}

}  // namespace mather_twist
