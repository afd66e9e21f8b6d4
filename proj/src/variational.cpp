#include "mather_twist/variational.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>

#include "mather_twist/errors.hpp"
#include "mather_twist/parallel.hpp"
#include "mather_twist/tridiagonal.hpp"

namespace mather_twist {

RotationClass RotationClass::make(long p, long q) {
    if (q < 1) throw UsageError("rotation class requires q >= 1");
    if (std::gcd(std::abs(p), q) != 1)
        throw UsageError("rotation class " + std::to_string(p) + "/" + std::to_string(q) +
                         " is not reduced");
    return RotationClass{p, q};
}

Configuration Configuration::free_segment(std::vector<double> xs) {
    if (xs.empty()) throw UsageError("configuration must contain at least one point");
    Configuration c;
    c.xs = std::move(xs);
    c.kind = ConfigKind::free_segment;
    return c;
}

Configuration Configuration::periodic(RotationClass rc, std::vector<double> first_q) {
    if (static_cast<long>(first_q.size()) != rc.q)
        throw UsageError("periodic configuration needs exactly q points");
    Configuration c;
    c.rc = rc;
    c.kind = ConfigKind::periodic;
    c.xs = std::move(first_q);
    c.xs.push_back(c.xs[0] + static_cast<double>(rc.p));
    return c;
}

double action(const GeneratingFunction& h, const Configuration& c) {
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < c.xs.size(); ++i) s += h(c.xs[i], c.xs[i + 1]);
    if (c.xs.size() == 1) throw UsageError("action needs at least two points");
    return s;
}

std::vector<double> el_residual(const GeneratingFunction& h, const Configuration& c) {
    const auto& x = c.xs;
    std::vector<double> r;
    if (c.kind == ConfigKind::periodic) {
        const std::size_t q = x.size() - 1;
        r.resize(q);
        for (std::size_t i = 0; i < q; ++i) {
            const double d2 = i == 0 ? h.partials(x[q - 1], x[q]).d2 : h.partials(x[i - 1], x[i]).d2;
            r[i] = d2 + h.partials(x[i], x[i + 1]).d1;
        }
        return r;
    }
    if (c.kind == ConfigKind::free_segment && x.size() < 3)
        throw UsageError("el_residual needs at least one interior point");
    for (std::size_t i = 1; i + 1 < x.size(); ++i)
        r.push_back(h.partials(x[i - 1], x[i]).d2 + h.partials(x[i], x[i + 1]).d1);
    return r;
}

double max_abs(const std::vector<double>& v) {
    double m = 0.0;
    for (double e : v) m = std::max(m, std::abs(e));
    return m;
}

namespace {

// Rigid-rotation coordinates: site i sits at n_i + s_i / q with s_i = i p mod q.
struct RigidSlot {
    long n;  // floor(i p / q)
    long s;  // i p mod q
};

RigidSlot rigid_slot(long i, const RotationClass& rc) {
    const long ip = i * rc.p;
    long n = ip / rc.q, s = ip % rc.q;
    if (s < 0) {
        s += rc.q;
        --n;
    }
    return {n, s};
}

// Sort-projection onto Birkhoff order over the given site indices.
void project_birkhoff(std::vector<double>& xs, const RotationClass& rc, long first_site) {
    const long q = rc.q;
    std::vector<std::pair<long, long>> slots;  // (s, site)
    std::vector<double> u;
    for (long i = first_site; i < q; ++i) {
        const RigidSlot r = rigid_slot(i, rc);
        slots.emplace_back(r.s, i);
        u.push_back(xs[static_cast<std::size_t>(i)] - static_cast<double>(r.n));
    }
    std::sort(slots.begin(), slots.end());
    std::sort(u.begin(), u.end());
    for (std::size_t k = 0; k < slots.size(); ++k) {
        const long site = slots[k].second;
        xs[static_cast<std::size_t>(site)] = u[k] + static_cast<double>(rigid_slot(site, rc).n);
    }
    xs[static_cast<std::size_t>(q)] = xs[0] + static_cast<double>(rc.p);
}

enum class Layout { periodic, pinned };

// Damped Newton on a chain action with tridiagonal (periodic: cyclic) Hessian.
class ChainSolver {
public:
    ChainSolver(const GeneratingFunction& h, Layout layout, long shift,
                const std::vector<SitePotential>* potentials)
        : h_(h), layout_(layout), shift_(shift), potentials_(potentials) {}

    std::optional<RotationClass> ordering;  // sort-project after each trial when set
    long ordering_first_site = 0;

    struct Outcome {
        std::vector<double> xs;
        double objective;
        double residual;
        bool converged;
        std::vector<double> trace;
    };

    Outcome run(std::vector<double> xs, double tol, int max_iterations) const {
        sync(xs);
        if (ordering) project_birkhoff(xs, *ordering, ordering_first_site);
        double roundoff = 0.0;
        double f = objective(xs, roundoff);
        if (!std::isfinite(f)) return {xs, f, std::numeric_limits<double>::infinity(), false, {}};
        Outcome out{xs, f, 0.0, false, {f}};
        std::vector<double> grad;
        CyclicTridiagonal hess;
        double lambda = 0.0;
        for (int it = 0; it <= max_iterations; ++it) {
            assemble(out.xs, grad, hess);
            out.residual = max_abs(grad);
            if (out.residual <= tol) {
                out.converged = true;
                break;
            }
            if (it == max_iterations || grad.empty()) break;
            double scale = 0.0;
            for (double d : hess.diag) scale = std::max(scale, std::abs(d));
            scale = std::max(scale, 1.0);
            const double slack = 8.0 * std::numeric_limits<double>::epsilon() * roundoff;

            bool accepted = false;
            std::vector<double> trial;
            double ft = 0.0, trial_roundoff = 0.0;
            const auto try_point = [&](std::vector<double> cand) {
                sync(cand);
                if (ordering) project_birkhoff(cand, *ordering, ordering_first_site);
                double ro = 0.0;
                const double fc = objective(cand, ro);
                if (!std::isfinite(fc)) return false;
                bool ok = fc < out.objective;
                if (!ok && fc <= out.objective + slack) {
                    std::vector<double> g2;
                    CyclicTridiagonal h2;
                    assemble(cand, g2, h2);
                    ok = max_abs(g2) < out.residual;
                }
                if (ok) {
                    trial = std::move(cand);
                    ft = fc;
                    trial_roundoff = ro;
                }
                return ok;
            };

            for (int attempt = 0; attempt < 24 && !accepted; ++attempt) {
                CyclicTridiagonal shifted = hess;
                for (double& d : shifted.diag) d += lambda;
                const auto fac = CyclicLdlt::factor(shifted);
                if (!fac) {
                    lambda = std::max(lambda * 10.0, 1e-10 * scale);
                    continue;
                }
                std::vector<double> step = fac->solve(grad);
                std::vector<double> cand = out.xs;
                apply_step(cand, step, -1.0);
                if (try_point(std::move(cand))) {
                    accepted = true;
                    lambda = lambda < 1e-9 * scale ? 0.0 : lambda * 0.1;
                } else {
                    lambda = std::max(lambda * 10.0, 1e-10 * scale);
                }
            }
            if (!accepted) {
                // gradient descent with step halving
                double t = 1.0 / scale;
                for (int halving = 0; halving < 60 && !accepted; ++halving, t *= 0.5) {
                    std::vector<double> cand = out.xs;
                    apply_step(cand, grad, -t);
                    accepted = try_point(std::move(cand));
                }
            }
            if (!accepted) break;  // stalled at roundoff
            out.xs = std::move(trial);
            out.objective = ft;
            roundoff = trial_roundoff;
            out.trace.push_back(ft);
        }
        return out;
    }

    double objective(const std::vector<double>& xs, double& roundoff) const {
        double s = 0.0;
        roundoff = 0.0;
        try {
            for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
                const double t = h_(xs[i], xs[i + 1]);
                s += t;
                roundoff += std::abs(t);
            }
            if (potentials_) {
                for (const auto& p : *potentials_) {
                    double v, g, c;
                    p.eval(xs[p.index], v, g, c);
                    s += v;
                    roundoff += std::abs(v);
                }
            }
        } catch (const WindowExceeded&) {
            return std::numeric_limits<double>::infinity();
        }
        return s;
    }

    // gradient and Hessian over the free variables
    void assemble(const std::vector<double>& xs, std::vector<double>& grad,
                  CyclicTridiagonal& hess) const {
        const std::size_t terms = xs.size() - 1;
        std::vector<Derivatives> d(terms);
        for (std::size_t t = 0; t < terms; ++t) d[t] = h_.derivatives(xs[t], xs[t + 1]);
        if (layout_ == Layout::periodic) {
            const std::size_t q = terms;
            grad.assign(q, 0.0);
            hess.diag.assign(q, 0.0);
            hess.coupling.assign(q, 0.0);
            for (std::size_t i = 0; i < q; ++i) {
                const Derivatives& prev = d[(i + q - 1) % q];
                grad[i] = prev.d2 + d[i].d1;
                hess.diag[i] = prev.d22 + d[i].d11;
                hess.coupling[i] = d[i].d12;
            }
        } else {
            const std::size_t n = terms - 1;
            grad.assign(n, 0.0);
            hess.diag.assign(n, 0.0);
            hess.coupling.assign(n, 0.0);
            for (std::size_t v = 0; v < n; ++v) {
                const std::size_t site = v + 1;
                grad[v] = d[site - 1].d2 + d[site].d1;
                hess.diag[v] = d[site - 1].d22 + d[site].d11;
                if (v + 1 < n) hess.coupling[v] = d[site].d12;
            }
            if (potentials_) {
                for (const auto& p : *potentials_) {
                    if (p.index == 0 || p.index >= terms) continue;
                    double val, g, c;
                    p.eval(xs[p.index], val, g, c);
                    grad[p.index - 1] += g;
                    hess.diag[p.index - 1] += c;
                }
            }
        }
    }

private:
    void sync(std::vector<double>& xs) const {
        if (layout_ == Layout::periodic) xs.back() = xs.front() + static_cast<double>(shift_);
    }

    void apply_step(std::vector<double>& xs, const std::vector<double>& step, double t) const {
        const std::size_t offset = layout_ == Layout::periodic ? 0 : 1;
        for (std::size_t v = 0; v < step.size(); ++v) xs[v + offset] += t * step[v];
        sync(xs);
    }

    const GeneratingFunction& h_;
    Layout layout_;
    long shift_;
    const std::vector<SitePotential>* potentials_;
};

double mod1(double x) { return x - std::floor(x); }

void normalize_lift(std::vector<double>& xs) {
    const double shift = std::floor(xs[0]);
    if (shift != 0.0)
        for (double& x : xs) x -= shift;
}

}  // namespace

bool birkhoff_order_check(const Configuration& c, const RotationClass& rc, double tol) {
    if (c.kind == ConfigKind::free_segment) return false;
    if (static_cast<long>(c.xs.size()) != rc.q + 1) return false;
    if (std::abs(c.xs[static_cast<std::size_t>(rc.q)] - c.xs[0] - static_cast<double>(rc.p)) > tol)
        return false;
    std::vector<std::pair<long, double>> by_slot;
    for (long i = 0; i < rc.q; ++i) {
        const RigidSlot r = rigid_slot(i, rc);
        by_slot.emplace_back(r.s, c.xs[static_cast<std::size_t>(i)] - static_cast<double>(r.n));
    }
    std::sort(by_slot.begin(), by_slot.end());
    for (std::size_t k = 1; k < by_slot.size(); ++k)
        if (by_slot[k].second < by_slot[k - 1].second - tol) return false;
    return by_slot.back().second - by_slot.front().second <= 1.0 + tol;
}

MinimizerResult minimize_periodic(const GeneratingFunction& h, const RotationClass& rc_in,
                                  const MinimizeOptions& opts) {
    const RotationClass rc = RotationClass::make(rc_in.p, rc_in.q);
    if (opts.restarts < 1) throw UsageError("minimize_periodic: restarts must be >= 1");
    if (!(opts.tol > 0.0)) throw UsageError("minimize_periodic: tol must be > 0");
    const std::size_t q = static_cast<std::size_t>(rc.q);
    const double omega = rc.value();

    ChainSolver solver(h, Layout::periodic, rc.p, nullptr);
    solver.ordering = rc;
    std::vector<ChainSolver::Outcome> runs(static_cast<std::size_t>(opts.restarts));
    parallel_for(runs.size(), [&](std::size_t r) {
        StreamRng rng(opts.seed, r);
        std::vector<double> xs(q + 1);
        const double x0 = static_cast<double>(r) / opts.restarts;
        for (std::size_t i = 0; i < q; ++i)
            xs[i] = x0 + static_cast<double>(i) * omega + opts.jitter * rng.symmetric();
        runs[r] = solver.run(std::move(xs), opts.tol, opts.max_iterations);
    });

    std::optional<std::size_t> best;
    double best_action = std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < runs.size(); ++r) {
        normalize_lift(runs[r].xs);
        if (runs[r].converged && runs[r].objective < best_action) best_action = runs[r].objective;
    }
    for (std::size_t r = 0; r < runs.size(); ++r) {
        if (!runs[r].converged || runs[r].objective > best_action + 1e-12) continue;
        if (!best || mod1(runs[r].xs[0]) < mod1(runs[*best].xs[0])) best = r;
    }
    if (!best) {
        std::size_t pick = 0;
        for (std::size_t r = 1; r < runs.size(); ++r)
            if (runs[r].residual < runs[pick].residual) pick = r;
        throw NumericalFailure("minimize_periodic " + std::to_string(rc.p) + "/" +
                                   std::to_string(rc.q) + " did not reach tolerance",
                               runs[pick].xs, runs[pick].residual);
    }
    ChainSolver::Outcome& o = runs[*best];
    MinimizerResult res;
    res.config.kind = ConfigKind::periodic;
    res.config.rc = rc;
    res.config.xs = std::move(o.xs);
    res.action = action(h, res.config);
    res.residual_inf = o.residual;
    res.restarts_used = opts.restarts;
    res.seed = opts.seed;
    res.action_trace = std::move(o.trace);
    return res;
}

MinimizerResult minimize_constrained(const GeneratingFunction& h, const RotationClass& rc_in,
                                     double a, const MinimizeOptions& opts,
                                     const std::vector<std::vector<double>>& hints) {
    const RotationClass rc = RotationClass::make(rc_in.p, rc_in.q);
    if (opts.restarts < 1) throw UsageError("minimize_constrained: restarts must be >= 1");
    const std::size_t q = static_cast<std::size_t>(rc.q);
    const double omega = rc.value();

    const auto finish = [&](std::vector<double> xs, double residual, std::vector<double> trace,
                            int used) {
        MinimizerResult res;
        res.config.kind = ConfigKind::constrained;
        res.config.rc = rc;
        res.config.anchor = a;
        res.config.xs = std::move(xs);
        res.action = action(h, res.config);
        res.residual_inf = residual;
        res.restarts_used = used;
        res.seed = opts.seed;
        res.action_trace = std::move(trace);
        return res;
    };

    if (q == 1) {
        std::vector<double> xs{a, a + static_cast<double>(rc.p)};
        MinimizerResult res = finish(std::move(xs), 0.0, {}, 0);
        res.action_trace = {res.action};
        return res;
    }

    std::vector<std::vector<double>> starts;
    for (const auto& hint : hints) {
        if (hint.size() < q) throw UsageError("minimize_constrained: hint shorter than q");
        std::vector<double> xs(hint.begin(), hint.begin() + static_cast<long>(q));
        xs[0] = a;
        xs.push_back(a + static_cast<double>(rc.p));
        starts.push_back(std::move(xs));
    }
    for (int r = 0; r < opts.restarts; ++r) {
        StreamRng rng(opts.seed, static_cast<std::uint64_t>(r));
        std::vector<double> xs(q + 1);
        xs[0] = a;
        for (std::size_t i = 1; i < q; ++i)
            xs[i] = a + static_cast<double>(i) * omega + (r == 0 ? 0.0 : opts.jitter * rng.symmetric());
        xs[q] = a + static_cast<double>(rc.p);
        starts.push_back(std::move(xs));
    }

    ChainSolver solver(h, Layout::pinned, 0, nullptr);
    solver.ordering = rc;
    solver.ordering_first_site = 1;
    std::vector<ChainSolver::Outcome> runs(starts.size());
    parallel_for(runs.size(), [&](std::size_t i) {
        runs[i] = solver.run(starts[i], opts.tol, opts.max_iterations);
    });

    std::optional<std::size_t> best;
    for (std::size_t i = 0; i < runs.size(); ++i) {
        if (!runs[i].converged) continue;
        if (!best || runs[i].objective < runs[*best].objective - 1e-12) best = i;
    }
    if (!best) {
        std::size_t pick = 0;
        for (std::size_t i = 1; i < runs.size(); ++i)
            if (runs[i].residual < runs[pick].residual) pick = i;
        throw NumericalFailure("minimize_constrained did not reach tolerance", runs[pick].xs,
                               runs[pick].residual);
    }
    return finish(std::move(runs[*best].xs), runs[*best].residual, std::move(runs[*best].trace),
                  static_cast<int>(runs.size()));
}

MinimizerResult refine_periodic(const GeneratingFunction& h, const RotationClass& rc_in,
                                std::vector<double> xs, const MinimizeOptions& opts) {
    const RotationClass rc = RotationClass::make(rc_in.p, rc_in.q);
    if (static_cast<long>(xs.size()) != rc.q + 1) throw UsageError("refine_periodic: need q + 1 points");
    ChainSolver solver(h, Layout::periodic, rc.p, nullptr);
    solver.ordering = rc;
    auto o = solver.run(std::move(xs), opts.tol, opts.max_iterations);
    if (!o.converged) throw NumericalFailure("refine_periodic did not reach tolerance", o.xs, o.residual);
    normalize_lift(o.xs);
    MinimizerResult res;
    res.config.kind = ConfigKind::periodic;
    res.config.rc = rc;
    res.config.xs = std::move(o.xs);
    res.action = action(h, res.config);
    res.residual_inf = o.residual;
    res.restarts_used = 1;
    res.seed = opts.seed;
    res.action_trace = std::move(o.trace);
    return res;
}

OrbitSample induced_orbit(const GeneratingFunction& h, const Configuration& c) {
    if (c.xs.size() < 2) throw UsageError("induced_orbit needs at least two points");
    OrbitSample o;
    for (std::size_t i = 0; i + 1 < c.xs.size(); ++i)
        o.points.push_back({c.xs[i], -h.partials(c.xs[i], c.xs[i + 1]).d1});
    const std::size_t n = c.xs.size() - 1;
    o.points.push_back({c.xs[n], h.partials(c.xs[n - 1], c.xs[n]).d2});
    return o;
}

ChainResult minimize_pinned_chain(const GeneratingFunction& h, std::vector<double> start,
                                  const std::vector<SitePotential>& potentials, double tol,
                                  int max_iterations) {
    if (start.size() < 3) throw UsageError("minimize_pinned_chain needs an interior point");
    ChainSolver solver(h, Layout::pinned, 0, &potentials);
    auto o = solver.run(std::move(start), tol, max_iterations);
    return {std::move(o.xs), o.objective, o.residual, o.converged, std::move(o.trace)};
}

}  // namespace mather_twist
