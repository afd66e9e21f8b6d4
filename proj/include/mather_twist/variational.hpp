#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "mather_twist/generating_function.hpp"
#include "mather_twist/twist_dynamics.hpp"

namespace mather_twist {

/// Reduced rational rotation type p/q, q >= 1.
struct RotationClass {
    long p = 0;
    long q = 1;

    /// Throws UsageError unless q >= 1 and gcd(|p|, q) = 1.
    static RotationClass make(long p, long q);
    double value() const { return static_cast<double>(p) / static_cast<double>(q); }
    friend bool operator==(const RotationClass&, const RotationClass&) = default;
};

enum class ConfigKind { free_segment, periodic, constrained };

/// Finite segment of lifted points. For periodic and constrained kinds
/// xs.size() == q + 1 and xs[q] == xs[0] + p; constrained additionally pins
/// xs[0] == anchor.
struct Configuration {
    std::vector<double> xs;
    ConfigKind kind = ConfigKind::free_segment;
    RotationClass rc;
    double anchor = 0.0;

    static Configuration free_segment(std::vector<double> xs);
    /// Builds a periodic configuration from x_0..x_{q-1}; appends x_q = x_0 + p.
    static Configuration periodic(RotationClass rc, std::vector<double> first_q);
};

/// Sum of h over consecutive pairs.
double action(const GeneratingFunction& h, const Configuration& c);

/// Euler-Lagrange residuals d2 h(x_{i-1}, x_i) + d1 h(x_i, x_{i+1}). For free
/// segments and constrained configurations this covers the interior indices;
/// for periodic configurations all q sites (with wrap-around) are included.
std::vector<double> el_residual(const GeneratingFunction& h, const Configuration& c);

double max_abs(const std::vector<double>& v);

/// True iff the lifted orbit {x_i + j} is ordered like the rigid rotation by p/q.
bool birkhoff_order_check(const Configuration& c, const RotationClass& rc, double tol = 1e-12);

struct MinimizeOptions {
    double tol = 1e-10;  ///< EL residual (inf-norm) target
    int restarts = 8;
    std::uint64_t seed = 0;
    double jitter = 0.05;
    int max_iterations = 400;
};

struct MinimizerResult {
    Configuration config;
    double action = 0.0;
    double residual_inf = 0.0;
    int restarts_used = 0;
    std::uint64_t seed = 0;
    /// Accepted action values of the returned run, in order.
    std::vector<double> action_trace;
};

/// Global minimizer of the periodic (p, q) action over x_0..x_{q-1}.
/// Damped Newton over restarts; throws NumericalFailure when no restart reaches tol.
MinimizerResult minimize_periodic(const GeneratingFunction& h, const RotationClass& rc,
                                  const MinimizeOptions& opts = {});

/// As minimize_periodic with x_0 = a held fixed. Extra starting configurations
/// (periodic layout, x_0 is overwritten by a) are tried before the restarts;
/// ties within 1e-12 keep the earliest candidate.
MinimizerResult minimize_constrained(const GeneratingFunction& h, const RotationClass& rc, double a,
                                     const MinimizeOptions& opts = {},
                                     const std::vector<std::vector<double>>& hints = {});

/// Damped Newton from a given periodic configuration (x_0..x_q) without restarts.
/// Throws NumericalFailure when tol is not reached.
MinimizerResult refine_periodic(const GeneratingFunction& h, const RotationClass& rc,
                                std::vector<double> xs, const MinimizeOptions& opts = {});

/// Orbit (x_i, y_i) induced by a configuration: y_i = -d1 h(x_i, x_{i+1}) and
/// the final momentum d2 h(x_{n-1}, x_n).
OrbitSample induced_orbit(const GeneratingFunction& h, const Configuration& c);

/// Site potential V(x) added to the chain action at a fixed index.
struct SitePotential {
    std::size_t index;
    std::function<void(double x, double& value, double& slope, double& curvature)> eval;
};

struct ChainResult {
    std::vector<double> xs;
    double objective;
    double residual_inf;  ///< of the objective's gradient
    bool converged;
    std::vector<double> trace;
};

/// Minimizes sum_i h(x_i, x_{i+1}) + sum V_j(x_j) over xs[1..n-1] with both
/// ends fixed, starting from `start`. Used for connecting segments.
ChainResult minimize_pinned_chain(const GeneratingFunction& h, std::vector<double> start,
                                  const std::vector<SitePotential>& potentials, double tol,
                                  int max_iterations);

}  // namespace mather_twist
