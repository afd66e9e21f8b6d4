#pragma once

// Minimal measures on periodic minimizers, the beta/alpha pair, c-minimal
// rotation selection, frequency scans for regions of instability and the
// connecting-orbit heuristic.

#include <functional>
#include <optional>
#include <vector>

#include "mather_twist/barriers.hpp"
#include "mather_twist/generating_function.hpp"
#include "mather_twist/variational.hpp"

namespace mather_twist {

/// Uniform measure on one period of a periodic minimizing orbit.
struct EmpiricalMeasure {
    OrbitSample orbit;  ///< q + 1 points, x_q = x_0 + p
    RotationClass rc;
    std::vector<double> weights;  ///< 1/q each

    static EmpiricalMeasure from_minimizer(const GeneratingFunction& h, const MinimizerResult& m);
    /// Mean of f over the q support points.
    double expectation(const std::function<double(const PhasePoint&)>& f) const;
};

/// (1/q) sum h(x_i, x_{i+1}) over one period. Throws UsageError if the orbit
/// does not close up as x_q = x_0 + p.
double average_action(const GeneratingFunction& h, const EmpiricalMeasure& mu);

/// Rotation number of the carrying orbit; exact p/q.
double rotation_vector(const EmpiricalMeasure& mu);

struct BetaEntry {
    RotationClass rc;
    double omega;
    double beta;
};

struct BetaSamples {
    std::vector<BetaEntry> entries;  ///< omega increasing
    double k = 0.0;
    int farey_order = 0;
};

/// Minimal average action of the class.
double beta(const GeneratingFunction& h, const RotationClass& rc, const MinimizeOptions& opts = {});

/// Reduced p/q in [0, 1] with q <= order, increasing.
std::vector<RotationClass> farey_sequence(int order);

/// beta at every node of the Farey sequence of the given order.
BetaSamples beta_grid(const GeneratingFunction& h, int farey_order, const MinimizeOptions& opts = {});

/// Largest amount by which an entry lies above the chord of its neighbours
/// (<= 0 for convex samples).
double convexity_defect(const BetaSamples& s);
bool is_convex(const BetaSamples& s, double tol = 1e-9);

/// max over samples of c * omega - beta. A lower bound of the true alpha.
double alpha(double c, const BetaSamples& s);

struct ConjugateSamples {
    std::vector<std::pair<double, double>> entries;  ///< (c, alpha(c))
    int farey_order = 0;
};

ConjugateSamples alpha_grid(const std::vector<double>& cs, const BetaSamples& s);

/// sup_c (c * omega - alpha(c)) of the sample conjugate, i.e. the lower convex
/// hull of the samples at omega. Outside the sampled range it is +inf.
double biconjugate(double omega, const BetaSamples& s);

/// Sample classes whose c * omega - beta is within 1e-12 of the maximum.
std::vector<RotationClass> c_minimal_rotation(double c, const BetaSamples& s);

/// Minimizing orbits of the given classes, standing in for the support of
/// the c-minimal measures.
std::vector<EmpiricalMeasure> mc_orbits(const GeneratingFunction& h,
                                        const std::vector<RotationClass>& classes,
                                        const MinimizeOptions& opts = {});

/// [left, right] slopes of beta at the node with index i (one-sided at the ends).
std::pair<double, double> subdifferential(const BetaSamples& s, std::size_t i);

struct InstabilityInterval {
    std::size_t first, last;  ///< indices into the frequency grid, all destroyed
    double a, b;              ///< grid frequencies at first and last
    /// Neighbouring grid frequencies with verdict exists-likely, if any.
    std::optional<double> surviving_below, surviving_above;
};

struct InstabilityReport {
    double k = 0.0;
    std::vector<double> grid;
    std::vector<CircleVerdict> verdicts;
    std::vector<double> max_barrier;
    std::vector<InstabilityInterval> intervals;
};

/// invariant_circle_test at every grid frequency; maximal runs of destroyed
/// verdicts become intervals. Inconclusive points end a run.
InstabilityReport instability_scan(const GeneratingFunction& h, const std::vector<double>& omega_grid,
                                   int depth, double tol, int grid_m = 64,
                                   const BarrierOptions& opts = {});

/// Maximal destroyed runs of a verdict sequence.
std::vector<InstabilityInterval> destroyed_runs(const std::vector<double>& grid,
                                                const std::vector<CircleVerdict>& verdicts);

struct ConnectingOptions {
    MinimizeOptions minimize;
    double joint_tol = 1e-3;
    /// Half-width of the window around each joint's target lift.
    double joint_window = 0.5;
    int max_iterations = 400;
};

enum class ConnectVerdict { connected_candidate, obstruction };

struct ConnectingResult {
    std::vector<RotationClass> schedule;
    std::vector<long> lengths;
    Configuration config;                 ///< free segment of sum(lengths) + 1 points
    std::vector<std::size_t> joints;      ///< indices into config.xs
    std::vector<double> joint_residuals;  ///< |EL residual| of h at each joint
    std::vector<double> closed_forms;     ///< c_i for each scheduled class
    ConnectVerdict verdict = ConnectVerdict::connected_candidate;
    std::size_t worst_joint = 0;
    double max_interior_residual = 0.0;   ///< EL residual away from joints
};

/// Concatenates minimal segments, one per scheduled class and T_i steps long.
/// The chain starts on the first class's minimizer and ends on the last
/// one's; each joint is free inside a window of +-joint_window around the lift
/// that keeps the preceding segments at their scheduled mean advance. Joints
/// held at a window edge carry a nonzero EL residual.
ConnectingResult connecting_heuristic(const GeneratingFunction& h,
                                      const std::vector<RotationClass>& schedule,
                                      const std::vector<long>& lengths,
                                      const ConnectingOptions& opts = {});

const char* to_string(ConnectVerdict v);

}  // namespace mather_twist
