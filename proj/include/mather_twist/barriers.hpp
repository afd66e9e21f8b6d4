#pragma once

// Peierls barriers of periodic minimizers, their limits along continued
// fraction convergents, the invariant-circle criterion, and the discrete
// n-step cost tables h_c^n with the derived barrier functions B_c and B_c^*.

#include <string>
#include <vector>

#include "mather_twist/generating_function.hpp"
#include "mather_twist/rotation.hpp"
#include "mather_twist/variational.hpp"

namespace mather_twist {

/// Barrier values below this are indistinguishable from roundoff.
inline constexpr double kBarrierNoiseFloor = 1e-11;
/// |trend slope| (decades per convergent depth) up to which a barrier
/// sequence counts as settled; steeper decay counts as decreasing.
inline constexpr double kStableSlope = 0.2;

enum class BarrierLabel { peierls, peierls_limit, bc, bc_star };

struct BarrierProfile {
    BarrierLabel label = BarrierLabel::peierls;
    RotationClass rc;  ///< peierls: the class; peierls_limit: deepest convergent
    double omega = 0.0;
    int depth = 0;
    double c = 0.0;
    std::vector<double> grid;    ///< base points a in [0, 1), increasing
    std::vector<double> values;  ///< empty when inconclusive
    bool inconclusive = false;

    double max_value() const;
    double min_value() const;
    /// Grid points with value <= tol.
    std::vector<double> zero_set(double tol) const;
};

struct BarrierOptions {
    MinimizeOptions minimize;
    int constrained_restarts = 2;
    /// Add the minimizer's orbit points to the uniform grid, so the zero of the
    /// barrier is sampled exactly.
    bool include_orbit_points = true;
};

/// Uniform grid of grid_m points on [0, 1), optionally merged with the
/// minimizer's orbit points.
std::vector<double> barrier_grid(int grid_m, const Configuration* minimizer);

/// P(a) = (min action with x_0 = a) - (min periodic action), for a on the grid.
BarrierProfile peierls_rational(const GeneratingFunction& h, const RotationClass& rc, int grid_m,
                                const BarrierOptions& opts = {});

/// Same, on an explicit grid, with the periodic minimizer supplied.
std::vector<double> peierls_values(const GeneratingFunction& h, const MinimizerResult& base,
                                   const std::vector<double>& grid, const BarrierOptions& opts,
                                   double* refined_base_action = nullptr);

enum class Trend { vanished, decreasing, stable, growing, terminal };

struct LimitDiagnostics {
    std::vector<RotationClass> classes;  ///< convergents used, q increasing
    std::vector<double> max_by_depth;    ///< grid max of each convergent's barrier
    double slope = 0.0;                  ///< log10 change per depth over the last three depths
    Trend trend = Trend::vanished;
};

struct PeierlsLimit {
    BarrierProfile profile;  ///< barrier of the deepest convergent
    LimitDiagnostics diagnostics;
};

/// Barrier profiles along the convergents of omega. The reported profile is
/// the deepest one; the trend of the per-depth maxima is classified as
/// vanished (below the noise floor), decreasing (slope < -kStableSlope),
/// stable (|slope| <= kStableSlope), growing, or terminal (omega rational).
PeierlsLimit peierls_limit(const GeneratingFunction& h, double omega, int depth, int grid_m,
                           const BarrierOptions& opts = {});

enum class CircleVerdict { exists_likely, destroyed, inconclusive };

struct CircleTest {
    CircleVerdict verdict;
    double max_barrier;
    double tol;
    PeierlsLimit evidence;
};

/// destroyed: max > tol with a stable (or terminal) trend; exists-likely: max <
/// tol with a vanished/decreasing (or terminal) trend; otherwise inconclusive.
CircleTest invariant_circle_test(const GeneratingFunction& h, double omega, int depth, double tol,
                                 int grid_m = 64, const BarrierOptions& opts = {});

CircleVerdict classify_circle(const LimitDiagnostics& d, double tol);

const char* to_string(Trend t);
const char* to_string(CircleVerdict v);

/// h_c(x, x') = h(x, x') - c (x' - x) + alpha_c
double hc_cost(const GeneratingFunction& h, double c, double alpha_c, double x, double xp);

/// h_c^n on a uniform circle grid, values row-major: values[i * m + j] = h_c^n(xi_i, eta_j).
struct DPValueTable {
    double c = 0.0;
    double alpha_c = 0.0;
    int n = 1;
    int m = 0;
    std::vector<double> grid;
    std::vector<double> values;

    double at(int i, int j) const { return values[static_cast<std::size_t>(i) * m + j]; }
};

/// One-step table: min over integer lifts with |eta + j - xi| <= window.
DPValueTable hc_one_step(const GeneratingFunction& h, double c, double alpha_c, int grid_m);

/// Min-plus composition: result(i, j) = min_l (lhs(i, l) + step(l, j)), smallest l on ties.
DPValueTable compose(const DPValueTable& lhs, const DPValueTable& step);

DPValueTable hc_n(const GeneratingFunction& h, double c, double alpha_c, int n, int grid_m);

/// Tables for n = 1..n_max, index n - 1.
std::vector<DPValueTable> hc_tables(const GeneratingFunction& h, double c, double alpha_c,
                                    int n_max, int grid_m);

/// min over n in [2, n_max] of h_c^n, standing in for h_c^infinity.
DPValueTable hc_infinity(const std::vector<DPValueTable>& tables);

/// B_c(xi) = h_c^inf(xi, xi).
BarrierProfile barrier_B(const GeneratingFunction& h, double c, double alpha_c, int grid_m, int n_max);
BarrierProfile barrier_B(const DPValueTable& hinf);

/// B_c^*(m) = min over xi, eta in the zero set of B_c of
/// h_c^inf(xi, m) + h_c^inf(m, eta) - h_c^inf(xi, eta). Inconclusive if the
/// zero set is empty at tol_zero.
BarrierProfile bc_star(const GeneratingFunction& h, double c, double alpha_c, int grid_m, int n_max,
                       double tol_zero = 1e-9);
BarrierProfile bc_star(const DPValueTable& hinf, double tol_zero);

}  // namespace mather_twist
