#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "mather_twist/barriers.hpp"
#include "mather_twist/cli.hpp"
#include "mather_twist/errors.hpp"
#include "mather_twist/generating_function.hpp"
#include "mather_twist/mather_structures.hpp"
#include "mather_twist/rotation.hpp"
#include "mather_twist/twist_dynamics.hpp"
#include "mather_twist/variational.hpp"

namespace py = pybind11;
using namespace mather_twist;

namespace {

MinimizeOptions options(int restarts, std::uint64_t seed, double tol) {
    MinimizeOptions o;
    o.restarts = restarts;
    o.seed = seed;
    o.tol = tol;
    return o;
}

py::dict minimizer_dict(const MinimizerResult& m) {
    py::dict d;
    d["p"] = m.config.rc.p;
    d["q"] = m.config.rc.q;
    d["xs"] = m.config.xs;
    d["action"] = m.action;
    d["residual_inf"] = m.residual_inf;
    d["restarts_used"] = m.restarts_used;
    d["seed"] = m.seed;
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Twist maps, periodic minimizers, Peierls barriers and minimal measures";

    py::register_exception<UsageError>(m, "UsageError", PyExc_ValueError);
    py::register_exception<NumericalFailure>(m, "NumericalFailure", PyExc_RuntimeError);
    py::register_exception<MomentumOutOfRange>(m, "MomentumOutOfRange", PyExc_ArithmeticError);
    py::register_exception<WindowExceeded>(m, "WindowExceeded", PyExc_ArithmeticError);

    m.attr("GOLDEN_MEAN") = kGoldenMean;

    py::class_<GeneratingFunction>(m, "GeneratingFunction")
        .def_static("standard", &GeneratingFunction::standard, py::arg("k"), py::arg("window") = 4.0)
        .def_static("custom", &GeneratingFunction::custom, py::arg("expr"), py::arg("window") = 4.0)
        .def("__call__", &GeneratingFunction::operator(), py::arg("x"), py::arg("xp"))
        .def("partials", [](const GeneratingFunction& h, double x, double xp) {
            const Derivatives d = h.derivatives(x, xp);
            return py::make_tuple(d.d1, d.d2, d.d11, d.d12, d.d22);
        }, "(d1, d2, d11, d12, d22) at (x, xp)")
        .def_property_readonly("window", &GeneratingFunction::window);

    m.def("check_twist", [](const GeneratingFunction& h, int grid_n) {
        const TwistReport r = check_twist(h, grid_n);
        return py::make_tuple(r.min_twist, r.pass);
    }, py::arg("h"), py::arg("grid_n") = 64);

    m.def("derivative_selfcheck", [](const GeneratingFunction& h, double tol, int grid_n) {
        const SelfCheckReport r = derivative_selfcheck(h, tol, grid_n);
        return py::make_tuple(r.pass, r.worst_error, r.worst_quantity);
    }, py::arg("h"), py::arg("tol") = 1e-6, py::arg("grid_n") = 64);

    m.def("forward", [](const GeneratingFunction& h, double x, double y) {
        const PhasePoint p = forward(h, x, y);
        return py::make_tuple(p.x, p.y);
    }, py::arg("h"), py::arg("x"), py::arg("y"));

    m.def("iterate", [](const GeneratingFunction& h, double x, double y, long n) {
        const OrbitSample o = iterate(h, x, y, n);
        std::vector<std::pair<double, double>> pts;
        for (const auto& p : o.points) pts.emplace_back(p.x, p.y);
        return pts;
    }, py::arg("h"), py::arg("x"), py::arg("y"), py::arg("n"));

    m.def("rotation_number", [](const std::vector<double>& xs) {
        OrbitSample o;
        for (double x : xs) o.points.push_back({x, 0.0});
        return rotation_number(o).value;
    }, py::arg("xs"), "rotation number of a lifted angle sequence");

    m.def("convergents", [](double omega, int depth) {
        std::vector<std::pair<long, long>> out;
        for (const auto& rc : convergents(omega, depth).entries) out.emplace_back(rc.p, rc.q);
        return out;
    }, py::arg("omega"), py::arg("depth"));

    m.def("minimize_periodic", [](const GeneratingFunction& h, long p, long q, int restarts,
                                  std::uint64_t seed, double tol) {
        return minimizer_dict(minimize_periodic(h, RotationClass::make(p, q), options(restarts, seed, tol)));
    }, py::arg("h"), py::arg("p"), py::arg("q"), py::arg("restarts") = 8, py::arg("seed") = 0,
       py::arg("tol") = 1e-10);

    m.def("peierls_barrier", [](const GeneratingFunction& h, long p, long q, int grid_m) {
        const BarrierProfile b = peierls_rational(h, RotationClass::make(p, q), grid_m);
        return py::make_tuple(b.grid, b.values);
    }, py::arg("h"), py::arg("p"), py::arg("q"), py::arg("grid_m") = 64);

    m.def("circle_test", [](const GeneratingFunction& h, double omega, int depth, double tol, int grid_m) {
        const CircleTest t = invariant_circle_test(h, omega, depth, tol, grid_m);
        py::dict d;
        d["verdict"] = to_string(t.verdict);
        d["trend"] = to_string(t.evidence.diagnostics.trend);
        d["max_barrier"] = t.max_barrier;
        d["max_by_depth"] = t.evidence.diagnostics.max_by_depth;
        return d;
    }, py::arg("h"), py::arg("omega"), py::arg("depth") = 8, py::arg("tol") = 1e-9, py::arg("grid_m") = 64);

    m.def("beta_grid", [](const GeneratingFunction& h, int order) {
        std::vector<std::tuple<long, long, double>> out;
        for (const auto& e : beta_grid(h, order).entries) out.emplace_back(e.rc.p, e.rc.q, e.beta);
        return out;
    }, py::arg("h"), py::arg("farey_order") = 8);

    m.def("alpha", [](const GeneratingFunction& h, const std::vector<double>& cs, int order) {
        const BetaSamples s = beta_grid(h, order);
        std::vector<double> out;
        for (double c : cs) out.push_back(alpha(c, s));
        return out;
    }, py::arg("h"), py::arg("cs"), py::arg("farey_order") = 8);

    m.def("connect", [](const GeneratingFunction& h, const std::vector<std::pair<long, long>>& schedule,
                        const std::vector<long>& lengths, double joint_tol) {
        std::vector<RotationClass> rcs;
        for (const auto& [p, q] : schedule) rcs.push_back(RotationClass::make(p, q));
        ConnectingOptions o;
        o.joint_tol = joint_tol;
        const ConnectingResult r = connecting_heuristic(h, rcs, lengths, o);
        py::dict d;
        d["verdict"] = to_string(r.verdict);
        d["joint_residuals"] = r.joint_residuals;
        d["xs"] = r.config.xs;
        return d;
    }, py::arg("h"), py::arg("schedule"), py::arg("lengths"), py::arg("joint_tol") = 1e-3);

    m.def("cli", [](const std::vector<std::string>& args) {
        std::vector<const char*> argv{"mather-twist"};
        for (const auto& a : args) argv.push_back(a.c_str());
        std::ostringstream out, err;
        const int code = cli_dispatch(static_cast<int>(argv.size()), argv.data(), out, err);
        return py::make_tuple(code, out.str(), err.str());
    }, py::arg("args"), "run the command-line front end; returns (exit code, stdout, stderr)");
}
