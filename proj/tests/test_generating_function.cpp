#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "mather_twist/errors.hpp"
#include "mather_twist/expression.hpp"
#include "mather_twist/generating_function.hpp"

using namespace mather_twist;
using doctest::Approx;

namespace {
constexpr double pi = std::numbers::pi;
}

TEST_CASE("standard family values") {
    CHECK(GeneratingFunction::standard(0.0)(0.0, 0.5) == Approx(0.125).epsilon(1e-15));
    CHECK(GeneratingFunction::standard(1.0)(0.0, 0.0) == Approx(-1.0 / (4 * pi * pi)).epsilon(1e-15));
    CHECK(std::abs(GeneratingFunction::standard(1.0)(0.25, 0.25)) < 1e-17);
    CHECK(-1.0 / (4 * pi * pi) == Approx(-0.02533030).epsilon(1e-6));
}

TEST_CASE("standard family partials") {
    for (double k : {0.0, 0.3, 1.0, 2.5}) {
        const auto h = GeneratingFunction::standard(k);
        for (double x : {-0.7, 0.0, 0.31, 2.2}) CHECK(h.partials(x, x + 0.4).d12 == -1.0);
    }
    CHECK(GeneratingFunction::standard(0.0).partials(0.0, 0.5).d1 == -0.5);
    const auto p = GeneratingFunction::standard(1.0).partials(0.25, 0.25);
    CHECK(p.d1 == Approx(1.0 / (2 * pi)).epsilon(1e-15));
    CHECK(p.d1 == Approx(0.15915494).epsilon(1e-7));
    CHECK(p.d2 == 0.0);
    const auto m = GeneratingFunction::standard(1.0).momenta(0.25, 0.5);
    CHECK(m.y == Approx(0.25 - 1.0 / (2 * pi)));
    CHECK(m.y_next == Approx(0.25));
}

TEST_CASE("coercivity window") {
    const auto h = GeneratingFunction::standard(1.0, 2.0);
    CHECK_NOTHROW(h(0.0, 2.0));
    CHECK_THROWS_AS(h(0.0, 2.0001), WindowExceeded);
    CHECK_THROWS_AS(h.partials(1.0, -1.5), WindowExceeded);
    CHECK_THROWS_AS(GeneratingFunction::standard(1.0, 0.0), UsageError);
    CHECK_THROWS_AS(GeneratingFunction::standard(-0.1), UsageError);
}

TEST_CASE("periodicity under integer shifts") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-3.0, 3.0), gap(-4.0, 4.0);
    const auto custom = GeneratingFunction::custom("0.5*(x'-x)^2 - 0.1*cos(2*pi*x) + 0.05*sin(2*pi*x')");
    for (const auto& h : {GeneratingFunction::standard(1.3), custom}) {
        for (int i = 0; i < 1000; ++i) {
            const double x = u(rng), xp = x + gap(rng);
            const double v = h(x, xp);
            CHECK(std::abs(h(x + 1.0, xp + 1.0) - v) <= 1e-12 * (1.0 + std::abs(v)));
        }
    }
}

TEST_CASE("twist check") {
    for (double k : {0.0, 1.0, 2.0}) {
        const auto r = check_twist(GeneratingFunction::standard(k), 64);
        CHECK(r.pass);
        CHECK(r.min_twist == 1.0);
        CHECK(r.min_twist >= 0.999);
    }
    const auto bad = check_twist(GeneratingFunction::custom("0.5*(x'-x)^2 + cos(2*pi*(x'-x))*1.0"), 64);
    CHECK_FALSE(bad.pass);
    CHECK(bad.min_twist < 0.0);
    CHECK_THROWS_AS(check_twist(GeneratingFunction::standard(1.0), 1), UsageError);
}

TEST_CASE("derivative self-check") {
    CHECK(derivative_selfcheck(GeneratingFunction::standard(1.0), 1e-6, 32).pass);
    CHECK(derivative_selfcheck(GeneratingFunction::standard(0.0), 1e-10, 8).pass);
    for (double k : {0.0, 1.0, 2.0}) CHECK(derivative_selfcheck(GeneratingFunction::standard(k), 1e-6, 64).pass);
    CHECK(derivative_selfcheck(GeneratingFunction::custom("0.5*(x'-x)^2 - 0.2*cos(2*pi*x)"), 1e-6, 16).pass);

    DerivativeOverrides wrong;
    wrong.d1 = Expression::parse("-(x'-x) + 0.3*sin(2*pi*x)");
    const GeneratingFunction h(GeneratingFunctionSpec{Family::custom, 0.0, "0.5*(x'-x)^2 - 0.2*cos(2*pi*x)/(4*pi^2)", 4.0},
                               wrong);
    const auto r = derivative_selfcheck(h, 1e-6, 16);
    CHECK_FALSE(r.pass);
    CHECK(r.worst_quantity == "d1");
    CHECK(r.worst_error > 1e-3);
    CHECK(std::abs(std::sin(2 * pi * r.at_x)) > 0.1);  // located where the wrong term bites

    CHECK_THROWS_AS(derivative_selfcheck(GeneratingFunction::standard(1.0), 0.0, 8), UsageError);
}

TEST_CASE("custom family matches the standard closed form") {
    const auto s = GeneratingFunction::standard(0.8);
    const auto c = GeneratingFunction::custom("1/2*(x′-x)^2 - 0.8/(4*pi^2)*cos(2*pi*x)");
    for (double x : {-0.4, 0.1, 0.77})
        for (double d : {-1.2, 0.0, 0.35, 2.0}) {
            CHECK(c(x, x + d) == Approx(s(x, x + d)).epsilon(1e-13));
            const auto a = c.derivatives(x, x + d), b = s.derivatives(x, x + d);
            CHECK(a.d1 == Approx(b.d1).epsilon(1e-12));
            CHECK(a.d2 == Approx(b.d2).epsilon(1e-12));
            CHECK(a.d11 == Approx(b.d11).epsilon(1e-12));
            CHECK(a.d12 == Approx(b.d12).epsilon(1e-12));
            CHECK(a.d22 == Approx(b.d22).epsilon(1e-12));
        }
}

TEST_CASE("expression parser") {
    CHECK(Expression::parse("2^3^2")(0, 0) == 512.0);
    CHECK(Expression::parse("-2^2")(0, 0) == -4.0);
    CHECK(Expression::parse("x*xp - x'")(2.0, 3.0) == 3.0);
    CHECK(Expression::parse("exp(log(3)) + sqrt(16) + e - e")(0, 0) == Approx(7.0));
    CHECK(Expression::parse("sin(pi/2)")(0, 0) == Approx(1.0));
    CHECK_THROWS_AS(Expression::parse("x +"), UsageError);
    CHECK_THROWS_AS(Expression::parse("foo(x)"), UsageError);
    CHECK_THROWS_AS(Expression::parse("(x"), UsageError);
    CHECK_THROWS_AS(Expression::parse(""), UsageError);
    try {
        Expression::parse("x + $");
    } catch (const UsageError& e) {
        CHECK(std::string(e.what()).find("5") != std::string::npos);
    }

    const auto e = Expression::parse("x^2*sin(xp)");
    const auto dx = e.derivative(Variable::x), dxp = e.derivative(Variable::xp);
    CHECK(dx(0.7, 0.3) == Approx(2 * 0.7 * std::sin(0.3)));
    CHECK(dxp(0.7, 0.3) == Approx(0.49 * std::cos(0.3)));
    CHECK(Expression::parse("3*x + 2").derivative(Variable::x).is_constant());
    CHECK(Expression::parse("x'").derivative(Variable::x).constant_value() == 0.0);
}
