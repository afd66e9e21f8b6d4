#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "mather_twist/errors.hpp"
#include "mather_twist/twist_dynamics.hpp"
#include "oracles.hpp"

using namespace mather_twist;
using doctest::Approx;

TEST_CASE("forward map examples") {
    auto p = forward(GeneratingFunction::standard(0.0), 0.0, 0.3);
    CHECK(p.x == Approx(0.3).epsilon(1e-14));
    CHECK(p.y == Approx(0.3).epsilon(1e-14));

    p = forward(GeneratingFunction::standard(1.0), 0.0, 0.0);
    CHECK(std::abs(p.x) < 1e-14);
    CHECK(std::abs(p.y) < 1e-14);

    p = forward(GeneratingFunction::standard(1.0), 0.25, 0.0);
    const double s = 1.0 / (2 * std::numbers::pi);
    CHECK(p.x == Approx(0.25 + s).epsilon(1e-13));
    CHECK(p.y == Approx(s).epsilon(1e-13));
    CHECK(p.x == Approx(0.40915494).epsilon(1e-8));
}

TEST_CASE("forward residual and momenta") {
    const auto h = GeneratingFunction::standard(1.7);
    for (double x : {-1.3, 0.1, 0.5, 0.93})
        for (double y : {-1.1, -0.2, 0.0, 0.4, 2.5}) {
            const auto p = forward(h, x, y);
            const auto part = h.partials(x, p.x);
            CHECK(std::abs(y + part.d1) <= 1e-12);
            CHECK(p.y == part.d2);
        }
}

TEST_CASE("root-found map equals the closed-form standard map") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> ux(0.0, 1.0), uy(-1.0, 1.0), uk(0.0, 2.5);
    for (int i = 0; i < 1000; ++i) {
        const double k = uk(rng), x = ux(rng), y = uy(rng);
        const auto p = forward(GeneratingFunction::standard(k), x, y);
        const auto [xo, yo] = oracle::std_map(k, x, y);
        CHECK(std::abs(p.x - xo) <= 1e-10);
        CHECK(std::abs(p.y - yo) <= 1e-10);
    }
}

TEST_CASE("twist monotonicity") {
    const auto h = GeneratingFunction::standard(2.0);
    for (double x : {0.0, 0.3, 0.71}) {
        double prev = -1e300;
        for (double y = -1.5; y <= 1.5; y += 0.01) {
            const double xp = forward(h, x, y).x;
            CHECK(xp > prev);
            prev = xp;
        }
    }
}

TEST_CASE("out-of-range momentum") {
    const auto h = GeneratingFunction::standard(1.0, 1.0);
    CHECK_THROWS_AS(forward(h, 0.0, 5.0), MomentumOutOfRange);
    // find a seed whose closed-form orbit leaves the window after a few steps
    const auto h2 = GeneratingFunction::standard(2.0, 1.0);
    for (double y0 = 0.3; y0 < 0.9; y0 += 0.01) {
        double x = 0.1, y = y0;
        long expected = -1;
        for (long i = 0; i < 40 && expected < 0; ++i) {
            std::tie(x, y) = oracle::std_map(2.0, x, y);
            if (std::abs(y) > 1.0) expected = i;
        }
        if (expected < 2) continue;
        try {
            iterate(h2, 0.1, y0, 40);
            FAIL("expected MomentumOutOfRange");
        } catch (const MomentumOutOfRange& e) {
            CHECK(e.step == expected);
        }
        break;
    }
}

TEST_CASE("iterate") {
    const auto h1 = GeneratingFunction::standard(1.0);
    const auto seed = iterate(h1, 0.3, 0.2, 0);
    REQUIRE(seed.points.size() == 1);
    CHECK(seed.points[0].x == 0.3);
    CHECK(seed.points[0].y == 0.2);

    const auto rigid = iterate(GeneratingFunction::standard(0.0), 0.0, 0.1, 10);
    CHECK(rigid.steps() == 10);
    CHECK(rigid.points[10].x == Approx(1.0).epsilon(1e-14));

    const auto o = iterate(h1, 0.25, 0.0, 3);
    double x = 0.25, y = 0.0;
    for (int i = 1; i <= 3; ++i) {
        std::tie(x, y) = oracle::std_map(1.0, x, y);
        CHECK(o.points[static_cast<std::size_t>(i)].x == Approx(x).epsilon(1e-12));
        CHECK(o.points[static_cast<std::size_t>(i)].y == Approx(y).epsilon(1e-12));
    }
    // consecutive points are linked through h
    for (std::size_t i = 0; i + 1 < o.points.size(); ++i) {
        const auto part = h1.partials(o.points[i].x, o.points[i + 1].x);
        CHECK(std::abs(o.points[i].y + part.d1) <= 1e-12);
        CHECK(std::abs(o.points[i + 1].y - part.d2) <= 1e-12);
    }
}

TEST_CASE("jacobian determinant") {
    CHECK(jacobian_det(GeneratingFunction::standard(0.0), 0.2, 0.4) == Approx(1.0).epsilon(1e-8));
    CHECK(jacobian_det(GeneratingFunction::standard(1.0), 0.3, 0.1) == Approx(1.0).epsilon(1e-6));
    CHECK(jacobian_det(GeneratingFunction::standard(2.0), 0.7, -0.2) == Approx(1.0).epsilon(1e-6));
}

TEST_CASE("area preservation along an orbit") {
    const auto h = GeneratingFunction::standard(0.9);
    const auto o = iterate(h, 0.1, 0.35, 1000);
    double worst = 0.0;
    for (const auto& p : o.points) worst = std::max(worst, std::abs(jacobian_det(h, p.x, p.y) - 1.0));
    CHECK(worst <= 1e-6);
}
