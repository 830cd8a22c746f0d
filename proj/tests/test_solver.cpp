#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "kneadlab/rootfind.hpp"
#include "kneadlab/solver.hpp"

using namespace kneadlab;
using namespace kneadlab::testing;

namespace {
const double kPhi = 0.5 * (1.0 + std::sqrt(5.0));
}

TEST_CASE("solver: quadratic superstable parameters") {
    Family quad{PowerUnimodalShape{2}};
    auto r2 = solve_superstable(quad, 2, -2.0, 0.0);
    CHECK(r2.param == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(std::abs(r2.residual) <= 1e-12);

    // independent oracle: bisection of the quartic factor c^3+2c^2+c+1
    double want = bisect(
        [](double c) { return ((c + 2.0) * c + 1.0) * c + 1.0; }, -2.0, -1.0);
    auto r3 = solve_superstable(quad, 3, -2.0, 0.0);
    CHECK(r3.param == doctest::Approx(want).epsilon(1e-12));

    Family fsin{ClassEShape{CoreMap::builtin("sin")}};
    auto r1 = solve_superstable(fsin, 1, 0.5, 3.0);
    CHECK(r1.param == doctest::Approx(3.14159265358979 / 2).epsilon(1e-12));
}

TEST_CASE("solver: no-root and period-collision diagnostics") {
    Family quad{PowerUnimodalShape{2}};
    CHECK_THROWS_WITH_AS(solve_superstable(quad, 2, 0.05, 0.2), "no sign change of the closure residual on the bracket", Error);
    // the only root of f^4(0) on this bracket is c=0, of period 1
    CHECK_THROWS_AS(solve_superstable(quad, 4, -0.1, 0.2), Error);
}

TEST_CASE("solver: words resolve to their unique parameters") {
    Family quad{PowerUnimodalShape{2}};
    auto a = solve_word(quad, KneadingSequence::parse("-0"), -2.0, 0.25);
    CHECK(a.param == doctest::Approx(-1.0).epsilon(1e-10));
    auto b = solve_word(quad, KneadingSequence::parse("-+0"), -2.0, 0.25);
    CHECK(b.param == doctest::Approx(-1.754877666).epsilon(1e-8));
    auto c = solve_word(quad, KneadingSequence::parse("0"), -0.5, 0.25);
    CHECK(c.param == doctest::Approx(0.0));
    CHECK(kneading(quad, {b.param}, 10).str() == "-+0");

    CHECK_THROWS_AS(
        solve_word(quad, KneadingSequence::parse("+0"), -2.0, 0.25), Error);
}

TEST_CASE("solver: superstable scan round-trips through marked orbits") {
    Family quad{PowerUnimodalShape{2}};
    auto roots = superstable_scan(quad, 6, -2.0, 0.25);
    CHECK(roots.size() == 13);  // 1+1+1+2+3+5 minimal-period parameters
    for (auto [c, q] : roots) {
        auto orbit = marked_orbit(quad, {c});
        CHECK(orbit.nu == 1);
        CHECK(orbit.r == 1);
        CHECK(orbit.q(0) == q);
        CHECK(orbit.rel[0].first_kind);
    }
}

TEST_CASE("solver: marked orbit combinatorics") {
    Family quad{PowerUnimodalShape{2}};

    auto first = marked_orbit(quad, {-1.0});
    CHECK(first.rel[0].first_kind);
    CHECK(first.q(0) == 2);
    CHECK(first.mu(0) == 0);
    CHECK(first.r == 1);
    CHECK(first.pts[0][1].x == doctest::Approx(-1.0));
    CHECK(first.pts[0][1].dg == doctest::Approx(-2.0));

    // Chebyshev parameter: eventually periodic, l=2, q=3
    auto second = marked_orbit(quad, {-2.0});
    CHECK(!second.rel[0].first_kind);
    CHECK(second.q(0) == 3);
    CHECK(second.l(0) == 2);
    CHECK(second.r == 0);
    CHECK(second.dg_prod(0, 2) == doctest::Approx(-16.0));

    // above the fixed-point window the critical orbit diverges
    CHECK_THROWS_AS(marked_orbit(quad, {0.3}), Error);
}

TEST_CASE("solver: two-parameter Lorenz closure") {
    Family lor{LorenzAffineShape{}};
    std::vector<Relation> rels = {{0, 3, {}}, {1, 3, {}}};
    auto sol = solve_two_param(lor, rels, {1.6, 0.05});
    CHECK(sol.params[0] == doctest::Approx(kPhi).epsilon(1e-9));
    CHECK(std::abs(sol.params[1]) <= 1e-9);
    CHECK(sol.residual <= 1e-10);

    // determinism: resolving from the solution reproduces the residual
    auto again = solve_two_param(lor, rels, sol.params);
    CHECK(std::abs(again.residual - sol.residual) <= 1e-12);
    CHECK(again.params[0] == doctest::Approx(sol.params[0]).epsilon(1e-12));

    auto orbit = marked_orbit(lor, sol.params);
    CHECK(orbit.nu == 2);
    CHECK(orbit.r == 2);
    CHECK(orbit.q(0) == 3);
    CHECK(orbit.q(1) == 3);
    // both one-sided orbits return to the shared discontinuity
    CHECK(orbit.mu(0) == 0);
    CHECK(orbit.mu(1) == 0);
}

TEST_CASE("solver: asymmetric Lorenz relations from a coarse seed") {
    Family lor{LorenzAffineShape{}};
    std::vector<Relation> rels = {{0, 2, {}}, {1, 3, {}}};
    auto seed = coarse_seed_2d(lor, rels, {1.05, -0.9}, {1.95, 0.9}, 60);
    auto sol = solve_two_param(lor, rels, seed);
    CHECK(sol.residual <= 1e-10);
    // the slope solves t^3 = t + 1 here
    CHECK(std::pow(sol.params[0], 3) ==
          doctest::Approx(sol.params[0] + 1.0).epsilon(1e-9));
    auto orbit = marked_orbit(lor, sol.params);
    CHECK(orbit.q(0) == 2);
    CHECK(orbit.q(1) == 3);
}

TEST_CASE("solver: Arnold critical points on superattracting cycles") {
    Family arn{ArnoldShape{1}};
    std::vector<Relation> rels = {{0, 1, {}}, {1, 1, {}}};
    auto seed = coarse_seed_2d(arn, rels, {0.0, 0.17}, {1.0, 1.2}, 48);
    auto sol = solve_two_param(arn, rels, seed);
    CHECK(sol.residual <= 1e-9);
    auto orbit = marked_orbit(arn, sol.params);
    CHECK(orbit.nu == 2);
    CHECK(orbit.r == 2);
    CHECK(orbit.q(0) == 1);
    CHECK(orbit.q(1) == 1);
}

TEST_CASE("solver: word relation checked after a two-parameter solve") {
    Family lor{LorenzAffineShape{}};
    std::vector<Relation> ok = {{0, 3, std::string("RR0")}, {1, 3, {}}};
    auto sol = solve_two_param(lor, ok, {1.6, 0.05});
    CHECK(sol.residual <= 1e-10);
    std::vector<Relation> bad = {{0, 3, std::string("RL0")}, {1, 3, {}}};
    CHECK_THROWS_AS(solve_two_param(lor, bad, {1.6, 0.05}), Error);
}
