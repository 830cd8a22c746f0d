#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "kneadlab/families.hpp"

using namespace kneadlab;
using namespace kneadlab::testing;

namespace {
constexpr double kPi = 3.14159265358979323846;

struct KindFixture {
    Family family;
    std::vector<Params> params;
    double x_lo, x_hi;
    // points whose neighbourhoods are skipped (kinks, discontinuities)
    std::vector<double> exclude;
    double gap = 0.0;
};

std::vector<KindFixture> derivative_fixtures() {
    Family pl2{PiecewiseLinearShape{1, 2, {1.0, 2.0, 0.5}}};
    Params pl2v = {0.5, -0.5};
    PLData d2 = pl_data(std::get<PiecewiseLinearShape>(pl2.shape()), pl2v);

    std::vector<KindFixture> out;
    out.push_back({Family{PowerUnimodalShape{2}}, {{-1.0}, {-1.9}, {0.2}}, -2.0, 2.0, {}, 0.0});
    out.push_back({Family{PowerUnimodalShape{4}}, {{-1.2}, {0.1}}, -1.4, 1.4, {}, 0.0});
    out.push_back({Family{PowerLawShape{1.5, 3.0}}, {{-1.1}, {-0.4}}, -1.5, 1.5, {0.0}, 1e-2});
    out.push_back({Family{PowerLawShape{60.0, 60.0}}, {{-1.01}}, -1.05, 1.05, {0.0}, 1e-2});
    out.push_back({Family{FlatExpShape{1.0, 6.0}}, {{-0.5}, {-0.1}}, -3.0, 3.0, {0.0}, 2e-2});
    out.push_back({Family{FlatExpShape{2.0, 8.0}}, {{-0.5}}, -2.0, 2.0, {0.0}, 5e-2});
    out.push_back({Family{ClassEShape{CoreMap::builtin("sin")}}, {{1.2}, {2.4}}, 0.05, 3.0, {}, 0.0});
    out.push_back({Family{ClassEShape{CoreMap::builtin("logistic")}}, {{0.7}}, 0.02, 0.98, {}, 0.0});
    out.push_back({Family{ClassEShape{CoreMap::builtin("exp_logistic")}}, {{0.9}}, 0.02, 4.0, {}, 0.0});
    out.push_back({Family{ClassEShape{CoreMap::builtin("sin_sq")}}, {{0.8}}, 0.05, 3.0, {}, 0.0});
    out.push_back({Family{ClassEShape{CoreMap::builtin("xm_gauss", 3)}}, {{0.9}}, 0.05, 3.0, {}, 0.0});
    out.push_back({std::move(pl2), {pl2v}, -1.0, 1.0, {d2.c[1], d2.c[2]}, 2e-2});
    out.push_back({Family{PiecewiseLinearShape{1, 1, {1.0, 1.0}}}, {{0.618}}, -1.0, 1.0, {0.0}, 2e-2});
    out.push_back({Family{LorenzAffineShape{}}, {{1.5, 0.0}, {1.62, -0.14}}, -1.0, 1.0, {0.0, -0.14}, 2e-2});
    out.push_back({Family{LorenzFlatShape{1.0, 6.0}}, {{0.4, -0.5}}, -1.0, 1.0, {0.0}, 2e-2});
    out.push_back({Family{ArnoldShape{1}}, {{0.5, 1.0}, {0.3, 0.7}}, 0.0, 1.0, {}, 0.0});
    return out;
}

}  // namespace

TEST_CASE("families: constructor invariants") {
    CHECK_THROWS_AS(Family{PowerUnimodalShape{3}}, Error);   // odd degree
    CHECK_THROWS_AS(Family{PowerUnimodalShape{0}}, Error);
    CHECK_THROWS_AS((Family{FlatExpShape{1.0, 5.0}}), Error);  // b <= 2e
    CHECK_NOTHROW((Family{FlatExpShape{1.0, 5.44}}));
    CHECK_THROWS_AS((Family{PiecewiseLinearShape{1, 1, {1.0, -1.0}}}), Error);
    CHECK_THROWS_AS((Family{PiecewiseLinearShape{1, 2, {1.0, 1.0}}}), Error);
    CHECK_THROWS_AS(CoreMap::builtin("xm_gauss", 2), Error);  // even m
    CHECK_THROWS_AS(CoreMap::builtin("nope"), Error);
}

TEST_CASE("families: core maps fix 0 and have unit critical value") {
    for (const char* name : {"sin", "logistic", "exp_logistic", "sin_sq"}) {
        auto core = CoreMap::builtin(name);
        CHECK(std::abs(core.value(0.0)) <= 1e-12);
        CHECK(std::abs(core.value(core.crit()) - 1.0) <= 1e-9);
        CHECK(std::abs(core.deriv(core.crit())) <= 1e-9);
    }
    auto odd = CoreMap::builtin("xm_gauss", 5);
    CHECK(odd.odd());
    CHECK(std::abs(odd.value(odd.crit()) - 1.0) <= 1e-9);
    CHECK(odd.value(-1.3) == doctest::Approx(-odd.value(1.3)));
}

TEST_CASE("families: point evaluation examples") {
    Family quad{PowerUnimodalShape{2}};
    CHECK(quad.eval({-1.0}, at(0.0)) == -1.0);

    Family flat{FlatExpShape{1.0, 6.0}};
    double beta = flat_exp_beta(1.0, 6.0);
    CHECK(std::abs(2.0 * beta * std::exp(1.0 / beta) - 6.0) <= 1e-12);
    CHECK(flat.eval({0.0}, at(beta)) == doctest::Approx(2.0 * beta).epsilon(1e-12));
    CHECK(flat.eval({-beta}, at(beta)) == doctest::Approx(beta).epsilon(1e-12));
    CHECK(flat.eval({-0.3}, at(0.0)) == -0.3);  // f(0) = c by definition
    CHECK(flat.d_dx({-0.3}, at(0.0)) == 0.0);   // flat critical point

    Family lor{LorenzAffineShape{}};
    CHECK(lor.eval({1.5, 0.0}, at_plus(0.0)) == doctest::Approx(-0.5));
    CHECK(lor.eval({1.5, 0.0}, at_minus(0.0)) == doctest::Approx(0.5));
    CHECK_THROWS_AS(lor.eval({1.5, 0.0}, at(0.0)), Error);  // side required
    CHECK_THROWS_AS(lor.eval({1.5, 0.0}, at(1.5)), Error);  // outside domain
}

TEST_CASE("families: derivative examples") {
    Family quad{PowerUnimodalShape{2}};
    CHECK(quad.d_dx({-1.0}, at(-1.0)) == -2.0);
    CHECK(quad.d_dparam({-1.0}, at(0.37))[0] == 1.0);

    Family flat{FlatExpShape{1.0, 6.0}};
    double beta = flat_exp_beta(1.0, 6.0);
    CHECK(flat.d_dx({-beta}, at(beta)) ==
          doctest::Approx(2.0 / beta).epsilon(1e-10));
    CHECK(flat.d_dx({-beta}, at(-beta)) ==
          doctest::Approx(-2.0 / beta).epsilon(1e-10));

    Family cusp{PowerLawShape{1.0, 1.0}};
    CHECK_THROWS_AS(cusp.d_dx({-0.5}, at(0.0)), Error);  // kink at 0

    Family fsin{ClassEShape{CoreMap::builtin("sin")}};
    CHECK(fsin.d_dparam({2.0}, at(1.0))[0] == doctest::Approx(std::sin(1.0)));

    // tent as the nu=1 PL map with v = (t-1): branch slopes are +-t
    Family tent{PiecewiseLinearShape{1, 1, {1.0, 1.0}}};
    double t = 1.7;
    CHECK(tent.d_dx({t - 1.0}, at(0.5)) == doctest::Approx(-t).epsilon(1e-14));
    CHECK(tent.d_dx({t - 1.0}, at(-0.5)) == doctest::Approx(t).epsilon(1e-14));
    CHECK_THROWS_AS(tent.d_dx({t - 1.0}, at(0.0)), Error);
    CHECK(tent.d_dx({t - 1.0}, at_minus(0.0)) == doctest::Approx(t));
}

TEST_CASE("families: analytic derivatives match finite differences") {
    for (const auto& fix : derivative_fixtures()) {
        Rng rng(0xabcdef12 + fix.family.param_dim());
        int checked = 0;
        while (checked < 10000) {
            const Params& p = fix.params[size_t(rng.uniform() * fix.params.size()) %
                                         fix.params.size()];
            double x = rng.uniform(fix.x_lo, fix.x_hi);
            bool skip = false;
            for (double e : fix.exclude) skip = skip || std::abs(x - e) < fix.gap;
            if (skip) continue;
            ++checked;
            double scale = 1e-6 * (1.0 + std::abs(x));
            double dx = fix.family.d_dx(p, at(x));
            double fdx = fd_dx(fix.family, p, x, scale);
            REQUIRE(std::abs(dx - fdx) <= 1e-6 * (1.0 + std::abs(dx)));
            auto dp = fix.family.d_dparam(p, at(x));
            for (int k = 0; k < fix.family.param_dim(); ++k) {
                double hp = 1e-6 * (1.0 + std::abs(p[k]));
                double fdp = fd_dparam(fix.family, p, x, k, hp);
                REQUIRE(std::abs(dp[k] - fdp) <= 1e-6 * (1.0 + std::abs(dp[k])));
            }
        }
    }
}

TEST_CASE("families: additive kinds translate exactly in the parameter") {
    Family quad{PowerUnimodalShape{2}};
    Family flat{FlatExpShape{1.0, 6.0}};
    Rng rng(77);
    for (int i = 0; i < 1000; ++i) {
        double c = rng.uniform(-2.0, 0.25);
        double delta = rng.uniform(-0.5, 0.5);
        double x = rng.uniform(-2.0, 2.0);
        for (const Family* f : {&quad, &flat}) {
            double d = f->eval({c + delta}, at(x)) - f->eval({c}, at(x));
            CHECK(std::abs(d - delta) <= 4e-16 * (1.0 + std::abs(x) * std::abs(x)));
        }
    }
}

TEST_CASE("families: deformation derivative evaluators match finite differences") {
    struct Case {
        Family family;
        Params params;
        std::vector<double> zs;  // probe points (one per interesting branch)
    };
    std::vector<Case> cases;
    cases.push_back({Family{PowerUnimodalShape{2}}, {-1.0}, {-1.0, 0.7}});
    cases.push_back({Family{PowerLawShape{1.5, 3.0}}, {-1.1}, {-0.8, 0.9}});
    cases.push_back({Family{FlatExpShape{1.0, 6.0}}, {-0.35}, {-0.7, 0.5}});
    cases.push_back({Family{ClassEShape{CoreMap::builtin("sin")}}, {2.4}, {0.9, 2.2}});
    cases.push_back({Family{PiecewiseLinearShape{1, 2, {1.0, 2.0, 0.5}}},
                     {0.5, -0.5},
                     {-0.9, 0.1, 0.9}});
    cases.push_back({Family{LorenzAffineShape{}}, {1.62, -0.14}, {-0.6, 0.5}});
    cases.push_back({Family{LorenzFlatShape{1.0, 6.0}}, {0.4, -0.5}, {-0.7, 0.6}});
    cases.push_back({Family{ArnoldShape{1}}, {0.5, 1.0}, {0.1, 0.6}});

    for (const auto& tc : cases) {
        auto def = tc.family.deformation(tc.params);
        const CVec base = def->base_w();
        Rng rng(5);
        for (double z0 : tc.zs) {
            int branch = tc.family.branch_at(tc.params, at(z0));
            Complex z(z0, 0.0);
            // dG/dz
            double hz = 1e-6 * (1.0 + std::abs(z0));
            Complex fdz = (def->G(base, z + hz, branch) -
                           def->G(base, z - hz, branch)) /
                          (2.0 * hz);
            CHECK(std::abs(def->dG_dz(base, z, branch) - fdz) <=
                  1e-6 * (1.0 + std::abs(fdz)));
            // dG/dw_k and dp_j/dw_k, columnwise
            for (int k = 0; k < def->nu(); ++k) {
                double hw = 1e-6 * (1.0 + std::abs(base[k]));
                CVec wp = base, wm = base;
                wp[k] += hw;
                wm[k] -= hw;
                Complex fdw =
                    (def->G(wp, z, branch) - def->G(wm, z, branch)) / (2.0 * hw);
                CHECK(std::abs(def->dG_dw(base, z, branch)[k] - fdw) <=
                      1e-6 * (1.0 + std::abs(fdw)));
                for (int j = 0; j < def->nu(); ++j) {
                    Complex fdp = (def->p(wp, j) - def->p(wm, j)) / (2.0 * hw);
                    CHECK(std::abs(def->dp_dw(base, j)[k] - fdp) <=
                          1e-6 * (1.0 + std::abs(fdp)));
                }
            }
        }
    }
}

TEST_CASE("families: additive and multiplicative deformation structure") {
    Family quad{PowerUnimodalShape{2}};
    auto def = quad.deformation({-1.0});
    CVec w = {Complex(-0.93, 0.04)};
    CHECK(def->dG_dw(w, Complex(0.3, -0.2), 1)[0] == Complex(1.0, 0.0));
    CHECK(def->p(w, 0) == Complex(0.0, 0.0));
    CHECK(def->dp_dw(w, 0)[0] == Complex(0.0, 0.0));

    Family fsin{ClassEShape{CoreMap::builtin("sin")}};
    auto mdef = fsin.deformation({2.4});
    CVec a = {Complex(2.5, 0.1)};
    Complex z(1.3, -0.05);
    CHECK(std::abs(mdef->G(a, z, 0) - a[0] * std::sin(z)) <= 1e-15);
    CHECK(std::abs(mdef->p(a, 0) - Complex(kPi / 2, 0)) <= 1e-15);
}

TEST_CASE("families: Lorenz deformation pins the one-sided critical values") {
    Family lor{LorenzAffineShape{}};
    auto def = lor.deformation({1.5, 0.1});
    Rng rng(123);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        CVec w = {def->base_w()[0] + Complex(rng.uniform(-0.1, 0.1),
                                             rng.uniform(-0.1, 0.1)),
                  def->base_w()[1] + Complex(rng.uniform(-0.1, 0.1),
                                             rng.uniform(-0.1, 0.1))};
        Complex p = def->p(w, 0);
        CHECK(def->p(w, 1) == p);  // the two marked points are identified
        worst = std::max(worst, std::abs(def->G(w, p, 1) - w[0]));
        worst = std::max(worst, std::abs(def->G(w, p, 2) - w[1]));
    }
    CHECK(worst <= 1e-14);
}

TEST_CASE("families: Arnold chart inverts the critical-value map") {
    Family arn{ArnoldShape{1}};
    Params ab = {0.5, 1.0};
    auto cd = arn.critical_data(ab);
    double e1 = std::acos(-1.0 / (2.0 * kPi)) / (2.0 * kPi);
    CHECK(cd[0].point.x == doctest::Approx(e1).epsilon(1e-12));
    CHECK(cd[1].point.x == doctest::Approx(1.0 - e1).epsilon(1e-12));
    CHECK_THROWS_AS(arn.critical_data({0.5, 0.1}), Error);  // |b| too small

    auto def = arn.deformation(ab);
    Rng rng(4);
    for (int i = 0; i < 50; ++i) {
        CVec w = {def->base_w()[0] + Complex(rng.uniform(-0.05, 0.05),
                                             rng.uniform(-0.05, 0.05)),
                  def->base_w()[1] + Complex(rng.uniform(-0.05, 0.05),
                                             rng.uniform(-0.05, 0.05))};
        // G_w at its j-th critical point returns w_j
        for (int j = 0; j < 2; ++j) {
            Complex pj = def->p(w, j);
            CHECK(std::abs(def->G(w, pj, 0) - w[j]) <= 1e-12);
            CHECK(std::abs(def->dG_dz(w, pj, 0)) <= 1e-10);
        }
    }
}

TEST_CASE("families: critical data") {
    Family quad{PowerUnimodalShape{2}};
    auto cd = quad.critical_data({-1.3});
    REQUIRE(cd.size() == 1);
    CHECK(cd[0].point.x == 0.0);
    CHECK(cd[0].value == -1.3);
    CHECK(cd[0].order_left == 2.0);

    Family fsin{ClassEShape{CoreMap::builtin("sin")}};
    auto cs = fsin.critical_data({2.0});
    CHECK(cs[0].point.x == doctest::Approx(kPi / 2));
    CHECK(cs[0].value == doctest::Approx(2.0));

    Family lf{LorenzFlatShape{1.0, 6.0}};
    auto cl = lf.critical_data({0.4, -0.5});
    REQUIRE(cl.size() == 2);
    CHECK(cl[0].point.side == Side::Minus);
    CHECK(cl[0].value == doctest::Approx(0.4));
    CHECK(cl[1].value == doctest::Approx(-0.5));
    CHECK(cl[0].flat);
}
