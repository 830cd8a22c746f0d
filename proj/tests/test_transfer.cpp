#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "kneadlab/transfer.hpp"

using namespace kneadlab;
using namespace kneadlab::testing;

TEST_CASE("transfer: dense spectrum utility") {
    MatrixXc diag = MatrixXc::Zero(2, 2);
    diag(0, 0) = 0.5;
    auto s = spectrum(diag);
    CHECK(s.eigenvalues(0) == Complex(0.5, 0.0));
    CHECK(s.eigenvalues(1) == Complex(0.0, 0.0));
    CHECK(s.spectral_radius == 0.5);

    MatrixXc one(1, 1);
    one(0, 0) = 0.5;
    CHECK(spectrum(one).spectral_radius == 0.5);

    // plant known eigenvalues behind a similarity transform
    int n = 8;
    Eigen::VectorXd lam(n);
    for (int i = 0; i < n; ++i) lam(i) = 0.2 * (i + 1) - 0.9;
    Rng rng(31);
    Eigen::MatrixXd S = Eigen::MatrixXd::Identity(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) S(i, j) += 0.1 * rng.uniform(-1.0, 1.0);
    Eigen::MatrixXd planted =
        S * lam.asDiagonal() * S.inverse();
    auto sp = spectrum(planted.cast<Complex>());
    std::vector<double> got;
    for (int i = 0; i < n; ++i) got.push_back(sp.eigenvalues(i).real());
    std::sort(got.begin(), got.end());
    std::vector<double> want(lam.data(), lam.data() + n);
    std::sort(want.begin(), want.end());
    for (int i = 0; i < n; ++i)
        CHECK(std::abs(got[i] - want[i]) <= 1e-8);
}

TEST_CASE("transfer: labeled operator on the basic quadratic orbits") {
    Family quad{PowerUnimodalShape{2}};

    // c = 0: the single label (0,0) maps through p' = 0
    auto orbit0 = marked_orbit(quad, {0.0});
    auto def0 = quad.deformation({0.0});
    auto aj0 = labeled_transfer_operator(orbit0, *def0);
    REQUIRE(aj0.A.rows() == 1);
    CHECK(aj0.A(0, 0) == Complex(0.0, 0.0));
    CHECK(std::abs((MatrixXc::Identity(1, 1) - Complex(0.7, 0.1) * aj0.A)
                       .determinant() -
                   Complex(1.0, 0.0)) <= 1e-15);

    // c = -1: labels (0,0) and (1,0)
    auto orbit1 = marked_orbit(quad, {-1.0});
    auto def1 = quad.deformation({-1.0});
    auto aj1 = labeled_transfer_operator(orbit1, *def1);
    REQUIRE(aj1.A.rows() == 2);
    CHECK(aj1.index_pairs[0] == std::make_pair(0, 0));
    CHECK(aj1.index_pairs[1] == std::make_pair(1, 0));
    CHECK(aj1.A(0, 0) == Complex(0.0, 0.0));
    CHECK(aj1.A(0, 1) == Complex(0.0, 0.0));
    CHECK(aj1.A(1, 0) == Complex(-0.5, 0.0));
    CHECK(aj1.A(1, 1) == Complex(0.5, 0.0));
    CHECK(aj1.eigenvalues(0) == Complex(0.5, 0.0));
    CHECK(aj1.eigenvalues(1) == Complex(0.0, 0.0));
}

TEST_CASE("transfer: point operator matches g(P)") {
    Family quad{PowerUnimodalShape{2}};
    auto orbit = marked_orbit(quad, {-1.0});
    auto def = quad.deformation({-1.0});
    auto a = transfer_operator(orbit, *def);
    CHECK(!a.fell_back_to_labels);
    REQUIRE(a.positions.size() == 2);  // g(P) = {-1, 0}
    CHECK(a.spectral_radius == doctest::Approx(0.5));

    // eigenvalues of the labeled and point operators coincide off zero
    auto aj = labeled_transfer_operator(orbit, *def);
    CHECK(std::abs(a.eigenvalues(0) - aj.eigenvalues(0)) <= 1e-12);
}

TEST_CASE("transfer: colliding orbit points fall back to labels") {
    // two orbits through one repelling fixed point of multiplier 4
    MarkedOrbit orbit;
    orbit.nu = 2;
    orbit.r = 0;
    orbit.tol = 1e-9;
    for (int j = 0; j < 2; ++j) {
        std::vector<OrbitPoint> pts(3);
        pts[0] = {j == 0 ? -0.5 : 0.7, j == 0 ? -0.5 : 0.7, Side::TwoSided, 0,
                  std::nan("")};
        pts[1] = {2.0, 2.0, Side::TwoSided, 0, 4.0};
        pts[2] = {2.0, 2.0, Side::TwoSided, 0, 4.0};
        orbit.pts.push_back(std::move(pts));
        orbit.rel.push_back({false, 2, 0, 1, 0.0});
        orbit.label.push_back(j);
    }
    OrbitDerivatives d;
    d.nu = 2;
    d.r = 0;
    d.q = {2, 2};
    d.l = {1, 1};
    d.mu = {0, 0};
    d.wrap = {0.0, 0.0};
    d.dg = {{0.0, 4.0}, {0.0, 4.0}};
    d.L = {{{}, {Complex(1.0, 0.0), Complex(0.0, 0.0)}},
           {{}, {Complex(0.0, 0.0), Complex(1.0, 0.0)}}};
    d.p_jk = {{Complex(0, 0), Complex(0, 0)}, {Complex(0, 0), Complex(0, 0)}};

    auto tm = transfer_operator(orbit, d);
    CHECK(tm.fell_back_to_labels);
    CHECK(tm.A.rows() == 2);  // labels (1,0) and (1,1)
}

TEST_CASE("transfer: characteristic identity against D(rho)") {
    struct Fixture {
        Family family;
        Params params;
    };
    double phi = 0.5 * (1.0 + std::sqrt(5.0));
    std::vector<Fixture> fixtures;
    fixtures.push_back({Family{PowerUnimodalShape{2}}, {-1.0}});
    fixtures.push_back({Family{PowerUnimodalShape{2}}, {-1.7548776662466928}});
    fixtures.push_back({Family{PowerUnimodalShape{2}}, {-2.0}});
    fixtures.push_back({Family{PiecewiseLinearShape{1, 1, {1.0, 1.0}}}, {phi - 1.0}});
    fixtures.push_back({Family{LorenzAffineShape{}}, {phi, 0.0}});
    auto rhos = unit_disk_samples(20, 17);
    for (auto& fix : fixtures) {
        auto orbit = marked_orbit(fix.family, fix.params);
        auto def = fix.family.deformation(fix.params);
        CHECK(char_identity_check(orbit, *def, rhos) <= 1e-10);
    }
    // on the unit circle for the second-kind fixture
    std::vector<Complex> circle;
    for (int k = 0; k < 16; ++k)
        circle.emplace_back(std::cos(0.3927 * k), std::sin(0.3927 * k));
    auto cheb = marked_orbit(Family{PowerUnimodalShape{2}}, {-2.0});
    auto cdef = Family{PowerUnimodalShape{2}}.deformation({-2.0});
    CHECK(char_identity_check(cheb, *cdef, circle) <= 1e-9);
}

TEST_CASE("transfer: det(I - rho A) equals the reciprocal-derivative polynomial") {
    Family quad{PowerUnimodalShape{2}};
    for (auto [c, q] : superstable_scan(quad, 8, -2.0, 0.25)) {
        auto orbit = marked_orbit(quad, {c});
        auto def = quad.deformation({c});
        auto a = transfer_operator(orbit, *def);
        auto coeffs = char_poly_coeffs(a);
        for (int i = 0; i < q; ++i) {
            double want = 1.0 / orbit.dg_prod(0, i);
            CHECK(std::abs(coeffs[i] - want) <= 1e-8 * (1.0 + std::abs(want)));
        }
        for (size_t i = q; i < coeffs.size(); ++i)
            CHECK(std::abs(coeffs[i]) <= 1e-8);
        CHECK(a.spectral_radius <= 1.0 - 1e-6);
    }
}

TEST_CASE("transfer: rescaled triple scales the operator exactly") {
    Family quad{PowerUnimodalShape{2}};
    auto orbit = marked_orbit(quad, {-1.0});
    auto def = quad.deformation({-1.0});
    CHECK(scaled_triple_check(orbit, *def, 0.0) == 0.0);
    CHECK(scaled_triple_check(orbit, *def, 0.25) <= 1e-12);

    auto orbit3 = marked_orbit(quad, {-1.7548776662466928});
    auto def3 = quad.deformation({-1.7548776662466928});
    CHECK(scaled_triple_check(orbit3, *def3, 0.5) <= 1e-12);

    double phi = 0.5 * (1.0 + std::sqrt(5.0));
    Family lor{LorenzAffineShape{}};
    auto lorbit = marked_orbit(lor, {phi, 0.0});
    auto ldef = lor.deformation({phi, 0.0});
    CHECK(scaled_triple_check(lorbit, *ldef, 0.25) <= 1e-12);
}

TEST_CASE("transfer: rho sampling rejects exceptional neighbourhoods") {
    MarkedOrbit orbit;
    orbit.nu = 2;
    orbit.r = 0;
    orbit.tol = 1e-9;
    for (int j = 0; j < 2; ++j) {
        std::vector<OrbitPoint> pts(3);
        pts[0] = {j == 0 ? -0.5 : 0.7, j == 0 ? -0.5 : 0.7, Side::TwoSided, 0,
                  std::nan("")};
        pts[1] = {2.0, 2.0, Side::TwoSided, 0, 4.0};
        pts[2] = {2.0, 2.0, Side::TwoSided, 0, 4.0};
        orbit.pts.push_back(std::move(pts));
        orbit.rel.push_back({false, 2, 0, 1, 0.0});
        orbit.label.push_back(j);
    }
    Family quad{PowerUnimodalShape{2}};  // any deformation of matching nu
    Family lor{LorenzAffineShape{}};
    auto def = lor.deformation({1.5, 0.0});
    CHECK_THROWS_AS(
        char_identity_check(orbit, *def, {Complex(4.0, 1e-8)}), Error);
}
