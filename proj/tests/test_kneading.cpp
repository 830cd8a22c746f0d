#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "kneadlab/kneading.hpp"

using namespace kneadlab;

TEST_CASE("kneading: itineraries of superstable quadratic parameters") {
    Family quad{PowerUnimodalShape{2}};
    auto k = itinerary(quad, {-1.0}, at(0.0), 6, 1e-9);
    CHECK(k.str() == "-0");
    CHECK(k.period == 2);

    auto k0 = kneading(quad, {0.0}, 6);
    CHECK(k0.str() == "0");
    CHECK(k0.period == 1);

    // superstable period 3 at the root of c^3 + 2c^2 + c + 1
    double c3 = -1.7548776662466928;
    CHECK(std::abs(c3 * c3 * c3 + 2 * c3 * c3 + c3 + 1) < 1e-12);
    auto k3 = kneading(quad, {c3}, 6);
    CHECK(k3.str() == "-+0");
    CHECK(k3.period == 3);

    // a non-superstable start point does not claim a period
    auto ki = itinerary(quad, {-1.0}, at(0.3), 8);
    CHECK(!ki.period.has_value());
}

TEST_CASE("kneading: word parsing round-trips") {
    for (const char* w : {"-0", "-+0", "-++-", "0"}) {
        auto k = KneadingSequence::parse(w);
        CHECK(k.str() == w);
    }
    auto lorenz = KneadingSequence::parse("LRR0");
    CHECK(lorenz.lorenz);
    CHECK(lorenz.str() == "LRR0");
    CHECK_THROWS_AS(KneadingSequence::parse("-x0"), Error);
}

TEST_CASE("kneading: MT order on the defining examples") {
    auto cmp = [](const char* a, const char* b) {
        return mt_compare(KneadingSequence::parse(a), KneadingSequence::parse(b));
    };
    // first difference at n=1: products -1 < 0
    CHECK(cmp("-+", "0") == MTOrder::Less);
    CHECK(cmp("-+0", "-+0") == MTOrder::Equal);
    // difference at n=2: products (-1)(-1)=1 > (-1)(+1)=-1
    CHECK(cmp("--", "-+") == MTOrder::Greater);
    CHECK(cmp("-", "-+") == MTOrder::UndecidedPrefix);
    // a superstable word sits above its continuations with +
    CHECK(cmp("-0", "-+") == MTOrder::Greater);
    CHECK(cmp("-0", "--") == MTOrder::Less);
}

TEST_CASE("kneading: MT order is a total preorder on decided words") {
    Rng rng(2024);
    std::vector<KneadingSequence> corpus;
    for (int i = 0; i < 1000; ++i) {
        KneadingSequence k;
        int len = 1 + int(rng.uniform() * 20);
        for (int n = 0; n < len; ++n)
            k.symbols.push_back(rng.uniform() < 0.5 ? -1 : 1);
        if (rng.uniform() < 0.3) k.symbols.back() = 0;
        corpus.push_back(std::move(k));
    }
    auto ord = [&](int i, int j) { return mt_compare(corpus[i], corpus[j]); };
    for (int trial = 0; trial < 10000; ++trial) {
        int a = int(rng.uniform() * corpus.size());
        int b = int(rng.uniform() * corpus.size());
        int c = int(rng.uniform() * corpus.size());
        MTOrder ab = ord(a, b), ba = ord(b, a);
        // antisymmetry
        if (ab == MTOrder::Less) REQUIRE(ba == MTOrder::Greater);
        if (ab == MTOrder::Greater) REQUIRE(ba == MTOrder::Less);
        if (ab == MTOrder::Equal) REQUIRE(ba == MTOrder::Equal);
        // transitivity of strict comparisons
        MTOrder bc = ord(b, c), ac = ord(a, c);
        if (ab == MTOrder::Less && bc == MTOrder::Less)
            REQUIRE(ac != MTOrder::Greater);
        if (ab == MTOrder::Greater && bc == MTOrder::Greater)
            REQUIRE(ac != MTOrder::Less);
    }
}

TEST_CASE("kneading: tent and flat itineraries") {
    Family tent{PiecewiseLinearShape{1, 1, {1.0, 1.0}}};
    auto k = kneading(tent, {1.0}, 6);  // t = 2: 0 -> 1 -> -1 -> -1
    CHECK(k.str() == "+-----");

    Family flat{FlatExpShape{1.0, 6.0}};
    double beta = flat_exp_beta(1.0, 6.0);
    auto kf = kneading(flat, {-beta}, 5);
    CHECK(kf.symbols[0] == -1);
    CHECK(kf.symbols[1] == +1);  // lands on the fixed point beta
    CHECK(kf.symbols[2] == +1);
}

TEST_CASE("kneading: Lorenz pair is antisymmetric on the symmetric line") {
    Family lor{LorenzAffineShape{}};
    auto pair = lorenz_kneading(lor, {1.5, 0.0}, 12);
    CHECK(pair.minus.lorenz);
    REQUIRE(pair.minus.length() == pair.plus.length());
    for (int i = 0; i < pair.minus.length(); ++i)
        CHECK(pair.minus.symbols[i] == -pair.plus.symbols[i]);
}

TEST_CASE("kneading: constant-slope entropy") {
    CHECK(constant_slope_entropy(2.0) == doctest::Approx(std::log(2.0)));
    double phi = 0.5 * (1.0 + std::sqrt(5.0));
    CHECK(constant_slope_entropy(phi) == doctest::Approx(0.4812118250596));
    CHECK(constant_slope_entropy(1.0) == 0.0);
    CHECK_THROWS_AS(constant_slope_entropy(0.9), Error);
}

TEST_CASE("kneading: scan is monotone and stable under delta_hit") {
    Family quad{PowerUnimodalShape{2}};
    auto rows = kneading_scan(quad, -2.0, 0.25, 501, 40);
    for (const auto& r : rows) {
        if (r.compare_to_prev)
            CHECK(*r.compare_to_prev != MTOrder::Greater);
    }
    auto rows8 = kneading_scan(quad, -2.0, 0.25, 501, 40, 1e-8);
    for (size_t i = 0; i < rows.size(); ++i) {
        const auto& a = rows[i].word.symbols;
        const auto& b = rows8[i].word.symbols;
        for (size_t k = 0; k < std::min(a.size(), b.size()); ++k) {
            if (a[k] != 0 && b[k] != 0) CHECK(a[k] == b[k]);
        }
    }
    // a threaded scan merges into the identical row sequence
    auto rows4 = kneading_scan(quad, -2.0, 0.25, 501, 40, 1e-9, 4);
    for (size_t i = 0; i < rows.size(); ++i)
        CHECK(rows[i].word.symbols == rows4[i].word.symbols);
}

TEST_CASE("kneading: escape raises only for bounded domains") {
    Family fsin{ClassEShape{CoreMap::builtin("sin")}};
    CHECK_THROWS_AS(itinerary(fsin, {2.0}, at(3.3), 8), Error);
    Family quad{PowerUnimodalShape{2}};
    // beyond the Chebyshev parameter the orbit runs to +infinity through
    // a well-defined +1 tail
    auto k = kneading(quad, {-2.5}, 10);
    CHECK(k.symbols[0] == -1);
    for (int i = 1; i < 10; ++i) CHECK(k.symbols[i] == +1);
}
