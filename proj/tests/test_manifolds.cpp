#include <catch2/catch.hpp>

#include <cmath>
#include <numbers>
#include <random>

#include "interlink/manifolds.hpp"

using namespace interlink;
using namespace interlink::manifolds;

namespace {

Mat metric1(double g) {
    Mat m(1);
    m(0, 0) = g;
    return m;
}

Mat rotated_metric(double l1, double l2, double phi) {
    const double c = std::cos(phi), s = std::sin(phi);
    Mat m(2);
    m(0, 0) = c * c * l1 + s * s * l2;
    m(0, 1) = c * s * (l1 - l2);
    m(1, 0) = m(0, 1);
    m(1, 1) = s * s * l1 + c * c * l2;
    return m;
}

} // namespace

TEST_CASE("circle distance minimizes over lattice offsets", "[manifolds]") {
    FlatTorus t1(metric1(1.0));
    CHECK(t1.distance({0.0}, {0.3}) == Approx(0.3).margin(1e-15));
    CHECK(t1.distance({0.0}, {0.7}) == Approx(0.3).margin(1e-15));

    // direct enumeration over |k| <= 2 as an independent check
    double best = 1e9;
    for (int k = -2; k <= 2; ++k) best = std::min(best, std::abs(0.7 + k));
    CHECK(t1.distance({0.0}, {0.7}) == Approx(best).margin(1e-15));
}

TEST_CASE("sphere distance is the great-circle arc", "[manifolds]") {
    RoundSphere s2(1.0);
    const RoundSphere::Point north{0, 0, 1};
    const RoundSphere::Point equator{1, 0, 0};
    CHECK(s2.distance(north, equator) == Approx(std::numbers::pi / 2).epsilon(1e-14));
}

TEST_CASE("coincident points are rejected", "[manifolds]") {
    FlatTorus t1(metric1(1.0));
    CHECK_THROWS_AS(t1.distance({0.25}, {1.25}), degenerate_input_error);
    RoundSphere s2(1.0);
    CHECK_THROWS_AS(s2.distance({0, 0, 1}, {0, 0, 1}), degenerate_input_error);
}

TEST_CASE("distance is symmetric", "[manifolds]") {
    std::mt19937_64 rng(11);
    auto unif = [&](double lo, double hi) {
        return lo + (hi - lo) * static_cast<double>(rng() >> 11) * 0x1.0p-53;
    };
    for (int trial = 0; trial < 40; ++trial) {
        FlatTorus t2(rotated_metric(unif(0.5, 2.0), unif(0.5, 2.0), unif(0, 3.14)));
        const Vec x = {unif(0, 1), unif(0, 1)};
        const Vec y = {unif(0, 1), unif(0, 1)};
        if (norm2(x - y) < 1e-3) continue;
        CHECK(t2.distance(x, y) == Approx(t2.distance(y, x)).margin(1e-12));
    }
    RoundSphere s2(1.7);
    for (int trial = 0; trial < 20; ++trial) {
        auto x = RoundSphere::normalize({unif(-1, 1), unif(-1, 1), unif(-1, 1)});
        auto y = RoundSphere::normalize({unif(-1, 1), unif(-1, 1), unif(-1, 1)});
        if (!s2.nonconjugate(x, y)) continue;
        CHECK(s2.distance(x, y) == Approx(s2.distance(y, x)).margin(1e-12));
    }
}

TEST_CASE("circle spectrum enumerates both winding directions", "[manifolds]") {
    FlatTorus t1(metric1(1.0));
    auto spec = t1.spectrum({0.0}, {0.3}, 2.0);
    REQUIRE(spec.size() == 4);
    CHECK(spec[0].length == Approx(0.3).margin(1e-15));
    CHECK(spec[1].length == Approx(0.7).margin(1e-15));
    CHECK(spec[2].length == Approx(1.3).margin(1e-15));
    CHECK(spec[3].length == Approx(1.7).margin(1e-15));
    for (const auto& r : spec) CHECK(r.morse_index == 0);
    CHECK(spec[0].class_tag == std::vector<int>{0});
    CHECK(spec[1].class_tag == std::vector<int>{-1});
}

TEST_CASE("sphere spectrum has one geodesic per wrap with increasing index", "[manifolds]") {
    RoundSphere s2(1.0);
    auto [x, y] = RoundSphere::points_at_angle(std::numbers::pi / 2);
    auto spec = s2.spectrum(x, y, 8.0);
    REQUIRE(spec.size() == 3);
    CHECK(spec[0].length == Approx(std::numbers::pi / 2).epsilon(1e-14));
    CHECK(spec[1].length == Approx(3 * std::numbers::pi / 2).epsilon(1e-14));
    CHECK(spec[2].length == Approx(5 * std::numbers::pi / 2).epsilon(1e-14));
    CHECK(spec[0].morse_index == 0);
    CHECK(spec[1].morse_index == 1);
    CHECK(spec[2].morse_index == 2);
}

TEST_CASE("torus ties stay distinct records with bit-identical lengths", "[manifolds]") {
    FlatTorus t2 = FlatTorus::euclidean(2);
    auto spec = t2.spectrum({0.0, 0.0}, {0.5, 0.0}, 1.2);
    // lattice enumeration: two geodesics of length 0.5 (k=(0,0),(-1,0)) and
    // four of length sqrt(1.25) (k=(0,+-1),(-1,+-1))
    REQUIRE(spec.size() == 6);
    CHECK(spec[0].length == 0.5);
    CHECK(spec[1].length == 0.5);
    CHECK(spec[0].length == spec[1].length); // exact tie
    CHECK(spec[0].class_tag != spec[1].class_tag);
    for (int i = 2; i < 6; ++i) CHECK(spec[i].length == Approx(std::sqrt(1.25)).epsilon(1e-15));
    CHECK(spec.size() == t2.lattice_count_below({0.0, 0.0}, {0.5, 0.0}, 1.2));
}

TEST_CASE("spectrum cardinality equals the direct lattice count", "[manifolds]") {
    std::mt19937_64 rng(23);
    auto unif = [&](double lo, double hi) {
        return lo + (hi - lo) * static_cast<double>(rng() >> 11) * 0x1.0p-53;
    };
    for (int trial = 0; trial < 20; ++trial) {
        FlatTorus t2(rotated_metric(unif(0.5, 2.0), unif(0.5, 2.0), unif(0, 3.14)));
        const Vec x = {unif(0, 1), unif(0, 1)};
        const Vec y = {unif(0, 1), unif(0, 1)};
        if (norm2(x - y) < 1e-2) continue;
        const double cutoff = unif(1.0, 3.0);
        CHECK(t2.spectrum(x, y, cutoff).size() == t2.lattice_count_below(x, y, cutoff));
    }
}

TEST_CASE("spectrum lengths are stable under swapping endpoints", "[manifolds]") {
    FlatTorus t1(metric1(1.0));
    auto a = t1.spectrum({0.0}, {0.3}, 3.0);
    auto b = t1.spectrum({0.3}, {0.0}, 3.0);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        CHECK(a[i].length == Approx(b[i].length).margin(1e-15));
}

TEST_CASE("distance equals the minimal spectrum length", "[manifolds]") {
    FlatTorus t1(metric1(2.25));
    const double d = t1.distance({0.1}, {0.4});
    auto spec = t1.spectrum({0.1}, {0.4}, 3.0);
    REQUIRE_FALSE(spec.empty());
    CHECK(spec[0].length == d); // bit-identical: same enumeration path
}

TEST_CASE("conjugacy checks", "[manifolds]") {
    FlatTorus t1(metric1(1.0));
    CHECK(t1.nonconjugate({0.0}, {0.9}));
    RoundSphere s2(1.0);
    CHECK_FALSE(s2.nonconjugate({0, 0, 1}, {0, 0, -1}));
    auto [x, y] = RoundSphere::points_at_angle(std::numbers::pi / 2);
    CHECK(s2.nonconjugate(x, y));
    CHECK_THROWS_AS(s2.spectrum({0, 0, 1}, {0, 0, -1}, 8.0), non_morse_error);
}

TEST_CASE("shooting oracle reproduces closed-form records", "[manifolds]") {
    RoundSphere s2(1.0);
    auto [x, y] = RoundSphere::points_at_angle(std::numbers::pi / 2);
    auto rec = s2.shoot(x, y, 1, 1e-9);
    CHECK(rec.length == Approx(3 * std::numbers::pi / 2).margin(1e-6));
    CHECK(rec.morse_index == 1);

    FlatTorus t1(metric1(1.0));
    auto line = t1.shoot({0.0}, {0.3}, {1}, 1e-12);
    CHECK(line.length == Approx(1.3).margin(1e-9));
    CHECK(line.morse_index == 0);

    RoundSphere s2big(2.0);
    auto [x2, y2] = RoundSphere::points_at_angle(1.0);
    auto rec2 = s2big.shoot(x2, y2, 0, 1e-9);
    CHECK(rec2.length == Approx(2.0).margin(1e-6));
    CHECK(rec2.morse_index == 0);
}

TEST_CASE("every spectrum record is reproduced by the shooting oracle", "[manifolds]") {
    RoundSphere s2(1.0);
    auto [x, y] = RoundSphere::points_at_angle(1.1);
    for (const auto& rec : s2.spectrum(x, y, 9.0)) {
        auto shot = s2.shoot(x, y, rec.class_tag[0], 1e-9);
        CHECK(shot.length == Approx(rec.length).margin(1e-6));
        CHECK(shot.morse_index == rec.morse_index);
    }
    FlatTorus t2(rotated_metric(1.3, 0.8, 0.4));
    const Vec a = {0.15, 0.85}, b = {0.55, 0.1};
    for (const auto& rec : t2.spectrum(a, b, 2.2)) {
        auto shot = t2.shoot(a, b, rec.class_tag, 1e-10);
        CHECK(shot.length == Approx(rec.length).margin(1e-8));
        CHECK(shot.morse_index == 0);
    }
}

TEST_CASE("spectrum serialization shape", "[manifolds]") {
    FlatTorus t1(metric1(1.0));
    auto j = manifolds::to_json(t1.spectrum({0.0}, {0.3}, 1.0), false);
    REQUIRE(j.size() == 2);
    CHECK(j[0]["length"] == 0.3);
    CHECK(j[0]["index"] == 0);
    CHECK(j[0]["class"].is_array());
    RoundSphere s2(1.0);
    auto [x, y] = RoundSphere::points_at_angle(1.0);
    auto js = manifolds::to_json(s2.spectrum(x, y, 6.0), true);
    CHECK(js[0]["class"] == 0);
}

TEST_CASE("shooting reports non-convergence with the best residual", "[manifolds]") {
    RoundSphere s2(1.0);
    auto [x, y] = RoundSphere::points_at_angle(1.0);
    try {
        s2.shoot(x, y, 0, 1e-30);
        FAIL("expected no_convergence_error");
    } catch (const no_convergence_error& e) {
        CHECK(e.best_residual > 0.0);
        CHECK(e.best_residual < 1e-6);
    }
}
