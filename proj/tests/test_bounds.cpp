#include <catch2/catch.hpp>

#include <numbers>
#include <random>

#include "interlink/bounds.hpp"

using namespace interlink;
using namespace interlink::bounds;
using interlink::persistence::Bar;
using interlink::persistence::kInf;
using manifolds::FlatTorus;
using manifolds::RoundSphere;

TEST_CASE("bar bound instances", "[bounds]") {
    CHECK(pb_lower_from_bar(Bar{0.3, kInf, 0}, 1.0, 2.0) == Approx(10.0 / 3.0).epsilon(1e-15));
    // boundary ratio b/a = C is accepted
    CHECK(pb_lower_from_bar(Bar{1.0, 2.0, 0}, 1.0, 2.0) == 1.0);
    CHECK_THROWS_AS(pb_lower_from_bar(Bar{1.0, 1.5, 0}, 1.0, 2.0), hypothesis_error);
    CHECK_THROWS_AS(pb_lower_from_bar(Bar{0.0, 1.0, 0}, 1.0, 2.0), argument_error);
    CHECK_THROWS_AS(pb_lower_from_bar(Bar{0.5, kInf, 0}, 2.0, 1.0), argument_error);
}

TEST_CASE("core bound instances", "[bounds]") {
    CHECK(pb_lower_core(0.3, 1.0) == Approx(10.0 / 3.0).epsilon(1e-15));
    CHECK(pb_lower_core(1.0, 1.0) == 1.0);
    CHECK(pb_lower_core(0.5, 2.0) == 1.0);
    CHECK_THROWS_AS(pb_lower_core(-1.0, 1.0), argument_error);
    CHECK_THROWS_AS(pb_lower_core(1.0, 0.0), argument_error);
}

TEST_CASE("cotangent bound instances", "[bounds]") {
    FlatTorus t1 = FlatTorus::euclidean(1);
    auto tb = cotangent_bounds(t1, Vec{0.0}, Vec{0.3}, 1.0, 2.0);
    CHECK(tb.pb_fibers_spheres == Approx(10.0 / 3.0).epsilon(1e-15));
    CHECK(tb.pb_fibers_zero_section == Approx(10.0 / 3.0).epsilon(1e-15));
    CHECK(tb.barcode_certified);

    RoundSphere s2(1.0);
    auto [x, y] = RoundSphere::points_at_angle(std::numbers::pi / 2);
    auto sb = cotangent_bounds(s2, x, y, 1.0, 3.0);
    CHECK(sb.pb_fibers_spheres == Approx(1.0 / std::numbers::pi).epsilon(1e-13));
    CHECK(sb.pb_fibers_zero_section == Approx(2.0 / std::numbers::pi).epsilon(1e-13));

    auto mid = cotangent_bounds(t1, Vec{0.0}, Vec{0.5}, 2.0, 4.0);
    CHECK(mid.pb_fibers_spheres == 1.0);
    CHECK(mid.pb_fibers_zero_section == Approx(1.0).epsilon(1e-15));
}

TEST_CASE("conjugate endpoints fall back to the formula with the flag unset", "[bounds]") {
    RoundSphere s2(1.0);
    auto cb = cotangent_bounds(s2, RoundSphere::Point{0, 0, 1}, RoundSphere::Point{0, 0, -1},
                               1.0, 2.0);
    CHECK_FALSE(cb.barcode_certified);
    CHECK(cb.distance == Approx(std::numbers::pi).epsilon(1e-14));
    CHECK(cb.pb_fibers_spheres == Approx(1.0 / std::numbers::pi).epsilon(1e-13));
}

TEST_CASE("bar route and distance route agree exactly", "[bounds]") {
    std::mt19937_64 rng(5);
    auto unif = [&](double lo, double hi) {
        return lo + (hi - lo) * static_cast<double>(rng() >> 11) * 0x1.0p-53;
    };
    FlatTorus t1 = FlatTorus::euclidean(1);
    for (int trial = 0; trial < 30; ++trial) {
        const Vec x = {unif(0, 1)}, y = {unif(0, 1)};
        if (std::abs(x[0] - y[0]) < 1e-3) continue;
        const double a = unif(0.2, 2.0);
        const double b = a + unif(0.2, 2.0);
        const auto cb = cotangent_bounds(t1, x, y, a, b);
        const auto barcode = wfh::wfh_barcode(t1, x, y, 2.0 * cb.distance);
        REQUIRE_FALSE(barcode.bars.empty());
        CHECK(pb_lower_from_bar(barcode.bars[0], a, b) == cb.pb_fibers_spheres); // bitwise
        CHECK(pb_lower_core(barcode.bars[0].left, a) == cb.pb_fibers_zero_section);
    }
}

TEST_CASE("bound is monotone in mu and in the band width", "[bounds]") {
    CHECK(pb_lower_from_bar(Bar{0.2, kInf, 0}, 1.0, 2.0) >
          pb_lower_from_bar(Bar{0.4, kInf, 0}, 1.0, 2.0));
    CHECK(pb_lower_from_bar(Bar{0.3, kInf, 0}, 1.0, 2.0) >
          pb_lower_from_bar(Bar{0.3, kInf, 0}, 1.0, 3.0));
}

TEST_CASE("kappa and chord budget", "[bounds]") {
    CHECK(kappa_from_pb(10.0 / 3.0) == Approx(0.3).epsilon(1e-15));
    CHECK(kappa_from_pb(1.0) == 1.0);
    CHECK(kappa_from_pb(0.5) == 2.0);
    CHECK_THROWS_AS(kappa_from_pb(0.0), argument_error);

    CHECK(chord_time_budget(0.3, 3.0) == Approx(0.1).epsilon(1e-15));
    CHECK(chord_time_budget(1.0, 1.0) == 1.0);
    CHECK_THROWS_AS(chord_time_budget(0.3, 0.0), not_separating_error);
}

TEST_CASE("bound report emits both orderings with identical values", "[bounds]") {
    FlatTorus t1 = FlatTorus::euclidean(1);
    auto rep = bound_report(t1, Vec{0.0}, Vec{0.3}, QuadrupleSpec::spheres(1.0, 2.0));
    auto j = to_json(rep);
    CHECK(j["both_orderings"] == true);
    CHECK(j["pb_lower"] == Approx(10.0 / 3.0).epsilon(1e-15));
    CHECK(j["kappa"] == Approx(0.3).epsilon(1e-15));
    CHECK(j["barcode_certified"] == true);

    auto zs = bound_report(t1, Vec{0.0}, Vec{0.3}, QuadrupleSpec::zero_section(1.0));
    CHECK(zs.kappa == Approx(0.3).epsilon(1e-15));
}

TEST_CASE("quadruple validation", "[bounds]") {
    CHECK_THROWS_AS(QuadrupleSpec::spheres(2.0, 1.0), argument_error);
    CHECK_THROWS_AS(QuadrupleSpec::spheres(0.0, 1.0), argument_error);
    CHECK_THROWS_AS(QuadrupleSpec::zero_section(0.0), argument_error);
}
