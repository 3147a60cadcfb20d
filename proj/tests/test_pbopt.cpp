#include <catch2/catch.hpp>

#include <random>

#include "interlink/pbopt.hpp"

using namespace interlink;
using namespace interlink::pbopt;
using manifolds::FlatTorus;

namespace {

PhaseFunction coordinate(std::size_t i) {
    return PhaseFunction{
        [i](const Vec& q, const Vec&) { return q[i]; },
        [i](const Vec& q, const Vec&) {
            Vec g(q.size(), 0.0);
            g[i] = 1.0;
            return g;
        },
        [](const Vec& q, const Vec&) { return Vec(q.size(), 0.0); },
    };
}

PhaseFunction momentum(std::size_t i) {
    return PhaseFunction{
        [i](const Vec&, const Vec& p) { return p[i]; },
        [](const Vec& q, const Vec&) { return Vec(q.size(), 0.0); },
        [i](const Vec& q, const Vec&) {
            Vec g(q.size(), 0.0);
            g[i] = 1.0;
            return g;
        },
    };
}

// smooth test field: a * sin(2 pi m . q) + b * |p|^2 / 2 + c * q . p
PhaseFunction smooth_field(double a, std::vector<int> m, double b, double c) {
    auto phase = [m](const Vec& q) {
        double s = 0;
        for (std::size_t i = 0; i < q.size(); ++i) s += m[i] * q[i];
        return 2.0 * std::numbers::pi * s;
    };
    return PhaseFunction{
        [=](const Vec& q, const Vec& p) {
            return a * std::sin(phase(q)) + 0.5 * b * dot(p, p) + c * dot(q, p);
        },
        [=](const Vec& q, const Vec& p) {
            Vec g(q.size());
            for (std::size_t i = 0; i < q.size(); ++i)
                g[i] = a * 2.0 * std::numbers::pi * m[i] * std::cos(phase(q)) + c * p[i];
            return g;
        },
        [=](const Vec& q, const Vec& p) {
            Vec g(q.size());
            for (std::size_t i = 0; i < q.size(); ++i) g[i] = b * p[i] + c * q[i];
            return g;
        },
    };
}

PhaseFunction product_of(const PhaseFunction& a, const PhaseFunction& b) {
    return PhaseFunction{
        [=](const Vec& q, const Vec& p) { return a.value(q, p) * b.value(q, p); },
        [=](const Vec& q, const Vec& p) {
            return b.value(q, p) * a.grad_q(q, p) + a.value(q, p) * b.grad_q(q, p);
        },
        [=](const Vec& q, const Vec& p) {
            return b.value(q, p) * a.grad_p(q, p) + a.value(q, p) * b.grad_p(q, p);
        },
    };
}

std::mt19937_64 g_rng(2718);
double unif(double lo, double hi) {
    return lo + (hi - lo) * static_cast<double>(g_rng() >> 11) * 0x1.0p-53;
}

std::pair<Vec, Vec> random_point(std::size_t n) {
    Vec q(n), p(n);
    for (auto& v : q) v = unif(0, 1);
    for (auto& v : p) v = unif(-2, 2);
    return {q, p};
}

PhaseFunction random_field(std::size_t n) {
    std::vector<int> m(n);
    for (auto& v : m) v = 1 + static_cast<int>(g_rng() % 2);
    return smooth_field(unif(-1, 1), m, unif(-1, 1), unif(-0.5, 0.5));
}

} // namespace

TEST_CASE("canonical bracket {q, p} = +1", "[pbopt]") {
    CHECK(poisson_bracket(coordinate(0), momentum(0), {0.2}, {0.4}) == 1.0);
    CHECK(poisson_bracket(momentum(0), coordinate(0), {0.2}, {0.4}) == -1.0);
}

TEST_CASE("bracket of a function with itself vanishes", "[pbopt]") {
    auto f = smooth_field(0.7, {1}, 0.3, 0.2);
    const auto [q, p] = random_point(1);
    CHECK(poisson_bracket(f, f, q, p) == 0.0);
}

TEST_CASE("bracket is antisymmetric exactly", "[pbopt]") {
    for (std::size_t n : {std::size_t{1}, std::size_t{2}}) {
        for (int trial = 0; trial < 20; ++trial) {
            auto f = random_field(n), g = random_field(n);
            const auto [q, p] = random_point(n);
            CHECK(poisson_bracket(f, g, q, p) == -poisson_bracket(g, f, q, p));
        }
    }
}

TEST_CASE("analytic bracket agrees with central differences", "[pbopt]") {
    for (std::size_t n : {std::size_t{1}, std::size_t{2}}) {
        for (int trial = 0; trial < 50; ++trial) {
            auto f = random_field(n), g = random_field(n);
            const auto [q, p] = random_point(n);
            const double exact = poisson_bracket(f, g, q, p);
            const double fd = poisson_bracket_fd(f, g, q, p);
            CHECK(fd == Approx(exact).epsilon(1e-6).margin(1e-8));
        }
    }
}

TEST_CASE("Leibniz rule holds on products", "[pbopt]") {
    for (int trial = 0; trial < 20; ++trial) {
        auto f = random_field(1), g = random_field(1), h = random_field(1);
        const auto [q, p] = random_point(1);
        const double lhs = poisson_bracket(f, product_of(g, h), q, p);
        const double rhs = poisson_bracket(f, g, q, p) * h.value(q, p) +
                           g.value(q, p) * poisson_bracket(f, h, q, p);
        CHECK(lhs == Approx(rhs).margin(1e-8));
    }
}

TEST_CASE("chain-rule bracket for separable pairs", "[pbopt]") {
    Mat g1(1);
    g1(0, 0) = 1.44;
    FlatTorus torus(g1);
    TorusTestPair pair(torus, 0.0, 0.3, QuadrupleSpec::spheres(1.0, 2.0), 0.004,
                       {1, 1, 1, 1}, {1, 1, 1, 1}, {1, 1, 1, 1});
    auto F = pair.as_f(), G = pair.as_g();
    for (int trial = 0; trial < 40; ++trial) {
        const Vec q = {unif(0, 1)}, p = {unif(-3, 3)};
        const double r = std::abs(p[0]) / 1.2;
        const double expect = pair.f_slope(q[0]) * pair.g_slope(r) * (p[0] >= 0 ? 1 : -1) / 1.2;
        CHECK(poisson_bracket(F, G, q, p) == Approx(expect).margin(1e-14));
        CHECK(poisson_bracket_fd(F, G, q, p) == Approx(expect).epsilon(1e-5).margin(1e-7));
    }
}

TEST_CASE("undeformed Pfaffian identity is exact", "[pbopt]") {
    auto f = random_field(1), g = random_field(1);
    const auto [q, p] = random_point(1);
    CHECK(degeneracy_residual(f, g, 0.0, q, p) == 0.0);
}

TEST_CASE("2x2 Pfaffian identity by hand", "[pbopt]") {
    // F = q, G = p: omega_tau in the (q, p) basis has Pf = -(1 - tau)
    auto F = coordinate(0), G = momentum(0);
    CHECK(degeneracy_residual(F, G, 0.5, {0.1}, {0.7}) < 1e-12);
    Mat wt = omega_matrix(1);
    const Mat a = two_form_matrix(F, G, {0.1}, {0.7});
    for (std::size_t r = 0; r < 2; ++r)
        for (std::size_t c = 0; c < 2; ++c) wt(r, c) += 0.5 * a(r, c);
    CHECK(pfaffian(wt) == -0.5);
}

TEST_CASE("degeneracy appears exactly at tau = 1/{F,G}", "[pbopt]") {
    auto F = coordinate(0), G = momentum(0);
    Mat wt = omega_matrix(1);
    const Mat a = two_form_matrix(F, G, {0.3}, {0.2});
    for (std::size_t r = 0; r < 2; ++r)
        for (std::size_t c = 0; c < 2; ++c) wt(r, c) += 1.0 * a(r, c);
    CHECK(std::abs(pfaffian(wt)) < 1e-12);
}

TEST_CASE("Pfaffian and wedge identities hold on random draws", "[pbopt]") {
    for (std::size_t n : {std::size_t{1}, std::size_t{2}}) {
        for (int trial = 0; trial < 50; ++trial) {
            auto f = random_field(n), g = random_field(n);
            const auto [q, p] = random_point(n);
            const double tau = unif(0, 1);
            CHECK(degeneracy_residual(f, g, tau, q, p) < 1e-10);
            CHECK(wedge_identity_residual(f, g, q, p) < 1e-10);
        }
    }
}

TEST_CASE("wedge square of a 2-form reproduces the Pfaffian", "[pbopt]") {
    Mat a(4);
    for (std::size_t r = 0; r < 4; ++r)
        for (std::size_t c = r + 1; c < 4; ++c) {
            a(r, c) = unif(-1, 1);
            a(c, r) = -a(r, c);
        }
    CHECK(wedge_top({a, a}) == Approx(2.0 * pfaffian(a)).margin(1e-12));
    CHECK(wedge_top({omega_matrix(2), omega_matrix(2)}) ==
          Approx(2.0 * pfaffian(omega_matrix(2))).margin(1e-15));
}

TEST_CASE("critical tau found by Pfaffian bisection matches 1/max{F,G}", "[pbopt]") {
    // F with F_q = cos(2 pi q), G = p: bracket cos(2 pi q), max 1 at q = 0
    PhaseFunction F{
        [](const Vec& q, const Vec&) { return std::sin(2 * std::numbers::pi * q[0]) /
                                              (2 * std::numbers::pi); },
        [](const Vec& q, const Vec&) { return Vec{std::cos(2 * std::numbers::pi * q[0])}; },
        [](const Vec&, const Vec&) { return Vec{0.0}; },
    };
    auto G = momentum(0);
    std::vector<std::pair<Vec, Vec>> samples;
    for (int i = 0; i < 200; ++i) samples.push_back({{i / 200.0}, {0.3}});
    const double tau_c = find_critical_tau(F, G, samples, 2.0);
    double max_pb = 0;
    for (const auto& [q, p] : samples)
        max_pb = std::max(max_pb, poisson_bracket(F, G, q, p));
    CHECK(tau_c == Approx(1.0 / max_pb).margin(1e-6));
}

TEST_CASE("pb upper estimate sandwiches the lower bound", "[pbopt]") {
    FlatTorus t1 = FlatTorus::euclidean(1);
    PbEstimateConfig cfg; // library defaults
    auto est = estimate_pb_upper(t1, 0.0, 0.3, QuadrupleSpec::spheres(1.0, 2.0), cfg);
    const double target = 10.0 / 3.0;
    CHECK(est.lower == Approx(target).epsilon(1e-15));
    CHECK(est.upper >= est.lower - 1e-9);
    CHECK(est.upper <= 1.2 * target);
    CHECK(est.gap_ratio <= 1.2);
    CHECK(est.grid_max <= est.upper + 1e-12);
    CHECK(est.grid_bound >= est.upper - 1e-12);

    auto wide = estimate_pb_upper(t1, 0.0, 0.3, QuadrupleSpec::spheres(1.0, 3.0), cfg);
    CHECK(wide.lower == Approx(1.0 / 0.6).epsilon(1e-15));
    CHECK(wide.upper >= wide.lower - 1e-9);
    CHECK(wide.upper <= 1.2 * wide.lower);
}

TEST_CASE("degenerate quadruples are rejected", "[pbopt]") {
    CHECK_THROWS_AS(QuadrupleSpec::spheres(2.0, 2.0), argument_error);
}

TEST_CASE("admissibility holds by construction", "[pbopt]") {
    FlatTorus t1 = FlatTorus::euclidean(1);
    TorusTestPair pair(t1, 0.0, 0.3, QuadrupleSpec::spheres(1.0, 2.0), 0.01,
                       {1, 2, 1}, {1, 1, 1}, {2, 1, 2});
    CHECK(pair.f_value(0.0) == 0.0);
    CHECK(pair.f_value(0.001) == 0.0);
    CHECK(pair.f_value(0.999) == 0.0);
    CHECK(pair.f_value(0.3) == 1.0);
    CHECK(pair.f_value(0.299) == 1.0);
    CHECK(pair.g_value(1.0) == 0.0);
    CHECK(pair.g_value(1.005) == 0.0);
    CHECK(pair.g_value(2.0) == 1.0);
    CHECK(pair.g_value(50.0) == 1.0); // constant 1 at infinity
    for (double r : {0.5, 1.2, 1.7, 2.3}) CHECK(pair.g_slope(r) >= 0.0);
}

TEST_CASE("coupled ansatz behind the flag reduces to the product optimum", "[pbopt]") {
    FlatTorus t1 = FlatTorus::euclidean(1);
    PbEstimateConfig cfg;
    cfg.nonseparable = true;
    cfg.restarts = 1;
    cfg.nm_iters = 200;
    cfg.coord_rounds = 3;
    auto est = estimate_pb_upper(t1, 0.0, 0.3, QuadrupleSpec::spheres(1.0, 2.0), cfg);
    CHECK(est.upper >= est.lower - 1e-9);
    CHECK(est.upper <= 1.2 * est.lower);
    CHECK_FALSE(est.clamped);
    CHECK(est.pair.contains("coupling"));
    // the coupling term can only inflate the certificate, so it stays small
    CHECK(std::abs(est.pair["coupling"].get<double>()) < 0.2);
}
