#pragma once

// Quantitative outputs derived from barcode facts: lower bounds on the Poisson
// bracket invariant of the two cotangent quadruples, interlinking constants
// kappa = 1/pb, and chord time budgets kappa/Delta.
//
// A bar (mu, C mu] with b/a <= C yields pb+ >= 1/(mu (b-a)) for the quadruple
// (fiber_x, fiber_y, S_a, S_b); a semi-infinite bar yields pb+ >= 1/(mu b) for
// (fiber_x, fiber_y, zero section, S_b). Both bound routes share one formula
// helper so cross-module equality checks are exact.
//
// The band bound survives restricting the ambient manifold to any slightly
// larger shell (radii [a - delta, b + delta]), and hence transports along
// codimension-0 embeddings of such shells by monotonicity. This is reported
// here for users of the numbers; no shell-restricted quantity is computed.

#include <string>

#include "json.hpp"

#include "interlink/errors.hpp"
#include "interlink/persistence.hpp"
#include "interlink/wfh.hpp"

namespace interlink::bounds {

using persistence::Bar;
using persistence::kInf;

struct QuadrupleSpec {
    enum class Variant { FiberFiberSpheres, FiberFiberZeroSection };
    Variant variant = Variant::FiberFiberSpheres;
    double a = 0; // inner radius (sphere radius for the zero-section variant)
    double b = 0; // outer radius (unused for the zero-section variant)

    static QuadrupleSpec spheres(double a, double b) {
        if (!(0 < a && a < b)) throw argument_error("sphere radii need 0 < a < b");
        return QuadrupleSpec{Variant::FiberFiberSpheres, a, b};
    }
    static QuadrupleSpec zero_section(double a) {
        if (!(a > 0)) throw argument_error("cosphere radius must be positive");
        return QuadrupleSpec{Variant::FiberFiberZeroSection, a, 0.0};
    }
};

inline nlohmann::json to_json(const QuadrupleSpec& q) {
    nlohmann::json j;
    if (q.variant == QuadrupleSpec::Variant::FiberFiberSpheres) {
        j["variant"] = "fibers_spheres";
        j["a"] = q.a;
        j["b"] = q.b;
    } else {
        j["variant"] = "fibers_zero_section";
        j["a"] = q.a;
    }
    return j;
}

namespace detail {

inline double band_bound(double mu, double a, double b) { return 1.0 / (mu * (b - a)); }
inline double core_bound(double mu, double b) { return 1.0 / (mu * b); }

} // namespace detail

// pb+ >= 1/(mu (b-a)) from a bar (mu, C mu], provided b/a <= C. The ratio
// hypothesis is checked exactly (cross-multiplied), with no tolerance.
inline double pb_lower_from_bar(const Bar& bar, double a, double b) {
    const double mu = bar.left;
    if (!(mu > 0)) throw argument_error("bar left endpoint must be positive: pb+ is finite");
    if (!(0 < a && a < b)) throw argument_error("radii need 0 < a < b");
    if (bar.right != kInf && b * mu > a * bar.right)
        throw hypothesis_error("ratio hypothesis fails: b/a = " + std::to_string(b / a) +
                               " exceeds bar ratio " + std::to_string(bar.right / mu));
    return detail::band_bound(mu, a, b);
}

// pb+ >= 1/(mu b) from a semi-infinite bar, for the quadruple with the core.
inline double pb_lower_core(double mu, double b) {
    if (!(mu > 0 && b > 0)) throw argument_error("pb_lower_core needs mu > 0 and b > 0");
    return detail::core_bound(mu, b);
}

template <class M>
struct CotangentBounds {
    double distance = 0;
    double pb_fibers_spheres = 0;       // quadruple (T*_x, T*_y, S_a, S_b)
    double pb_fibers_zero_section = 0;  // quadruple (T*_x, T*_y, 0-section, S_a)
    bool barcode_certified = false;     // (d, inf) bar was produced, not assumed
    Bar certificate{};
};

// Both cotangent bounds at once: pb+ >= 1/(d(b-a)) and pb+ >= 1/(d a). The
// (d, inf) bar is produced from the path-space complex before the numbers are
// emitted; for conjugate endpoints the formula stands by semi-continuity and
// the certificate flag is left unset.
template <class M>
CotangentBounds<M> cotangent_bounds(const M& manifold, const typename M::Point& x,
                                    const typename M::Point& y, double a, double b) {
    if (!(0 < a && a < b)) throw argument_error("radii need 0 < a < b");
    CotangentBounds<M> out;
    out.distance = manifold.distance(x, y);
    if (manifold.nonconjugate(x, y)) {
        const auto barcode = wfh::wfh_barcode(manifold, x, y, 1.5 * out.distance);
        const auto bar = persistence::find_bar_with_ratio(barcode, b / a);
        if (!bar || bar->left != out.distance)
            throw std::logic_error("expected the (distance, inf) bar as the certificate");
        out.barcode_certified = true;
        out.certificate = *bar;
        out.pb_fibers_spheres = pb_lower_from_bar(*bar, a, b);
        out.pb_fibers_zero_section = pb_lower_core(bar->left, a);
    } else {
        out.barcode_certified = false;
        out.certificate = Bar{out.distance, kInf, 0};
        out.pb_fibers_spheres = detail::band_bound(out.distance, a, b);
        out.pb_fibers_zero_section = detail::core_bound(out.distance, a);
    }
    return out;
}

// kappa = 1/pb. A lower bound on pb+ gives an upper bound on kappa, hence a
// valid (possibly loose) chord time budget.
inline double kappa_from_pb(double pb_lower) {
    if (!(pb_lower > 0)) throw argument_error("pb lower bound must be positive");
    return 1.0 / pb_lower;
}

inline double chord_time_budget(double kappa, double delta) {
    if (!(kappa > 0)) throw argument_error("kappa must be positive");
    if (!(delta > 0))
        throw not_separating_error("Delta-separation fails: Delta must be positive");
    return kappa / delta;
}

struct BoundReport {
    nlohmann::json quadruple;
    double d = 0;
    double pb_lower = 0;
    double kappa = 0;
    Bar bar{};
    bool barcode_certified = false;
};

inline nlohmann::json to_json(const BoundReport& rep) {
    nlohmann::json j;
    j["quadruple"] = rep.quadruple;
    j["d"] = rep.d;
    j["pb_lower"] = rep.pb_lower;
    j["kappa"] = rep.kappa;
    j["bar"] = persistence::to_json(rep.bar);
    j["barcode_certified"] = rep.barcode_certified;
    // pb+ is anti-symmetric under swapping the pair roles (with the order of
    // the second pair reversed), so both orderings carry the same numbers.
    j["both_orderings"] = true;
    return j;
}

template <class M>
BoundReport bound_report(const M& manifold, const typename M::Point& x,
                         const typename M::Point& y, const QuadrupleSpec& quad) {
    BoundReport rep;
    rep.quadruple = to_json(quad);
    const double b_for_band = quad.variant == QuadrupleSpec::Variant::FiberFiberSpheres
                                  ? quad.b
                                  : 2.0 * quad.a;
    const auto cb = cotangent_bounds(manifold, x, y, quad.a, b_for_band);
    rep.d = cb.distance;
    rep.bar = cb.certificate;
    rep.barcode_certified = cb.barcode_certified;
    rep.pb_lower = quad.variant == QuadrupleSpec::Variant::FiberFiberSpheres
                       ? cb.pb_fibers_spheres
                       : cb.pb_fibers_zero_section;
    rep.kappa = kappa_from_pb(rep.pb_lower);
    return rep;
}

} // namespace interlink::bounds
