#pragma once

// Smooth scalar function families with exact derivative evaluation, shared by
// the Hamiltonian specs and the admissible test-function pairs:
//
//  - QuadSpline: uniform-knot quadratic B-spline (C^1, piecewise quadratic),
//    with exact per-span maxima and exact integrals;
//  - MonotoneRamp: C^2 monotone 0 -> 1 ramp obtained by integrating a
//    nonnegative zero-clamped QuadSpline (admissibility holds by construction,
//    not by penalty);
//  - RadialProfile: C^2 monotone radial function, either a polynomial with
//    nonnegative coefficients or an integrated slope spline with a linear
//    extension beyond its last knot;
//  - TrigPolynomial and C2Bump for the perturbed Hamiltonian family.

#include <cmath>
#include <numbers>
#include <vector>

#include "json.hpp"

#include "interlink/errors.hpp"
#include "interlink/linalg.hpp"

namespace interlink::profiles {

// Uniform quadratic B-spline: m coefficients give m-2 spans on [lo, hi].
// On span j with local t: s = ((1-t)^2 c_j + (-2t^2+2t+1) c_{j+1} + t^2 c_{j+2}) / 2.
class QuadSpline {
  public:
    QuadSpline() = default;
    QuadSpline(double lo, double hi, std::vector<double> coeffs)
        : lo_(lo), hi_(hi), c_(std::move(coeffs)) {
        if (c_.size() < 3) throw argument_error("quadratic spline needs at least 3 coefficients");
        if (!(hi_ > lo_)) throw argument_error("spline domain is empty");
        h_ = (hi_ - lo_) / static_cast<double>(spans());
    }

    std::size_t spans() const { return c_.size() - 2; }
    double lo() const { return lo_; }
    double hi() const { return hi_; }
    const std::vector<double>& coefficients() const { return c_; }

    double value(double u) const {
        if (u <= lo_) return end_value(0);
        if (u >= hi_) return end_value(spans());
        const auto [j, t] = locate(u);
        const double a = quad_a(j), b = quad_b(j), c = quad_c(j);
        return (a * t + b) * t + c;
    }

    double derivative(double u) const {
        if (u <= lo_ || u >= hi_) return 0.0; // constant extension
        const auto [j, t] = locate(u);
        return (2.0 * quad_a(j) * t + quad_b(j)) / h_;
    }

    double second_derivative(double u) const {
        if (u <= lo_ || u >= hi_) return 0.0;
        const auto [j, t] = locate(u);
        (void)t;
        return 2.0 * quad_a(j) / (h_ * h_);
    }

    double integral() const {
        double s = 0;
        for (std::size_t j = 0; j < spans(); ++j)
            s += h_ * (quad_a(j) / 3.0 + quad_b(j) / 2.0 + quad_c(j));
        return s;
    }

    // integral from lo to u, with constant extension beyond the ends
    double integral_to(double u) const {
        if (u <= lo_) return (u - lo_) * end_value(0);
        double s = 0;
        for (std::size_t j = 0; j < spans(); ++j) {
            const double span_lo = lo_ + h_ * static_cast<double>(j);
            if (u >= span_lo + h_) {
                s += h_ * (quad_a(j) / 3.0 + quad_b(j) / 2.0 + quad_c(j));
                continue;
            }
            const double t = (u - span_lo) / h_;
            s += h_ * ((quad_a(j) * t / 3.0 + quad_b(j) / 2.0) * t + quad_c(j)) * t;
            return s;
        }
        return s + (u - hi_) * end_value(spans());
    }

    // exact maximum over [a, b] intersected with the domain
    double max_on(double a, double b) const {
        a = std::max(a, lo_);
        b = std::min(b, hi_);
        if (!(b > a)) return value(std::clamp(a, lo_, hi_));
        double best = std::max(value(a), value(b));
        for (std::size_t j = 0; j < spans(); ++j) {
            const double span_lo = lo_ + h_ * static_cast<double>(j);
            const double span_hi = span_lo + h_;
            const double wa = std::max(a, span_lo), wb = std::min(b, span_hi);
            if (!(wb > wa)) continue;
            best = std::max({best, value(wa), value(wb)});
            const double qa = quad_a(j), qb = quad_b(j);
            if (qa < 0) {
                const double tv = -qb / (2.0 * qa);
                const double uv = span_lo + tv * h_;
                if (uv > wa && uv < wb) best = std::max(best, value(uv));
            }
        }
        return best;
    }

    double max_value() const { return max_on(lo_, hi_); }

    double max_abs_derivative() const {
        double best = 0;
        for (std::size_t j = 0; j < spans(); ++j) {
            best = std::max(best, std::abs(2.0 * quad_a(j) + quad_b(j)) / h_);
            best = std::max(best, std::abs(quad_b(j)) / h_);
        }
        return best;
    }

  private:
    std::pair<std::size_t, double> locate(double u) const {
        double pos = (u - lo_) / h_;
        std::size_t j = std::min(static_cast<std::size_t>(pos), spans() - 1);
        return {j, pos - static_cast<double>(j)};
    }

    double quad_a(std::size_t j) const { return (c_[j] - 2.0 * c_[j + 1] + c_[j + 2]) / 2.0; }
    double quad_b(std::size_t j) const { return c_[j + 1] - c_[j]; }
    double quad_c(std::size_t j) const { return (c_[j] + c_[j + 1]) / 2.0; }
    double end_value(std::size_t knot) const {
        // value at a knot: average of the two adjacent coefficients
        return (c_[knot] + c_[knot + 1]) / 2.0;
    }

    double lo_ = 0, hi_ = 1, h_ = 1;
    std::vector<double> c_;
};

// C^2 monotone ramp 0 -> 1 on [lo, hi]: the normalized integral of a
// nonnegative quadratic slope spline whose first and last two coefficients are
// structurally zero (so the ramp is flat to second order at both ends).
class MonotoneRamp {
  public:
    MonotoneRamp() = default;
    MonotoneRamp(double lo, double hi, const std::vector<double>& interior_weights) {
        double total = 0;
        for (double w : interior_weights) {
            if (w < 0) throw argument_error("ramp slope weights must be nonnegative");
            total += w;
        }
        if (!(total > 0)) throw argument_error("ramp needs a positive slope weight");
        std::vector<double> coeffs;
        coeffs.reserve(interior_weights.size() + 4);
        coeffs.push_back(0);
        coeffs.push_back(0);
        coeffs.insert(coeffs.end(), interior_weights.begin(), interior_weights.end());
        coeffs.push_back(0);
        coeffs.push_back(0);
        slope_ = QuadSpline(lo, hi, std::move(coeffs));
        scale_ = 1.0 / slope_.integral();
    }

    double lo() const { return slope_.lo(); }
    double hi() const { return slope_.hi(); }

    double value(double u) const {
        if (u <= slope_.lo()) return 0.0;
        if (u >= slope_.hi()) return 1.0;
        return scale_ * slope_.integral_to(u);
    }
    double slope(double u) const { return scale_ * slope_.value(u); }
    double curvature(double u) const { return scale_ * slope_.derivative(u); }

    double max_slope() const { return scale_ * slope_.max_value(); }
    double max_curvature() const { return scale_ * slope_.max_abs_derivative(); }

    const QuadSpline& slope_spline() const { return slope_; }
    double scale() const { return scale_; }

  private:
    QuadSpline slope_;
    double scale_ = 1;
};

// C^2 monotone radial function on [0, inf).
class RadialProfile {
  public:
    // h(r) = sum_k coeffs[k] r^k with coeffs[k] >= 0 for k >= 1
    static RadialProfile polynomial(std::vector<double> coeffs) {
        for (std::size_t k = 1; k < coeffs.size(); ++k)
            if (coeffs[k] < 0)
                throw argument_error("polynomial radial profile must be monotone: "
                                     "nonconstant coefficients must be nonnegative");
        RadialProfile p;
        p.kind_ = Kind::Polynomial;
        p.coeffs_ = std::move(coeffs);
        return p;
    }

    // h(0) = v0, h' = slope spline >= 0 on [0, r_max], linear beyond (the
    // duplicated end coefficients make the last span constant, so the
    // extension is C^2).
    static RadialProfile monotone_spline(double r_max, double v0,
                                         const std::vector<double>& slope_weights) {
        if (slope_weights.empty()) throw argument_error("spline profile needs slope weights");
        for (double w : slope_weights)
            if (w < 0) throw argument_error("spline slope weights must be nonnegative");
        std::vector<double> coeffs;
        coeffs.reserve(slope_weights.size() + 4);
        coeffs.push_back(slope_weights.front());
        coeffs.push_back(slope_weights.front());
        coeffs.insert(coeffs.end(), slope_weights.begin(), slope_weights.end());
        coeffs.push_back(slope_weights.back());
        coeffs.push_back(slope_weights.back());
        RadialProfile p;
        p.kind_ = Kind::Spline;
        p.v0_ = v0;
        p.slope_ = QuadSpline(0.0, r_max, std::move(coeffs));
        return p;
    }

    double value(double r) const {
        if (kind_ == Kind::Polynomial) {
            double s = 0;
            for (std::size_t k = coeffs_.size(); k-- > 0;) s = s * r + coeffs_[k];
            return s;
        }
        return v0_ + slope_.integral_to(r);
    }

    double slope(double r) const {
        if (kind_ == Kind::Polynomial) {
            double s = 0;
            for (std::size_t k = coeffs_.size(); k-- > 1;)
                s = s * r + static_cast<double>(k) * coeffs_[k];
            return s;
        }
        return slope_.value(r);
    }

    double curvature(double r) const {
        if (kind_ == Kind::Polynomial) {
            double s = 0;
            for (std::size_t k = coeffs_.size(); k-- > 2;)
                s = s * r + static_cast<double>(k * (k - 1)) * coeffs_[k];
            return s;
        }
        return slope_.derivative(r);
    }

    // exact maximum of h' on [r_lo, r_hi]
    double max_slope_on(double r_lo, double r_hi) const {
        if (kind_ == Kind::Polynomial) return slope(r_hi); // h' nondecreasing
        double best = std::max(slope(r_lo), slope(r_hi));
        best = std::max(best, slope_.max_on(r_lo, r_hi));
        return best;
    }

    nlohmann::json to_json() const {
        nlohmann::json j;
        if (kind_ == Kind::Polynomial) {
            j["kind"] = "polynomial";
            j["coeffs"] = coeffs_;
        } else {
            j["kind"] = "spline";
            j["r_max"] = slope_.hi();
            j["v0"] = v0_;
            j["slope_coeffs"] = slope_.coefficients();
        }
        return j;
    }

  private:
    enum class Kind { Polynomial, Spline };
    Kind kind_ = Kind::Polynomial;
    std::vector<double> coeffs_; // polynomial
    double v0_ = 0;              // spline
    QuadSpline slope_;           // spline
};

// Finite trigonometric polynomial on T^n.
class TrigPolynomial {
  public:
    struct Mode {
        std::vector<int> m;
        double cos_coeff = 0;
        double sin_coeff = 0;
    };

    TrigPolynomial() = default;
    explicit TrigPolynomial(std::vector<Mode> modes) : modes_(std::move(modes)) {}

    double value(const Vec& q) const {
        double s = 0;
        for (const Mode& mode : modes_) {
            const double phase = phase_of(mode, q);
            s += mode.cos_coeff * std::cos(phase) + mode.sin_coeff * std::sin(phase);
        }
        return s;
    }

    Vec gradient(const Vec& q) const {
        Vec g(q.size(), 0.0);
        for (const Mode& mode : modes_) {
            const double phase = phase_of(mode, q);
            const double d = -mode.cos_coeff * std::sin(phase) + mode.sin_coeff * std::cos(phase);
            for (std::size_t i = 0; i < q.size(); ++i)
                g[i] += 2.0 * std::numbers::pi * mode.m[i] * d;
        }
        return g;
    }

    // sup |value| <= sum_j sqrt(c_j^2 + s_j^2)
    double sup_bound() const {
        double s = 0;
        for (const Mode& mode : modes_)
            s += std::hypot(mode.cos_coeff, mode.sin_coeff);
        return s;
    }

    const std::vector<Mode>& modes() const { return modes_; }

    nlohmann::json to_json() const {
        nlohmann::json arr = nlohmann::json::array();
        for (const Mode& mode : modes_) {
            nlohmann::json j;
            j["m"] = mode.m;
            j["cos"] = mode.cos_coeff;
            j["sin"] = mode.sin_coeff;
            arr.push_back(j);
        }
        return arr;
    }

  private:
    static double phase_of(const Mode& mode, const Vec& q) {
        double s = 0;
        for (std::size_t i = 0; i < q.size(); ++i) s += mode.m[i] * q[i];
        return 2.0 * std::numbers::pi * s;
    }

    std::vector<Mode> modes_;
};

namespace detail {

// quintic smoothstep: C^2 with vanishing first and second derivatives at 0, 1
inline double smoothstep(double t) {
    if (t <= 0) return 0;
    if (t >= 1) return 1;
    return t * t * t * (10.0 + t * (-15.0 + 6.0 * t));
}
inline double smoothstep_d1(double t) {
    if (t <= 0 || t >= 1) return 0;
    const double u = t * (1.0 - t);
    return 30.0 * u * u;
}
inline double smoothstep_d2(double t) {
    if (t <= 0 || t >= 1) return 0;
    return 60.0 * t * (1.0 - t) * (1.0 - 2.0 * t);
}

} // namespace detail

// C^2 bump supported on [lo, hi]: smooth rise over [lo, lo+w], plateau at 1,
// smooth fall over [hi-w, hi].
class C2Bump {
  public:
    C2Bump() = default;
    C2Bump(double lo, double hi, double transition) : lo_(lo), hi_(hi), w_(transition) {
        if (!(hi > lo)) throw argument_error("bump support is empty");
        if (!(transition > 0) || 2.0 * transition > (hi - lo))
            throw argument_error("bump transition width must fit inside the support");
    }

    double lo() const { return lo_; }
    double hi() const { return hi_; }

    double value(double r) const {
        if (r <= lo_ || r >= hi_) return 0;
        return detail::smoothstep((r - lo_) / w_) * detail::smoothstep((hi_ - r) / w_);
    }

    double derivative(double r) const {
        if (r <= lo_ || r >= hi_) return 0;
        const double u = (r - lo_) / w_, v = (hi_ - r) / w_;
        return (detail::smoothstep_d1(u) * detail::smoothstep(v) -
                detail::smoothstep(u) * detail::smoothstep_d1(v)) /
               w_;
    }

    double second_derivative(double r) const {
        if (r <= lo_ || r >= hi_) return 0;
        const double u = (r - lo_) / w_, v = (hi_ - r) / w_;
        return (detail::smoothstep_d2(u) * detail::smoothstep(v) -
                2.0 * detail::smoothstep_d1(u) * detail::smoothstep_d1(v) +
                detail::smoothstep(u) * detail::smoothstep_d2(v)) /
               (w_ * w_);
    }

    // closed-form envelope bounds from the quintic smoothstep factors:
    // |S'| <= 15/8, |S''| <= 10/sqrt(3)
    double derivative_bound() const { return 1.875 / w_; }
    double second_derivative_bound() const {
        return 2.0 * (10.0 / std::sqrt(3.0)) / (w_ * w_) + 2.0 * 1.875 * 1.875 / (w_ * w_);
    }

    nlohmann::json to_json() const {
        nlohmann::json j;
        j["lo"] = lo_;
        j["hi"] = hi_;
        j["transition"] = w_;
        return j;
    }

  private:
    double lo_ = 0, hi_ = 1, w_ = 0.25;
};

} // namespace interlink::profiles
