#pragma once

// Model Riemannian geometries with fully computable geodesic data between two
// points: flat tori T^n = R^n/Z^n with a constant metric, and round 2-spheres.
// Each model provides the distance, the complete geodesic spectrum below a
// cutoff (length, Morse index, homotopy class), a non-conjugacy check, and an
// independent numerical boundary-value oracle (shooting + Jacobi field).

#include <array>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "json.hpp"

#include "interlink/errors.hpp"
#include "interlink/linalg.hpp"

namespace interlink::manifolds {

struct GeodesicRecord {
    double length = 0;
    int morse_index = 0;
    std::vector<int> class_tag; // torus: lattice vector k; sphere: {wrap index m}

    friend bool operator==(const GeodesicRecord& a, const GeodesicRecord& b) {
        return a.length == b.length && a.morse_index == b.morse_index &&
               a.class_tag == b.class_tag;
    }
};

inline nlohmann::json to_json(const std::vector<GeodesicRecord>& spectrum, bool scalar_class) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& rec : spectrum) {
        nlohmann::json j;
        j["length"] = rec.length;
        j["index"] = rec.morse_index;
        if (scalar_class)
            j["class"] = rec.class_tag.at(0);
        else
            j["class"] = rec.class_tag;
        arr.push_back(j);
    }
    return arr;
}

inline constexpr double kCoincidenceTol = 1e-9;

namespace detail {

// Fourth-order Runge-Kutta on a second-order system x'' = acc(x, x').
template <class Acc>
void rk4_second_order(std::vector<Vec>& xs, std::vector<Vec>& vs, Vec x, Vec v,
                      double t_end, int steps, Acc acc) {
    const double h = t_end / steps;
    xs.clear();
    vs.clear();
    xs.reserve(static_cast<std::size_t>(steps) + 1);
    vs.reserve(static_cast<std::size_t>(steps) + 1);
    xs.push_back(x);
    vs.push_back(v);
    for (int s = 0; s < steps; ++s) {
        const Vec k1x = v;
        const Vec k1v = acc(x, v);
        const Vec k2x = v + 0.5 * h * k1v;
        const Vec k2v = acc(x + 0.5 * h * k1x, k2x);
        const Vec k3x = v + 0.5 * h * k2v;
        const Vec k3v = acc(x + 0.5 * h * k2x, k3x);
        const Vec k4x = v + h * k3v;
        const Vec k4v = acc(x + h * k3x, k4x);
        x = x + (h / 6.0) * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
        v = v + (h / 6.0) * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
        xs.push_back(x);
        vs.push_back(v);
    }
}

inline double simpson(const std::vector<double>& f, double h) {
    // composite Simpson; falls back to trapezoid on the last interval if odd
    const std::size_t n = f.size() - 1;
    double s = 0;
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) s += (h / 3.0) * (f[i] + 4.0 * f[i + 1] + f[i + 2]);
    if (i < n) s += 0.5 * h * (f[i] + f[i + 1]);
    return s;
}

// Zeros of the Jacobi field J'' + K J = 0, J(0)=0, J'(0)=1 along a unit-speed
// geodesic of the given length; the count of interior zeros is the Morse index.
inline int jacobi_sign_changes(double curvature, double length, int steps = 4000) {
    double j = 0.0, jp = 1.0;
    const double h = length / steps;
    int changes = 0;
    double prev = 0.0;
    for (int s = 0; s < steps; ++s) {
        const double k1j = jp, k1p = -curvature * j;
        const double k2j = jp + 0.5 * h * k1p, k2p = -curvature * (j + 0.5 * h * k1j);
        const double k3j = jp + 0.5 * h * k2p, k3p = -curvature * (j + 0.5 * h * k2j);
        const double k4j = jp + h * k3p, k4p = -curvature * (j + h * k3j);
        j += (h / 6.0) * (k1j + 2 * k2j + 2 * k3j + k4j);
        jp += (h / 6.0) * (k1p + 2 * k2p + 2 * k3p + k4p);
        if (s > 0 && prev * j < 0) ++changes;
        if (j != 0.0) prev = j;
    }
    return changes;
}

} // namespace detail

// ---------------------------------------------------------------------------

class FlatTorus {
  public:
    using Point = Vec; // coordinates in [0,1)^n

    explicit FlatTorus(Mat metric) : metric_(std::move(metric)) {
        if (metric_.size() == 0) throw argument_error("torus dimension must be positive");
        if (!metric_.symmetric(1e-9)) throw argument_error("torus metric must be symmetric");
        const auto ev = symmetric_eigenvalues(metric_);
        if (ev.front() <= 0) throw argument_error("torus metric must be positive definite");
        lambda_min_ = ev.front();
        lambda_max_ = ev.back();
        metric_inv_ = inverse(metric_);
        metric_sqrt_ = spd_sqrt(metric_);
    }

    static FlatTorus euclidean(std::size_t n) { return FlatTorus(Mat::identity(n)); }

    std::size_t dim() const { return metric_.size(); }
    const Mat& metric() const { return metric_; }
    const Mat& metric_inverse() const { return metric_inv_; }
    const Mat& metric_sqrt() const { return metric_sqrt_; }
    double condition_number() const { return lambda_max_ / lambda_min_; }

    static Point reduce(Point q) {
        for (double& c : q) {
            c -= std::floor(c);
            if (c >= 1.0) c = 0.0; // guard against floor rounding at 1-eps
        }
        return q;
    }

    double norm(const Vec& v) const { return std::sqrt(quadratic_form(metric_, v)); }

    // dual (cotangent) norm sqrt(p^T G^{-1} p)
    double conorm(const Vec& p) const { return std::sqrt(quadratic_form(metric_inv_, p)); }

    bool nonconjugate(const Point&, const Point&) const { return true; }

    double distance(const Point& x, const Point& y) const {
        const Vec v = displacement(x, y);
        // cond(G) * (1 + |v|) covers any minimizer; the second bound is the
        // direct norm-equivalence estimate, kept as extra margin
        const int w = std::max<int>(
            {1, static_cast<int>(std::ceil(condition_number() * (1.0 + norm2(v)))),
             static_cast<int>(std::ceil(norm2(v) * (1.0 + std::sqrt(condition_number()))))});
        double best = std::numeric_limits<double>::infinity();
        enumerate_window(w, [&](const std::vector<int>& k) {
            const double len = chord_length(v, k);
            if (len < best) best = len;
        });
        if (best < kCoincidenceTol)
            throw degenerate_input_error("coincident points on the torus");
        return best;
    }

    std::vector<GeodesicRecord> spectrum(const Point& x, const Point& y, double cutoff) const {
        const double d = distance(x, y); // also rejects coincident points
        if (!(cutoff > d)) return {};
        const Vec v = displacement(x, y);
        const int w = std::max<int>(
            1, static_cast<int>(std::ceil(cutoff / std::sqrt(lambda_min_) + norm2(v))));
        std::vector<GeodesicRecord> out;
        enumerate_window(w, [&](const std::vector<int>& k) {
            const double len = chord_length(v, k);
            if (len < cutoff) out.push_back(GeodesicRecord{len, 0, k});
        });
        std::sort(out.begin(), out.end(), [](const GeodesicRecord& a, const GeodesicRecord& b) {
            if (a.length != b.length) return a.length < b.length;
            return a.class_tag < b.class_tag;
        });
        return out;
    }

    // Count of lattice points below a cutoff, for spectrum cross-checks.
    std::size_t lattice_count_below(const Point& x, const Point& y, double cutoff) const {
        const Vec v = displacement(x, y);
        const int w = std::max<int>(
            1, static_cast<int>(std::ceil(cutoff / std::sqrt(lambda_min_) + norm2(v))));
        std::size_t count = 0;
        enumerate_window(w, [&](const std::vector<int>& k) {
            if (chord_length(v, k) < cutoff) ++count;
        });
        return count;
    }

    // Numerical oracle: integrate the geodesic equation (zero Christoffel
    // symbols) from x, Newton-refine the initial velocity to land on the lift
    // of y selected by the lattice class, then report arc length and the
    // Jacobi-field index (flat: zero curvature).
    GeodesicRecord shoot(const Point& x, const Point& y, const std::vector<int>& class_tag,
                         double tol) const {
        const std::size_t n = dim();
        if (class_tag.size() != n) throw argument_error("class tag dimension mismatch");
        Vec target = displacement(x, y);
        for (std::size_t i = 0; i < n; ++i) target[i] += class_tag[i];
        for (std::size_t i = 0; i < n; ++i) target[i] += x[i];

        Vec u(n, 0.0); // initial velocity guess: rest
        auto endpoint = [&](const Vec& u0) {
            std::vector<Vec> xs, vs;
            detail::rk4_second_order(xs, vs, x, u0, 1.0, 64,
                                     [&](const Vec&, const Vec&) { return Vec(n, 0.0); });
            return xs.back();
        };
        double residual = std::numeric_limits<double>::infinity();
        for (int it = 0; it < 30; ++it) {
            const Vec e = endpoint(u) - target;
            residual = norm2(e);
            if (residual < tol) break;
            // finite-difference Jacobian of endpoint w.r.t. initial velocity
            Mat jac(n);
            const double h = 1e-6;
            for (std::size_t c = 0; c < n; ++c) {
                Vec up = u;
                up[c] += h;
                const Vec ep = endpoint(up) - target;
                for (std::size_t r = 0; r < n; ++r) jac(r, c) = (ep[r] - e[r]) / h;
            }
            const Vec step = solve(jac, e);
            u = u - step;
        }
        if (!(residual < tol))
            throw no_convergence_error("torus geodesic shooting did not converge", residual);

        std::vector<Vec> xs, vs;
        detail::rk4_second_order(xs, vs, x, u, 1.0, 256,
                                 [&](const Vec&, const Vec&) { return Vec(n, 0.0); });
        std::vector<double> speed;
        speed.reserve(vs.size());
        for (const Vec& vel : vs) speed.push_back(norm(vel));
        const double len = detail::simpson(speed, 1.0 / 256.0);
        const int index = detail::jacobi_sign_changes(0.0, len);
        return GeodesicRecord{len, index, class_tag};
    }

    nlohmann::json to_json() const {
        nlohmann::json j;
        j["type"] = dim() == 1 ? "t1" : (dim() == 2 ? "t2" : "tn");
        nlohmann::json rows = nlohmann::json::array();
        for (std::size_t i = 0; i < dim(); ++i) {
            nlohmann::json row = nlohmann::json::array();
            for (std::size_t k = 0; k < dim(); ++k) row.push_back(metric_(i, k));
            rows.push_back(row);
        }
        j["metric"] = rows;
        return j;
    }

  private:
    // Raw coordinate difference of the [0,1)^n representatives; geodesic
    // classes are indexed by lattice offsets of this displacement.
    Vec displacement(const Point& x, const Point& y) const {
        if (x.size() != dim() || y.size() != dim())
            throw argument_error("point dimension mismatch");
        const Point xr = reduce(x), yr = reduce(y);
        return yr - xr;
    }

    double chord_length(const Vec& v, const std::vector<int>& k) const {
        Vec w = v;
        for (std::size_t i = 0; i < w.size(); ++i) w[i] += k[i];
        return norm(w);
    }

    template <class F>
    void enumerate_window(int w, F&& visit) const {
        const std::size_t n = dim();
        std::vector<int> k(n, -w);
        for (;;) {
            visit(k);
            std::size_t i = 0;
            while (i < n && ++k[i] > w) {
                k[i] = -w;
                ++i;
            }
            if (i == n) break;
        }
    }

    Mat metric_;
    Mat metric_inv_;
    Mat metric_sqrt_;
    double lambda_min_ = 0;
    double lambda_max_ = 0;
};

// ---------------------------------------------------------------------------

class RoundSphere {
  public:
    using Point = std::array<double, 3>; // unit direction; embedded point is R * direction

    explicit RoundSphere(double radius) : radius_(radius) {
        if (!(radius > 0)) throw argument_error("sphere radius must be positive");
    }

    double radius() const { return radius_; }

    static Point normalize(Point u) {
        const double n = std::sqrt(u[0] * u[0] + u[1] * u[1] + u[2] * u[2]);
        if (n < 1e-12) throw argument_error("zero direction for a sphere point");
        return {u[0] / n, u[1] / n, u[2] / n};
    }

    // x at the pole, y at angle theta along the prime meridian
    static std::pair<Point, Point> points_at_angle(double theta) {
        return {Point{0.0, 0.0, 1.0}, Point{std::sin(theta), 0.0, std::cos(theta)}};
    }

    double angle(const Point& x, const Point& y) const {
        const double c = std::clamp(x[0] * y[0] + x[1] * y[1] + x[2] * y[2], -1.0, 1.0);
        return std::acos(c);
    }

    bool nonconjugate(const Point& x, const Point& y) const {
        const double t = angle(x, y);
        return t > kCoincidenceTol && std::numbers::pi - t > kCoincidenceTol;
    }

    double distance(const Point& x, const Point& y) const {
        const double t = angle(x, y);
        if (t < kCoincidenceTol)
            throw degenerate_input_error("coincident points on the sphere");
        return radius_ * t;
    }

    // Great-circle arcs: even wraps go the short way, odd wraps the long way.
    // Interior conjugate points sit at multiples of pi*R, each adding one to
    // the Morse index.
    std::vector<GeodesicRecord> spectrum(const Point& x, const Point& y, double cutoff) const {
        require_morse(x, y);
        const double theta = angle(x, y);
        std::vector<GeodesicRecord> out;
        for (int m = 0;; ++m) {
            const double len = arc_length(theta, m);
            if (len >= cutoff) break;
            out.push_back(GeodesicRecord{len, conjugate_count(len), {m}});
        }
        return out;
    }

    double arc_length(double theta, int m) const {
        const int j = m / 2;
        if (m % 2 == 0) return radius_ * (2 * std::numbers::pi * j + theta);
        return radius_ * (2 * std::numbers::pi * (j + 1) - theta);
    }

    int conjugate_count(double length) const {
        int c = 0;
        for (int k = 1; k * std::numbers::pi * radius_ < length; ++k) ++c;
        return c;
    }

    // Numerical oracle: shoot the embedded geodesic ODE r'' = -(|r'|^2/R^2) r
    // with RK4, Newton-refine the initial tangent velocity until the endpoint
    // lands on y, then integrate arc length and the Jacobi equation with
    // K = 1/R^2 to count conjugate points.
    GeodesicRecord shoot(const Point& x, const Point& y, int wrap, double tol) const {
        require_morse(x, y);
        const double theta = angle(x, y);
        const Vec xe = {radius_ * x[0], radius_ * x[1], radius_ * x[2]};
        const Vec ye = {radius_ * y[0], radius_ * y[1], radius_ * y[2]};

        // orthonormal tangent frame at x: e points toward y
        Vec e = {y[0] - std::cos(theta) * x[0], y[1] - std::cos(theta) * x[1],
                 y[2] - std::cos(theta) * x[2]};
        e = (1.0 / norm2(e)) * e;
        const Vec f = cross(Vec{x[0], x[1], x[2]}, e);

        const double len_guess = arc_length(theta, wrap);
        Vec coeff = {wrap % 2 == 0 ? len_guess : -len_guess, 0.0};

        const int steps = std::max(2000, static_cast<int>(400.0 * len_guess / radius_));
        auto integrate = [&](const Vec& ab) {
            std::vector<Vec> xs, vs;
            Vec v0 = ab[0] * e + ab[1] * f;
            detail::rk4_second_order(
                xs, vs, xe, v0, 1.0, steps, [&](const Vec& pos, const Vec& vel) {
                    const double sq = dot(vel, vel) / (radius_ * radius_);
                    return Vec{-sq * pos[0], -sq * pos[1], -sq * pos[2]};
                });
            return std::make_pair(std::move(xs), std::move(vs));
        };

        double residual = std::numeric_limits<double>::infinity();
        for (int it = 0; it < 40; ++it) {
            const auto [xs, vs] = integrate(coeff);
            const Vec err3 = xs.back() - ye;
            residual = norm2(err3);
            if (residual < tol) break;
            // Newton in the 2D tangent coordinates, finite-difference Jacobian
            const double h = 1e-7 * std::max(1.0, len_guess);
            Mat jac(2);
            Vec rhs(2);
            Vec ey = {y[0] - std::cos(theta) * x[0], y[1] - std::cos(theta) * x[1],
                      y[2] - std::cos(theta) * x[2]};
            ey = (1.0 / norm2(ey)) * ey; // tangent frame at y
            const Vec fy = cross(Vec{y[0], y[1], y[2]}, ey);
            rhs[0] = dot(err3, ey);
            rhs[1] = dot(err3, fy);
            for (int c = 0; c < 2; ++c) {
                Vec cp = coeff;
                cp[static_cast<std::size_t>(c)] += h;
                const auto [xsp, vsp] = integrate(cp);
                const Vec ep = xsp.back() - ye;
                jac(0, static_cast<std::size_t>(c)) = (dot(ep, ey) - rhs[0]) / h;
                jac(1, static_cast<std::size_t>(c)) = (dot(ep, fy) - rhs[1]) / h;
            }
            const Vec step = solve(jac, rhs);
            coeff = coeff - step;
        }
        if (!(residual < tol))
            throw no_convergence_error("sphere geodesic shooting did not converge", residual);

        const auto [xs, vs] = integrate(coeff);
        std::vector<double> speed;
        speed.reserve(vs.size());
        for (const Vec& vel : vs) speed.push_back(norm2(vel));
        const double len = detail::simpson(speed, 1.0 / steps);
        const int index = detail::jacobi_sign_changes(1.0 / (radius_ * radius_), len);
        return GeodesicRecord{len, index, {wrap}};
    }

    nlohmann::json to_json() const {
        nlohmann::json j;
        j["type"] = "s2";
        j["radius"] = radius_;
        return j;
    }

  private:
    void require_morse(const Point& x, const Point& y) const {
        const double t = angle(x, y);
        if (t < kCoincidenceTol)
            throw degenerate_input_error("coincident points on the sphere");
        if (std::numbers::pi - t < kCoincidenceTol)
            throw non_morse_error(
                "antipodal points are conjugate: the energy functional is not Morse");
    }

    static Vec cross(const Vec& a, const Vec& b) {
        return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2],
                a[0] * b[1] - a[1] * b[0]};
    }

    double radius_;
};

} // namespace interlink::manifolds
