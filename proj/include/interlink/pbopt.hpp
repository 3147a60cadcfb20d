#pragma once

// Poisson bracket evaluation with the sign convention pinned by the wedge
// identity dF ^ dG ^ omega^(n-1) = -(1/n) {F,G} omega^n under omega = dp ^ dq,
// which forces {q, p} = +1 and {F,G} = sum_i (F_q G_p - F_p G_q).
//
// Also: numerical verification of the deformation identities
//     omega_tau = omega + tau dF ^ dG,   Pf(omega_tau) = (1 - tau {F,G}) Pf(omega),
// and a minimax estimator for upper bounds on pb+ over admissible spline pairs,
// sandwiching the barcode-derived lower bounds.

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "json.hpp"

#include "interlink/bounds.hpp"
#include "interlink/errors.hpp"
#include "interlink/linalg.hpp"
#include "interlink/manifolds.hpp"
#include "interlink/parallel.hpp"
#include "interlink/profiles.hpp"

namespace interlink::pbopt {

using bounds::QuadrupleSpec;
using manifolds::FlatTorus;

// Scalar on phase space with analytic gradients.
struct PhaseFunction {
    std::function<double(const Vec& q, const Vec& p)> value;
    std::function<Vec(const Vec& q, const Vec& p)> grad_q;
    std::function<Vec(const Vec& q, const Vec& p)> grad_p;
};

inline double poisson_bracket(const PhaseFunction& f, const PhaseFunction& g, const Vec& q,
                              const Vec& p) {
    const Vec fq = f.grad_q(q, p), fp = f.grad_p(q, p);
    const Vec gq = g.grad_q(q, p), gp = g.grad_p(q, p);
    double s = 0;
    for (std::size_t i = 0; i < q.size(); ++i) s += fq[i] * gp[i] - fp[i] * gq[i];
    return s;
}

// central-difference cross-check of the analytic bracket
inline double poisson_bracket_fd(const PhaseFunction& f, const PhaseFunction& g, const Vec& q,
                                 const Vec& p, double h = 1e-5) {
    const std::size_t n = q.size();
    auto partial = [&](const PhaseFunction& fn, bool wrt_q, std::size_t i) {
        Vec qp = q, qm = q, pp = p, pm = p;
        (wrt_q ? qp[i] : pp[i]) += h;
        (wrt_q ? qm[i] : pm[i]) -= h;
        return (fn.value(qp, pp) - fn.value(qm, pm)) / (2.0 * h);
    };
    double s = 0;
    for (std::size_t i = 0; i < n; ++i)
        s += partial(f, true, i) * partial(g, false, i) - partial(f, false, i) * partial(g, true, i);
    return s;
}

// --- exterior algebra on a 2n-dimensional fiber -------------------------------

// omega = sum dp_i ^ dq_i as a matrix in the basis (q_1..q_n, p_1..p_n)
inline Mat omega_matrix(std::size_t n) {
    Mat w(2 * n);
    for (std::size_t i = 0; i < n; ++i) {
        w(i, n + i) = -1.0;
        w(n + i, i) = 1.0;
    }
    return w;
}

// dF ^ dG as a matrix: grad F grad G^T - grad G grad F^T over (q, p) coordinates
inline Mat two_form_matrix(const PhaseFunction& f, const PhaseFunction& g, const Vec& q,
                           const Vec& p) {
    const std::size_t n = q.size();
    Vec df(2 * n), dg(2 * n);
    {
        const Vec fq = f.grad_q(q, p), fp = f.grad_p(q, p);
        const Vec gq = g.grad_q(q, p), gp = g.grad_p(q, p);
        for (std::size_t i = 0; i < n; ++i) {
            df[i] = fq[i];
            df[n + i] = fp[i];
            dg[i] = gq[i];
            dg[n + i] = gp[i];
        }
    }
    Mat a(2 * n);
    for (std::size_t r = 0; r < 2 * n; ++r)
        for (std::size_t c = 0; c < 2 * n; ++c) a(r, c) = df[r] * dg[c] - dg[r] * df[c];
    return a;
}

namespace detail {

inline double pfaffian_rec(const Mat& a, std::vector<std::size_t>& idx) {
    const std::size_t m = idx.size();
    if (m == 0) return 1.0;
    double sum = 0;
    const std::size_t i0 = idx[0];
    for (std::size_t t = 1; t < m; ++t) {
        const double entry = a(i0, idx[t]);
        if (entry == 0.0) continue;
        std::vector<std::size_t> rest;
        rest.reserve(m - 2);
        for (std::size_t s = 1; s < m; ++s)
            if (s != t) rest.push_back(idx[s]);
        const double sign = (t % 2 == 1) ? 1.0 : -1.0;
        sum += sign * entry * pfaffian_rec(a, rest);
    }
    return sum;
}

// top coefficient of a wedge of 2-forms, by recursive shuffle expansion
inline double wedge_top_rec(const std::vector<Mat>& forms, std::size_t which,
                            std::vector<std::size_t>& idx) {
    if (which == forms.size()) return 1.0;
    const std::size_t m = idx.size();
    double sum = 0;
    for (std::size_t s = 0; s < m; ++s) {
        for (std::size_t t = s + 1; t < m; ++t) {
            const double entry = forms[which](idx[s], idx[t]);
            if (entry == 0.0) continue;
            std::vector<std::size_t> rest;
            rest.reserve(m - 2);
            for (std::size_t k = 0; k < m; ++k)
                if (k != s && k != t) rest.push_back(idx[k]);
            const double sign = ((s + t - 1) % 2 == 0) ? 1.0 : -1.0;
            sum += sign * entry * wedge_top_rec(forms, which + 1, rest);
        }
    }
    return sum;
}

} // namespace detail

inline double pfaffian(const Mat& a) {
    if (a.size() % 2 != 0) throw argument_error("pfaffian needs even dimension");
    std::vector<std::size_t> idx(a.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    return detail::pfaffian_rec(a, idx);
}

// coefficient of e_1 ^ ... ^ e_2n in forms[0] ^ forms[1] ^ ... (each a 2-form)
inline double wedge_top(const std::vector<Mat>& forms) {
    if (forms.empty()) throw argument_error("wedge_top needs at least one form");
    const std::size_t dim = forms.front().size();
    if (dim != 2 * forms.size())
        throw argument_error("wedge of 2-forms fills the top degree only when dim = 2k");
    std::vector<std::size_t> idx(dim);
    for (std::size_t i = 0; i < dim; ++i) idx[i] = i;
    return detail::wedge_top_rec(forms, 0, idx);
}

// | Pf(omega + tau dF^dG) - (1 - tau {F,G}) Pf(omega) |
inline double degeneracy_residual(const PhaseFunction& f, const PhaseFunction& g, double tau,
                                  const Vec& q, const Vec& p) {
    const std::size_t n = q.size();
    const Mat w = omega_matrix(n);
    const Mat a = two_form_matrix(f, g, q, p);
    Mat wt = w;
    for (std::size_t r = 0; r < 2 * n; ++r)
        for (std::size_t c = 0; c < 2 * n; ++c) wt(r, c) += tau * a(r, c);
    const double pb = poisson_bracket(f, g, q, p);
    return std::abs(pfaffian(wt) - (1.0 - tau * pb) * pfaffian(w));
}

// | top(dF^dG ^ omega^(n-1)) + (1/n) {F,G} top(omega^n) |
inline double wedge_identity_residual(const PhaseFunction& f, const PhaseFunction& g, const Vec& q,
                                      const Vec& p) {
    const std::size_t n = q.size();
    const Mat w = omega_matrix(n);
    const Mat a = two_form_matrix(f, g, q, p);
    std::vector<Mat> lhs{a};
    for (std::size_t k = 1; k < n; ++k) lhs.push_back(w);
    std::vector<Mat> rhs(n, w);
    const double pb = poisson_bracket(f, g, q, p);
    return std::abs(wedge_top(lhs) + (pb / static_cast<double>(n)) * wedge_top(rhs));
}

// Smallest tau at which omega_tau degenerates somewhere on the sample set,
// located by bisection on the minimum Pfaffian ratio (an independent route:
// only Pfaffian evaluations, no bracket formula).
inline double find_critical_tau(const PhaseFunction& f, const PhaseFunction& g,
                                const std::vector<std::pair<Vec, Vec>>& samples, double tau_hi) {
    const auto min_ratio = [&](double tau) {
        double m = std::numeric_limits<double>::infinity();
        for (const auto& [q, p] : samples) {
            const std::size_t n = q.size();
            const Mat w = omega_matrix(n);
            const Mat a = two_form_matrix(f, g, q, p);
            Mat wt = w;
            for (std::size_t r = 0; r < 2 * n; ++r)
                for (std::size_t c = 0; c < 2 * n; ++c) wt(r, c) += tau * a(r, c);
            m = std::min(m, pfaffian(wt) / pfaffian(w));
        }
        return m;
    };
    double lo = 0.0, hi = tau_hi;
    if (!(min_ratio(hi) <= 0))
        throw argument_error("no degeneracy below tau_hi on the sample set");
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (min_ratio(mid) <= 0)
            hi = mid;
        else
            lo = mid;
        if (hi - lo < 1e-14 * tau_hi) break;
    }
    return hi;
}

// --- admissible test-function pairs on T*T^1 -----------------------------------

// F(q): 0 near the fiber over x, 1 near the fiber over y, built from two C^2
// monotone ramps (rise along the forward arc, fall along the backward arc).
// G(r): 0 up to the inner margin, 1 from the outer margin on (constant 1 at
// infinity, following the equivalent quadruple with the conical end filled).
class TorusTestPair {
  public:
    TorusTestPair(const FlatTorus& torus, double x, double y, const QuadrupleSpec& quad,
                  double margin_frac, const std::vector<double>& rise_w,
                  const std::vector<double>& fall_w, const std::vector<double>& g_w)
        : x_(x), sqrt_g_(std::sqrt(torus.metric()(0, 0))) {
        if (torus.dim() != 1) throw argument_error("test pairs are wired for T^1");
        const double forward = wrap01(y - x);
        if (forward < 1e-9 || forward > 1 - 1e-9)
            throw degenerate_input_error("coincident fiber base points");
        const double backward = 1.0 - forward;
        const double m1 = margin_frac * forward, m2 = margin_frac * backward;
        rise_ = profiles::MonotoneRamp(m1, forward - m1, rise_w);
        fall_ = profiles::MonotoneRamp(forward + m2, 1.0 - m2, fall_w);
        if (quad.variant == QuadrupleSpec::Variant::FiberFiberSpheres) {
            const double mg = margin_frac * (quad.b - quad.a);
            g_ramp_ = profiles::MonotoneRamp(quad.a + mg, quad.b - mg, g_w);
        } else {
            const double mg = margin_frac * quad.a;
            g_ramp_ = profiles::MonotoneRamp(mg, quad.a - mg, g_w);
        }
    }

    double f_value(double q) const {
        const double u = wrap01(q - x_);
        if (u <= rise_.hi()) return rise_.value(u);
        if (u < fall_.lo()) return 1.0;
        return 1.0 - fall_.value(u);
    }
    double f_slope(double q) const {
        const double u = wrap01(q - x_);
        if (u <= rise_.hi()) return rise_.slope(u);
        if (u < fall_.lo()) return 0.0;
        return -fall_.slope(u);
    }
    double g_value(double r) const { return g_ramp_.value(r); }
    double g_slope(double r) const { return g_ramp_.slope(r); }

    // exact max of {F,G} = F'(q) G'(r) sgn(p) / sqrt(g): the slope splines are
    // piecewise quadratic, so their maxima are available in closed form
    double exact_max_bracket() const {
        const double fmax = std::max(rise_.max_slope(), fall_.max_slope());
        return fmax * g_ramp_.max_slope() / sqrt_g_;
    }

    double max_f_curvature() const { return std::max(rise_.max_curvature(), fall_.max_curvature()); }
    double max_f_slope() const { return std::max(rise_.max_slope(), fall_.max_slope()); }
    double max_g_curvature() const { return g_ramp_.max_curvature(); }
    double max_g_slope() const { return g_ramp_.max_slope(); }

    PhaseFunction as_f() const {
        return PhaseFunction{
            [this](const Vec& q, const Vec&) { return f_value(q[0]); },
            [this](const Vec& q, const Vec&) { return Vec{f_slope(q[0])}; },
            [this](const Vec&, const Vec&) { return Vec{0.0}; },
        };
    }
    PhaseFunction as_g() const {
        return PhaseFunction{
            [this](const Vec&, const Vec& p) { return g_value(std::abs(p[0]) / sqrt_g_); },
            [this](const Vec&, const Vec&) { return Vec{0.0}; },
            [this](const Vec&, const Vec& p) {
                const double r = std::abs(p[0]) / sqrt_g_;
                const double sgn = p[0] >= 0 ? 1.0 : -1.0;
                return Vec{g_slope(r) * sgn / sqrt_g_};
            },
        };
    }

    const profiles::MonotoneRamp& rise() const { return rise_; }
    const profiles::MonotoneRamp& fall() const { return fall_; }
    const profiles::MonotoneRamp& g_ramp() const { return g_ramp_; }
    double base_point() const { return x_; }
    double dual_scale() const { return sqrt_g_; }

    nlohmann::json to_json() const {
        auto ramp_json = [](const profiles::MonotoneRamp& r) {
            nlohmann::json j;
            j["lo"] = r.lo();
            j["hi"] = r.hi();
            j["slope_coeffs"] = r.slope_spline().coefficients();
            j["scale"] = r.scale();
            return j;
        };
        nlohmann::json j;
        j["x"] = x_;
        j["rise"] = ramp_json(rise_);
        j["fall"] = ramp_json(fall_);
        j["g"] = ramp_json(g_ramp_);
        return j;
    }

  private:
    static double wrap01(double u) {
        u -= std::floor(u);
        if (u >= 1.0) u = 0.0;
        return u;
    }

    double x_ = 0;
    double sqrt_g_ = 1;
    profiles::MonotoneRamp rise_, fall_, g_ramp_;
};

// A joint nonseparable extension of the product ansatz: F picks up a coupling
// term c * W(q) * B(r) with W supported away from both fibers (admissibility is
// untouched for any c). Its bracket is (F' + c W' B) G' sgn(p) / sqrt(g), and
// the triangle inequality gives the certified-from-above objective
// (max|F'| + |c| sup|W'| sup B) max G' / sqrt(g), exact at c = 0.
class CoupledPair {
  public:
    CoupledPair(TorusTestPair base, double c) : base_(std::move(base)), c_(c) {
        const auto& fall = base_.fall();
        const double wq = 0.25 * (fall.hi() - fall.lo());
        w_q_ = profiles::C2Bump(fall.lo(), fall.hi(), wq);
        const auto& g = base_.g_ramp();
        b_r_ = profiles::C2Bump(g.lo(), g.hi(), 0.25 * (g.hi() - g.lo()));
    }

    const TorusTestPair& base() const { return base_; }
    double coupling() const { return c_; }

    double bracket(double q, double r, double sign_p) const {
        const double u0 = q - base_.base_point();
        const double u = u0 - std::floor(u0);
        const double fq = base_.f_slope(q) + c_ * w_q_.derivative(u) * b_r_.value(r);
        return fq * base_.g_slope(r) * sign_p / base_.dual_scale();
    }

    double certified_upper() const {
        const double f_part = base_.max_f_slope() + std::abs(c_) * w_q_.derivative_bound();
        return f_part * base_.max_g_slope() / base_.dual_scale();
    }

    // how much a (dq, dr) grid can under-report the bracket maximum
    double grid_lipschitz(double dq, double dr) const {
        const double fq2 = base_.max_f_curvature() + std::abs(c_) * w_q_.second_derivative_bound();
        const double fq1 = base_.max_f_slope() + std::abs(c_) * w_q_.derivative_bound();
        const double cross = std::abs(c_) * w_q_.derivative_bound() * b_r_.derivative_bound() *
                             base_.max_g_slope();
        return (fq2 * base_.max_g_slope() * dq + (fq1 * base_.max_g_curvature() + cross) * dr) /
               base_.dual_scale();
    }

    nlohmann::json to_json() const {
        nlohmann::json j = base_.to_json();
        j["coupling"] = c_;
        j["w_q"] = w_q_.to_json();
        j["b_r"] = b_r_.to_json();
        return j;
    }

  private:
    TorusTestPair base_;
    double c_ = 0;
    profiles::C2Bump w_q_, b_r_;
};

// --- minimax estimation of pb+ upper bounds ------------------------------------

struct PbEstimateConfig {
    int weights_per_ramp = 32;
    double margin_frac = 0.003;
    int restarts = 2;
    int nm_iters = 500;
    int coord_rounds = 6;
    std::uint64_t seed = 1;
    int grid_q = 512;
    int grid_r = 256;
    bool nonseparable = false; // add the coupled term to the search space
};

struct PbEstimate {
    double upper = 0;           // certified max of the best admissible pair
    double raw_max = 0;         // before the final clamp at zero
    bool clamped = false;       // raw max was negative (never for these pairs)
    double grid_max = 0;        // dense-grid evaluation of the same pair
    double grid_bound = 0;      // grid_max + Lipschitz cell correction
    double lower = 0;           // barcode-backed lower bound
    double gap_ratio = 0;       // upper / lower
    bool stagnated = false;
    std::uint64_t seed = 0;
    nlohmann::json pair;
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

inline double unit_double(std::uint64_t& state) {
    return static_cast<double>(splitmix64(state) >> 11) * 0x1.0p-53;
}

struct NmResult {
    Vec x;
    double fx = 0;
    bool stalled = false; // converged before exhausting the iteration budget
};

// Nelder-Mead simplex descent; deterministic for fixed inputs.
template <class F>
NmResult nelder_mead(F&& objective, Vec x0, double step, int iters) {
    const std::size_t d = x0.size();
    bool stalled = false;
    std::vector<Vec> xs(d + 1, x0);
    std::vector<double> fx(d + 1);
    for (std::size_t i = 0; i < d; ++i) xs[i + 1][i] += step;
    for (std::size_t i = 0; i <= d; ++i) fx[i] = objective(xs[i]);
    for (int it = 0; it < iters; ++it) {
        std::vector<std::size_t> ord(d + 1);
        for (std::size_t i = 0; i <= d; ++i) ord[i] = i;
        std::sort(ord.begin(), ord.end(), [&](std::size_t a, std::size_t b) { return fx[a] < fx[b]; });
        const std::size_t best = ord[0], worst = ord[d], second = ord[d - 1];
        if (fx[worst] - fx[best] < 1e-12 * (1 + std::abs(fx[best]))) {
            stalled = true;
            break;
        }
        Vec centroid(d, 0.0);
        for (std::size_t i = 0; i <= d; ++i)
            if (i != worst)
                for (std::size_t k = 0; k < d; ++k) centroid[k] += xs[i][k] / d;
        auto blend = [&](double t) {
            Vec y(d);
            for (std::size_t k = 0; k < d; ++k) y[k] = centroid[k] + t * (xs[worst][k] - centroid[k]);
            return y;
        };
        const Vec xr = blend(-1.0);
        const double fr = objective(xr);
        if (fr < fx[best]) {
            const Vec xe = blend(-2.0);
            const double fe = objective(xe);
            if (fe < fr) {
                xs[worst] = xe;
                fx[worst] = fe;
            } else {
                xs[worst] = xr;
                fx[worst] = fr;
            }
        } else if (fr < fx[second]) {
            xs[worst] = xr;
            fx[worst] = fr;
        } else {
            const Vec xc = blend(0.5);
            const double fc = objective(xc);
            if (fc < fx[worst]) {
                xs[worst] = xc;
                fx[worst] = fc;
            } else {
                for (std::size_t i = 0; i <= d; ++i) {
                    if (i == best) continue;
                    for (std::size_t k = 0; k < d; ++k)
                        xs[i][k] = xs[best][k] + 0.5 * (xs[i][k] - xs[best][k]);
                    fx[i] = objective(xs[i]);
                }
            }
        }
    }
    std::size_t best = 0;
    for (std::size_t i = 1; i <= d; ++i)
        if (fx[i] < fx[best]) best = i;
    return NmResult{xs[best], fx[best], stalled};
}

} // namespace detail

// Dense-grid maximum of {F,G} with refinement near the slope-spline knots,
// plus a Lipschitz cell bound on how much the grid can under-report.
inline std::pair<double, double> grid_bracket_max(const CoupledPair& coupled,
                                                  const QuadrupleSpec& quad, int grid_q,
                                                  int grid_r) {
    const TorusTestPair& pair = coupled.base();
    const double r_hi = (quad.variant == QuadrupleSpec::Variant::FiberFiberSpheres
                             ? quad.b
                             : quad.a) + 2.0;
    std::vector<double> qs, rs;
    for (int i = 0; i < grid_q; ++i) qs.push_back(i / static_cast<double>(grid_q));
    for (int j = 0; j <= grid_r; ++j) rs.push_back(r_hi * j / grid_r);
    // refine near ramp boundaries: halved cells around each window
    auto refine = [](std::vector<double>& v, double a, double b, double cell) {
        for (double u = a - cell; u <= b + cell; u += 0.5 * cell) v.push_back(u);
    };
    refine(qs, pair.rise().lo(), pair.rise().hi(), 1.0 / grid_q);
    refine(qs, pair.fall().lo(), pair.fall().hi(), 1.0 / grid_q);
    refine(rs, pair.g_ramp().lo(), pair.g_ramp().hi(), r_hi / grid_r);
    double best = 0;
    for (double q : qs)
        for (double r : rs)
            best = std::max({best, coupled.bracket(q, r, +1.0), coupled.bracket(q, r, -1.0)});
    const double dq = 0.5 / grid_q, dr = 0.5 * r_hi / grid_r;
    return {best, best + coupled.grid_lipschitz(dq, dr)};
}

// Minimize the max of {F,G} over the spline control points: simplex descent
// with seeded restarts, then per-weight coordinate refinement. Any admissible
// pair upper-bounds pb+, so the returned value is certified from above.
inline PbEstimate estimate_pb_upper(const FlatTorus& torus, double x, double y,
                                    const QuadrupleSpec& quad, PbEstimateConfig cfg = {}) {
    if (torus.dim() != 1) throw argument_error("pb estimation is wired for T^1");
    const int k = cfg.weights_per_ramp;
    const std::size_t dim = static_cast<std::size_t>(3 * k) + (cfg.nonseparable ? 1 : 0);

    auto decode = [&](const Vec& params) {
        std::vector<double> rise_w(k), fall_w(k), g_w(k);
        for (int i = 0; i < k; ++i) {
            rise_w[i] = params[i] * params[i];
            fall_w[i] = params[k + i] * params[k + i];
            g_w[i] = params[2 * k + i] * params[2 * k + i];
        }
        TorusTestPair base(torus, x, y, quad, cfg.margin_frac, rise_w, fall_w, g_w);
        const double c = cfg.nonseparable ? 0.2 * params.back() : 0.0;
        return CoupledPair(std::move(base), c);
    };
    auto objective = [&](const Vec& params) {
        double floor = 0;
        for (int i = 0; i < 3 * k; ++i) floor = std::max(floor, std::abs(params[i]));
        if (floor < 1e-9) return 1e18; // all-zero ramp is inadmissible
        try {
            return decode(params).certified_upper();
        } catch (const std::exception&) {
            return 1e18;
        }
    };

    std::vector<detail::NmResult> results(static_cast<std::size_t>(cfg.restarts));
    parallel_for(results.size(), [&](std::size_t ri) {
        std::uint64_t state = cfg.seed * 0x9e3779b97f4a7c15ull + ri;
        Vec x0(dim, 1.0);
        if (ri > 0)
            for (double& v : x0) v = 0.7 + 0.6 * detail::unit_double(state);
        if (cfg.nonseparable) x0.back() = 0.0; // start from the product pair
        auto nm = detail::nelder_mead(objective, x0, 0.35, cfg.nm_iters);
        // coordinate refinement with shrinking steps
        for (int round = 0; round < cfg.coord_rounds; ++round) {
            const double delta = 0.3 * std::pow(0.5, round);
            for (std::size_t i = 0; i < dim; ++i) {
                for (double sgn : {+1.0, -1.0}) {
                    Vec t = nm.x;
                    t[i] *= (1.0 + sgn * delta);
                    const double ft = objective(t);
                    if (ft < nm.fx) {
                        nm.x = t;
                        nm.fx = ft;
                    }
                }
            }
        }
        results[ri] = nm;
    });

    std::size_t best = 0;
    for (std::size_t i = 1; i < results.size(); ++i)
        if (results[i].fx < results[best].fx) best = i;
    const CoupledPair pair = decode(results[best].x);

    PbEstimate est;
    est.raw_max = pair.certified_upper();
    est.clamped = est.raw_max < 0;
    est.upper = est.clamped ? 0.0 : est.raw_max;
    const auto [gmax, gbound] = grid_bracket_max(pair, quad, cfg.grid_q, cfg.grid_r);
    est.grid_max = gmax;
    est.grid_bound = gbound;
    const auto cb = bounds::cotangent_bounds(
        torus, Vec{x}, Vec{y}, quad.a,
        quad.variant == QuadrupleSpec::Variant::FiberFiberSpheres ? quad.b : 2.0 * quad.a);
    est.lower = quad.variant == QuadrupleSpec::Variant::FiberFiberSpheres
                    ? cb.pb_fibers_spheres
                    : cb.pb_fibers_zero_section;
    est.gap_ratio = est.upper / est.lower;
    est.stagnated = results[best].stalled;
    est.seed = cfg.seed;
    est.pair = pair.to_json();
    return est;
}

inline nlohmann::json to_json(const PbEstimate& est, const QuadrupleSpec& quad) {
    nlohmann::json j;
    j["quadruple"] = bounds::to_json(quad);
    j["upper"] = est.upper;
    j["raw_max"] = est.raw_max;
    j["clamped"] = est.clamped;
    j["grid_max"] = est.grid_max;
    j["grid_bound"] = est.grid_bound;
    j["lower"] = est.lower;
    j["gap_ratio"] = est.gap_ratio;
    j["pair"] = est.pair;
    j["stagnated"] = est.stagnated;
    j["seed"] = est.seed;
    return j;
}

} // namespace interlink::pbopt
