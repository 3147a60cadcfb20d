#pragma once

// Hamiltonian dynamics on T*T^n: autonomous Hamiltonians from the closed
// family h(|p|) [+ eps * A(q) * B(|p|)], symplectic integration by the
// implicit midpoint rule, Delta-separation measurement, chord shooting between
// cotangent fibers, and end-to-end interlinking verification.
//
// Sign conventions, fixed once: with the Liouville form p dq the symplectic
// form is omega = dp ^ dq, and omega(X_H, .) = -dH expands to
//     qdot = dH/dp,   pdot = -dH/dq.
// The conservation identity dH(X_H) = 0 and the Pfaffian identity checked in
// the bracket module pin this sign web down in tests.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "interlink/bounds.hpp"
#include "interlink/errors.hpp"
#include "interlink/linalg.hpp"
#include "interlink/manifolds.hpp"
#include "interlink/parallel.hpp"
#include "interlink/profiles.hpp"

namespace interlink::dynamics {

using bounds::QuadrupleSpec;
using manifolds::FlatTorus;

struct CotangentPoint {
    Vec q; // torus coordinates, reduced mod 1 for reporting
    Vec p;
};

struct Perturbation {
    double eps = 0;
    profiles::TrigPolynomial angular;
    profiles::C2Bump radial_bump;
};

// Autonomous Hamiltonian on T*T^n with analytic gradients.
class Hamiltonian {
  public:
    Hamiltonian(FlatTorus torus, profiles::RadialProfile radial)
        : torus_(std::move(torus)), radial_(std::move(radial)) {}
    Hamiltonian(FlatTorus torus, profiles::RadialProfile radial, Perturbation pert)
        : torus_(std::move(torus)), radial_(std::move(radial)), pert_(std::move(pert)) {}

    const FlatTorus& torus() const { return torus_; }
    const profiles::RadialProfile& radial() const { return radial_; }
    bool radial_only() const { return !pert_.has_value(); }
    const Perturbation& perturbation() const { return *pert_; }

    double conorm(const Vec& p) const { return torus_.conorm(p); }

    double value(const Vec& q, const Vec& p) const {
        const double r = conorm(p);
        double v = radial_.value(r);
        if (pert_) v += pert_->eps * pert_->angular.value(q) * pert_->radial_bump.value(r);
        return v;
    }

    Vec grad_q(const Vec& q, const Vec& p) const {
        if (!pert_) return Vec(q.size(), 0.0);
        const double r = conorm(p);
        return (pert_->eps * pert_->radial_bump.value(r)) * pert_->angular.gradient(q);
    }

    Vec grad_p(const Vec& q, const Vec& p) const {
        const double r = conorm(p);
        if (r < 1e-14) return Vec(p.size(), 0.0);
        double dr = radial_.slope(r);
        if (pert_) dr += pert_->eps * pert_->angular.value(q) * pert_->radial_bump.derivative(r);
        return (dr / r) * torus_.metric_inverse().mul(p);
    }

    // Speed bound for step-size selection: max |dH/dp| over |p| <= r.
    double speed_bound(double r_max) const {
        double m = 0;
        for (int i = 0; i <= 256; ++i) {
            const double r = r_max * i / 256.0;
            double s = std::abs(radial_.slope(r));
            if (pert_)
                s += pert_->eps * pert_->angular.sup_bound() *
                     std::abs(pert_->radial_bump.derivative(r));
            m = std::max(m, s);
        }
        const auto ev = symmetric_eigenvalues(torus_.metric());
        return m / std::sqrt(ev.front());
    }

    nlohmann::json to_json() const {
        nlohmann::json j;
        j["type"] = pert_ ? "radial_perturbed" : "radial";
        j["profile"] = radial_.to_json();
        if (pert_) {
            j["eps"] = pert_->eps;
            j["angular"] = pert_->angular.to_json();
            j["bump"] = pert_->radial_bump.to_json();
        }
        return j;
    }

  private:
    FlatTorus torus_;
    profiles::RadialProfile radial_;
    std::optional<Perturbation> pert_;
};

struct PhaseVelocity {
    Vec qdot;
    Vec pdot;
};

template <class H>
PhaseVelocity hamiltonian_vector_field(const H& ham, const Vec& q, const Vec& p) {
    return PhaseVelocity{ham.grad_p(q, p), -1.0 * ham.grad_q(q, p)};
}

// dH(X_H), identically zero for autonomous H; evaluated literally as a
// floating-point consistency probe of the sign conventions.
template <class H>
double conservation_residual(const H& ham, const Vec& q, const Vec& p) {
    const PhaseVelocity v = hamiltonian_vector_field(ham, q, p);
    return std::abs(dot(ham.grad_q(q, p), v.qdot) + dot(ham.grad_p(q, p), v.pdot));
}

namespace detail {

inline constexpr double kMidpointTol = 1e-13;
inline constexpr int kMidpointMaxIters = 64;

// One implicit midpoint step; q evolves in the universal-cover lift.
template <class H>
void midpoint_step(const H& ham, Vec& q, Vec& p, double dt) {
    Vec qm = q, pm = p;
    for (int it = 0; it < kMidpointMaxIters; ++it) {
        const PhaseVelocity v = hamiltonian_vector_field(ham, qm, pm);
        double delta = 0;
        for (std::size_t i = 0; i < q.size(); ++i) {
            const double qn = q[i] + 0.5 * dt * v.qdot[i];
            const double pn = p[i] + 0.5 * dt * v.pdot[i];
            delta = std::max({delta, std::abs(qn - qm[i]), std::abs(pn - pm[i])});
            qm[i] = qn;
            pm[i] = pn;
        }
        if (delta < kMidpointTol) {
            for (std::size_t i = 0; i < q.size(); ++i) {
                q[i] = 2.0 * qm[i] - q[i];
                p[i] = 2.0 * pm[i] - p[i];
            }
            return;
        }
    }
    throw step_failure_error("implicit midpoint iteration stalled; reduce dt");
}

} // namespace detail

struct TrajectorySample {
    double t = 0;
    Vec q; // lifted coordinates
    Vec p;
    double energy = 0;
};

struct Trajectory {
    std::vector<TrajectorySample> samples;
    double dt = 0;
    double energy_drift = 0;
};

template <class H>
Trajectory integrate(const H& ham, const CotangentPoint& z0, double dt, int steps) {
    if (!(dt > 0)) throw argument_error("integration step must be positive");
    Trajectory traj;
    traj.dt = dt;
    traj.samples.reserve(static_cast<std::size_t>(steps) + 1);
    Vec q = z0.q, p = z0.p;
    const double e0 = ham.value(q, p);
    traj.samples.push_back(TrajectorySample{0.0, q, p, e0});
    double drift = 0;
    for (int s = 1; s <= steps; ++s) {
        detail::midpoint_step(ham, q, p, dt);
        const double e = ham.value(q, p);
        drift = std::max(drift, std::abs(e - e0));
        traj.samples.push_back(TrajectorySample{dt * s, q, p, e});
    }
    traj.energy_drift = drift;
    return traj;
}

// --- Delta-separation ---------------------------------------------------------

struct SeparationSet {
    bool zero_section = false;
    double radius = 0;

    static SeparationSet sphere(double r) {
        if (!(r > 0)) throw argument_error("cosphere radius must be positive");
        return SeparationSet{false, r};
    }
    static SeparationSet section() { return SeparationSet{true, 0.0}; }
};

namespace detail {

// covector of prescribed dual norm: p = G^{1/2} u with |u| = r
inline Vec covector_on_sphere(const FlatTorus& torus, double r, double angle_or_sign) {
    const std::size_t n = torus.dim();
    Vec u(n, 0.0);
    if (n == 1)
        u[0] = r * angle_or_sign;
    else {
        u[0] = r * std::cos(angle_or_sign);
        u[1] = r * std::sin(angle_or_sign);
    }
    return torus.metric_sqrt().mul(u);
}

} // namespace detail

// inf over the outer set minus sup over the inner set. Exact from the radial
// profile when H is radial; otherwise estimated on a low-discrepancy sample of
// (q, direction) pairs.
template <class SetEval>
double extremum_over_set(const Hamiltonian& ham, const SeparationSet& set, int samples,
                         SetEval&& combine, double init) {
    const std::size_t n = ham.torus().dim();
    const double alphas[3] = {0.6180339887498949, 0.4142135623730951, 0.7320508075688772};
    double acc = init;
    for (int j = 0; j < samples; ++j) {
        Vec q(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double v = (j + 1) * alphas[i % 3];
            q[i] = v - std::floor(v);
        }
        Vec p(n, 0.0);
        if (!set.zero_section) {
            const double ang = n == 1 ? (j % 2 == 0 ? 1.0 : -1.0)
                                      : 2.0 * std::numbers::pi * ((j + 1) * alphas[2] -
                                                                  std::floor((j + 1) * alphas[2]));
            p = detail::covector_on_sphere(ham.torus(), set.radius, ang);
        }
        acc = combine(acc, ham.value(q, p));
    }
    return acc;
}

inline double separation(const Hamiltonian& ham, const SeparationSet& inner,
                         const SeparationSet& outer, int samples = 4096) {
    double delta;
    if (ham.radial_only()) {
        const double lo = inner.zero_section ? ham.radial().value(0.0)
                                             : ham.radial().value(inner.radius);
        const double hi = outer.zero_section ? ham.radial().value(0.0)
                                             : ham.radial().value(outer.radius);
        delta = hi - lo;
    } else {
        const double sup_inner = extremum_over_set(
            ham, inner, samples, [](double a, double b) { return std::max(a, b); },
            -std::numeric_limits<double>::infinity());
        const double inf_outer = extremum_over_set(
            ham, outer, samples, [](double a, double b) { return std::min(a, b); },
            std::numeric_limits<double>::infinity());
        delta = inf_outer - sup_inner;
    }
    if (!(delta > 0))
        throw not_separating_error("Hamiltonian does not separate the pair: Delta = " +
                                   std::to_string(delta));
    return delta;
}

// --- chord search --------------------------------------------------------------

struct SearchConfig {
    double r_max = 0;          // p0 ball radius in the dual norm; 0 = caller default
    int radial_samples = 48;
    int angular_samples = 32;  // directions for n >= 2
    double tol_q = 1e-7;       // acceptance threshold on the endpoint error
    double coarse_tol = 0.12;  // near-miss threshold during the scan
    int max_candidates_per_p0 = 3;
    int polish_iters = 80;
    double dt = 0;             // 0 = automatic from the speed bound
    std::uint64_t seed = 0;    // echoed into reports
};

struct SearchStats {
    int p0_points = 0;
    long long integration_steps = 0;
    int candidates = 0;
    int resolved = 0;
    int polish_accepts = 0;
    double best_endpoint_error = std::numeric_limits<double>::infinity();
};

struct ChordRecord {
    Vec p0;
    double time = 0;
    double endpoint_error = 0;
    double action = 0;
};

inline nlohmann::json to_json(const ChordRecord& c) {
    nlohmann::json j;
    j["p0"] = c.p0;
    j["time"] = c.time;
    j["endpoint_error"] = c.endpoint_error;
    j["action"] = c.action;
    return j;
}

inline nlohmann::json to_json(const SearchStats& s) {
    nlohmann::json j;
    j["p0_points"] = s.p0_points;
    j["integration_steps"] = s.integration_steps;
    j["candidates"] = s.candidates;
    j["resolved"] = s.resolved;
    j["polish_accepts"] = s.polish_accepts;
    j["best_endpoint_error"] =
        std::isfinite(s.best_endpoint_error) ? nlohmann::json(s.best_endpoint_error)
                                             : nlohmann::json(nullptr);
    return j;
}

namespace detail {

struct ChordProblem {
    const Hamiltonian* ham;
    Vec x;       // start fiber base point (lift)
    Vec y;       // target fiber base point, representative in [0,1)^n
    double dt;   // base integration step
};

// per-coordinate wrap of q - y into [-1/2, 1/2) plus the integer offset
inline Vec wrap_difference(const Vec& q, const Vec& y, Vec* offset = nullptr) {
    Vec w(q.size());
    if (offset) offset->assign(q.size(), 0.0);
    for (std::size_t i = 0; i < q.size(); ++i) {
        const double raw = q[i] - y[i];
        const double k = std::round(raw);
        w[i] = raw - k;
        if (offset) (*offset)[i] = k;
    }
    return w;
}

inline double fiber_distance(const ChordProblem& prob, const Vec& q) {
    const Vec w = wrap_difference(q, prob.y);
    return prob.ham->torus().norm(w);
}

// flow endpoint q(t) from (x, p0), stepping with the base dt plus a partial step
inline Vec flow_endpoint(const ChordProblem& prob, const Vec& p0, double t,
                         long long* steps_out = nullptr) {
    Vec q = prob.x, p = p0;
    const int whole = static_cast<int>(std::floor(t / prob.dt));
    for (int s = 0; s < whole; ++s) midpoint_step(*prob.ham, q, p, prob.dt);
    const double rest = t - whole * prob.dt;
    if (rest > 1e-15) midpoint_step(*prob.ham, q, p, rest);
    if (steps_out) *steps_out += whole + 1;
    return q;
}

struct ResolvedChord {
    Vec p0;
    double time = 0;
    double error = 0;
};

// Gauss-Newton on the lifted endpoint residual rho(p0, t) = q(t; p0) - target,
// n equations in n+1 unknowns, taking minimum-norm steps. For n = 1 this
// reduces to a secant-style sweep over (p0, t) as well.
inline std::optional<ResolvedChord> gauss_newton_resolve(const ChordProblem& prob, Vec p0,
                                                         double t, const Vec& target_lift,
                                                         double t_cap, long long* steps) {
    const std::size_t n = p0.size();
    const double fd = 1e-6;
    double err = std::numeric_limits<double>::infinity();
    for (int it = 0; it < 40; ++it) {
        if (!(t > 0) || t > t_cap) return std::nullopt;
        const Vec q = flow_endpoint(prob, p0, t, steps);
        Vec rho = q - target_lift;
        err = prob.ham->torus().norm(rho);
        if (err < 1e-10) return ResolvedChord{p0, t, err};

        // FD Jacobian: columns for each p0 component, then for t
        std::vector<Vec> cols;
        cols.reserve(n + 1);
        for (std::size_t c = 0; c < n; ++c) {
            Vec pp = p0;
            pp[c] += fd;
            const Vec qp = flow_endpoint(prob, pp, t, steps);
            cols.push_back((1.0 / fd) * (qp - q));
        }
        {
            const Vec qt = flow_endpoint(prob, p0, t + fd, steps);
            cols.push_back((1.0 / fd) * (qt - q));
        }
        // minimum-norm step: delta = J^T (J J^T)^{-1} rho
        Mat jjt(n);
        for (std::size_t r = 0; r < n; ++r)
            for (std::size_t c = 0; c < n; ++c) {
                double s = 0;
                for (std::size_t k = 0; k <= n; ++k) s += cols[k][r] * cols[k][c];
                jjt(r, c) = s;
            }
        Vec lam;
        try {
            lam = solve(jjt, rho);
        } catch (const domain_error&) {
            return std::nullopt;
        }
        for (std::size_t k = 0; k <= n; ++k) {
            double d = 0;
            for (std::size_t r = 0; r < n; ++r) d += cols[k][r] * lam[r];
            if (k < n)
                p0[k] -= d;
            else
                t -= d;
        }
    }
    return std::nullopt;
}

// tangent direction of the chord manifold at (p0, t): null space of the
// n x (n+1) endpoint Jacobian
inline std::optional<Vec> manifold_direction(const ChordProblem& prob, const Vec& p0, double t,
                                             long long* steps) {
    const std::size_t n = p0.size();
    const double fd = 1e-6;
    const Vec q = flow_endpoint(prob, p0, t, steps);
    std::vector<Vec> cols;
    for (std::size_t c = 0; c < n; ++c) {
        Vec pp = p0;
        pp[c] += fd;
        cols.push_back((1.0 / fd) * (flow_endpoint(prob, pp, t, steps) - q));
    }
    cols.push_back((1.0 / fd) * (flow_endpoint(prob, p0, t + fd, steps) - q));

    Vec dir(n + 1, 0.0);
    if (n == 1) {
        dir[0] = -cols[1][0];
        dir[1] = cols[0][0];
    } else if (n == 2) {
        // cross product of the two Jacobian rows
        const Vec r0 = {cols[0][0], cols[1][0], cols[2][0]};
        const Vec r1 = {cols[0][1], cols[1][1], cols[2][1]};
        dir[0] = r0[1] * r1[2] - r0[2] * r1[1];
        dir[1] = r0[2] * r1[0] - r0[0] * r1[2];
        dir[2] = r0[0] * r1[1] - r0[1] * r1[0];
    } else {
        return std::nullopt; // polish is only wired for n <= 2
    }
    const double nn = norm2(dir);
    if (nn < 1e-14) return std::nullopt;
    return (1.0 / nn) * dir;
}

} // namespace detail

// Grid-scan / refine / polish chord search. Scans initial covectors p0 over a
// polar grid in the dual ball of radius r_max, detects near-crossings of the
// fiber over y, resolves each candidate to an exact crossing of the numerical
// flow, and then descends along the chord manifold to reduce the crossing
// time. Absence of a chord is a legitimate "not found" outcome.
inline std::optional<ChordRecord> find_chord(const Hamiltonian& ham, const Vec& x, const Vec& y,
                                             double t_max, const SearchConfig& cfg,
                                             SearchStats* stats_out = nullptr) {
    if (!(t_max > 0)) throw argument_error("chord search horizon must be positive");
    if (!(cfg.r_max > 0)) throw argument_error("chord search needs a covector radius");
    const std::size_t n = ham.torus().dim();
    if (n > 2) throw argument_error("chord search is wired for T^1 and T^2");

    detail::ChordProblem prob;
    prob.ham = &ham;
    prob.x = FlatTorus::reduce(x);
    prob.y = FlatTorus::reduce(y);
    const double vmax = std::max(ham.speed_bound(cfg.r_max), 1e-9);
    prob.dt = cfg.dt > 0 ? cfg.dt
                         : std::min(t_max / 256.0, 0.25 * cfg.coarse_tol / vmax);

    SearchStats stats;

    // polar p0 grid: radii ascending so the |p0| tie-break favors early entries
    std::vector<Vec> grid;
    for (int ri = 1; ri <= cfg.radial_samples; ++ri) {
        const double r = cfg.r_max * ri / cfg.radial_samples;
        if (n == 1) {
            grid.push_back(detail::covector_on_sphere(ham.torus(), r, +1.0));
            grid.push_back(detail::covector_on_sphere(ham.torus(), r, -1.0));
        } else {
            for (int ai = 0; ai < cfg.angular_samples; ++ai)
                grid.push_back(detail::covector_on_sphere(
                    ham.torus(), r, 2.0 * std::numbers::pi * ai / cfg.angular_samples));
        }
    }
    stats.p0_points = static_cast<int>(grid.size());

    struct Candidate {
        Vec p0;
        double t;
        Vec target_lift;
    };

    const int steps = static_cast<int>(std::ceil(t_max / prob.dt));
    std::vector<std::vector<Candidate>> found(grid.size());
    std::vector<long long> work(grid.size(), 0);

    parallel_for(grid.size(), [&](std::size_t gi) {
        const Vec& p0 = grid[gi];
        Vec q = prob.x, p = p0;
        double d_prev2 = std::numeric_limits<double>::infinity();
        double d_prev = detail::fiber_distance(prob, q);
        Vec q_prev = q;
        for (int s = 1; s <= steps; ++s) {
            detail::midpoint_step(ham, q, p, prob.dt);
            ++work[gi];
            const double d = detail::fiber_distance(prob, q);
            const bool local_min = d_prev < cfg.coarse_tol && d_prev <= d && d_prev <= d_prev2;
            if (local_min && found[gi].size() <
                                 static_cast<std::size_t>(cfg.max_candidates_per_p0)) {
                Vec offset;
                detail::wrap_difference(q_prev, prob.y, &offset);
                Vec target = prob.y;
                for (std::size_t i = 0; i < n; ++i) target[i] += offset[i];
                found[gi].push_back(Candidate{p0, prob.dt * (s - 1), target});
            }
            d_prev2 = d_prev;
            d_prev = d;
            q_prev = q;
        }
        // trailing minimum at the horizon
        if (d_prev < cfg.coarse_tol && d_prev <= d_prev2 &&
            found[gi].size() < static_cast<std::size_t>(cfg.max_candidates_per_p0)) {
            Vec offset;
            detail::wrap_difference(q_prev, prob.y, &offset);
            Vec target = prob.y;
            for (std::size_t i = 0; i < n; ++i) target[i] += offset[i];
            found[gi].push_back(Candidate{p0, prob.dt * steps, target});
        }
    });
    for (long long w : work) stats.integration_steps += w;

    std::optional<detail::ResolvedChord> best;
    Vec best_target;
    auto better = [&ham](const detail::ResolvedChord& a, const detail::ResolvedChord& b) {
        if (a.time != b.time) return a.time < b.time;
        return ham.conorm(a.p0) < ham.conorm(b.p0);
    };

    for (std::size_t gi = 0; gi < grid.size(); ++gi) {
        for (const Candidate& cand : found[gi]) {
            ++stats.candidates;
            if (best && cand.t > best->time * 1.05) continue; // cannot improve
            auto res = detail::gauss_newton_resolve(prob, cand.p0, std::max(cand.t, prob.dt / 2),
                                                    cand.target_lift, t_max * 1.5,
                                                    &stats.integration_steps);
            if (!res) continue;
            if (ham.conorm(res->p0) > cfg.r_max * (1.0 + 1e-9)) continue;
            if (res->time > t_max) continue;
            ++stats.resolved;
            if (!best || better(*res, *best)) {
                best = *res;
                best_target = cand.target_lift;
            }
        }
    }

    if (best) {
        // descend along the chord manifold to reduce the crossing time
        double step = cfg.r_max / cfg.radial_samples;
        const double step_floor = 1e-7 * cfg.r_max;
        for (int it = 0; it < cfg.polish_iters && step > step_floor; ++it) {
            auto dir = detail::manifold_direction(prob, best->p0, best->time,
                                                  &stats.integration_steps);
            if (!dir) break;
            Vec d = *dir;
            if (std::abs(d[n]) < 1e-10) break; // time stationary along the manifold
            if (d[n] > 0) d = -1.0 * d;
            Vec p_try = best->p0;
            for (std::size_t i = 0; i < n; ++i) p_try[i] += step * d[i];
            const double t_try = best->time + step * d[n];
            const double r_try = ham.conorm(p_try);
            if (r_try > cfg.r_max) {
                step *= 0.5;
                continue;
            }
            auto res = detail::gauss_newton_resolve(prob, p_try, t_try, best_target,
                                                    t_max * 1.5, &stats.integration_steps);
            if (res && res->time < best->time && ham.conorm(res->p0) <= cfg.r_max * (1 + 1e-9)) {
                best = *res;
                ++stats.polish_accepts;
                step *= 1.4;
            } else {
                step *= 0.5;
            }
        }
    }

    std::optional<ChordRecord> out;
    if (best && best->error < cfg.tol_q) {
        ChordRecord rec;
        rec.p0 = best->p0;
        rec.time = best->time;
        rec.endpoint_error = best->error;
        rec.action = 0; // filled by chord_action below
        stats.best_endpoint_error = best->error;
        out = rec;
    } else if (best) {
        stats.best_endpoint_error = best->error;
    }
    if (stats_out) *stats_out = stats;
    return out;
}

// Dense trajectory of an accepted chord, for action quadrature and CSV export.
inline Trajectory chord_trajectory(const Hamiltonian& ham, const Vec& x, const ChordRecord& chord,
                                   int min_steps = 512) {
    int steps = min_steps;
    if (steps % 2) ++steps;
    const double dt = chord.time / steps;
    return integrate(ham, CotangentPoint{FlatTorus::reduce(x), chord.p0}, dt, steps);
}

// Action of a chord between cotangent fibers: integral of p . qdot - H along
// the trajectory by composite Simpson (the fiber primitives vanish).
inline double chord_action(const Hamiltonian& ham, const ChordRecord& chord,
                           const Trajectory& traj) {
    if (traj.samples.size() < 3 || traj.samples.size() % 2 == 0)
        throw argument_error("chord action needs an even number of uniform steps");
    const auto& first = traj.samples.front();
    const auto& last = traj.samples.back();
    if (norm2(first.p - chord.p0) > 1e-9 || std::abs(last.t - chord.time) > 1e-9)
        throw argument_error("trajectory does not belong to this chord");
    std::vector<double> integrand;
    integrand.reserve(traj.samples.size());
    for (const auto& s : traj.samples) {
        const Vec qdot = ham.grad_p(s.q, s.p);
        integrand.push_back(dot(s.p, qdot) - s.energy);
    }
    double acc = 0;
    for (std::size_t i = 0; i + 2 < traj.samples.size(); i += 2)
        acc += (traj.dt / 3.0) * (integrand[i] + 4.0 * integrand[i + 1] + integrand[i + 2]);
    return acc;
}

// --- end-to-end verification ----------------------------------------------------

struct VerifyConfig {
    SearchConfig search;
    double t_margin = 0.25;  // search horizon = budget * (1 + t_margin)
    double tol_t = 1e-2;     // CONFIRMED tolerance on the budget comparison
    int separation_samples = 4096;
};

struct VerificationReport {
    nlohmann::json hamiltonian;
    nlohmann::json quadruple;
    double distance = 0;
    double delta = 0;
    int separation_samples = 0; // 0 when Delta came exactly from the radial profile
    double kappa = 0;
    double budget = 0;
    std::optional<ChordRecord> chord;
    std::string verdict; // CONFIRMED | INCONCLUSIVE | ANOMALY
    SearchStats stats;
};

inline nlohmann::json to_json(const VerificationReport& rep) {
    nlohmann::json j;
    j["hamiltonian"] = rep.hamiltonian;
    j["quadruple"] = rep.quadruple;
    j["distance"] = rep.distance;
    j["delta"] = rep.delta;
    j["separation_samples"] = rep.separation_samples;
    j["kappa"] = rep.kappa;
    j["budget"] = rep.budget;
    j["chord"] = rep.chord ? to_json(*rep.chord) : nlohmann::json(nullptr);
    j["verdict"] = rep.verdict;
    j["search_stats"] = to_json(rep.stats);
    return j;
}

// Measures Delta, derives the chord budget kappa/Delta from the barcode-backed
// bound, and searches for a chord within the budget. A missing chord is
// reported INCONCLUSIVE (a search failure, never a refutation); chords found
// only above the budget are flagged ANOMALY for manual inspection.
inline VerificationReport verify_interlinking(const Hamiltonian& ham, const Vec& x, const Vec& y,
                                              const QuadrupleSpec& quad, VerifyConfig cfg = {}) {
    const bool spheres = quad.variant == QuadrupleSpec::Variant::FiberFiberSpheres;
    const SeparationSet inner =
        spheres ? SeparationSet::sphere(quad.a) : SeparationSet::section();
    const SeparationSet outer =
        spheres ? SeparationSet::sphere(quad.b) : SeparationSet::sphere(quad.a);

    VerificationReport rep;
    rep.hamiltonian = ham.to_json();
    rep.quadruple = bounds::to_json(quad);
    rep.delta = separation(ham, inner, outer, cfg.separation_samples);
    rep.separation_samples = ham.radial_only() ? 0 : cfg.separation_samples;

    const auto cb = bounds::cotangent_bounds(ham.torus(), x, y, quad.a,
                                             spheres ? quad.b : 2.0 * quad.a);
    rep.distance = cb.distance;
    const double pb_lower = spheres ? cb.pb_fibers_spheres : cb.pb_fibers_zero_section;
    rep.kappa = bounds::kappa_from_pb(pb_lower);
    rep.budget = bounds::chord_time_budget(rep.kappa, rep.delta);

    SearchConfig search = cfg.search;
    if (!(search.r_max > 0)) search.r_max = (spheres ? quad.b : quad.a) + 1.0;

    auto chord = find_chord(ham, x, y, rep.budget * (1.0 + cfg.t_margin), search, &rep.stats);
    if (chord) {
        const Trajectory traj = chord_trajectory(ham, x, *chord);
        chord->action = chord_action(ham, *chord, traj);
        rep.chord = chord;
        rep.verdict = chord->time <= rep.budget * (1.0 + cfg.tol_t) ? "CONFIRMED" : "ANOMALY";
    } else {
        rep.verdict = "INCONCLUSIVE";
    }
    return rep;
}

// CSV export: t, q..., p..., H per sample.
inline std::string trajectory_csv(const Trajectory& traj) {
    std::string out = "t";
    const std::size_t n = traj.samples.empty() ? 0 : traj.samples.front().q.size();
    for (std::size_t i = 0; i < n; ++i) out += ",q" + std::to_string(i);
    for (std::size_t i = 0; i < n; ++i) out += ",p" + std::to_string(i);
    out += ",H\n";
    char buf[64];
    for (const auto& s : traj.samples) {
        std::snprintf(buf, sizeof buf, "%.17g", s.t);
        out += buf;
        for (double v : s.q) {
            std::snprintf(buf, sizeof buf, ",%.17g", v);
            out += buf;
        }
        for (double v : s.p) {
            std::snprintf(buf, sizeof buf, ",%.17g", v);
            out += buf;
        }
        std::snprintf(buf, sizeof buf, ",%.17g\n", s.energy);
        out += buf;
    }
    return out;
}

} // namespace interlink::dynamics
