#pragma once

// Command-line frontend. Every command prints one JSON document that embeds
// the effective config (reproducible runs), the derivation anchors it relied
// on ("basis"), and a timestamp (the one field excluded from reproducibility
// comparisons).
//
// Exit codes: 0 success, 2 argument errors, 3 domain errors (non-Morse input,
// non-separating Hamiltonian, malformed data), 4 inconclusive verification.

#include <chrono>
#include <ctime>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "interlink/bounds.hpp"
#include "interlink/dynamics.hpp"
#include "interlink/errors.hpp"
#include "interlink/manifolds.hpp"
#include "interlink/pbopt.hpp"
#include "interlink/persistence.hpp"
#include "interlink/profiles.hpp"
#include "interlink/wfh.hpp"

namespace interlink::cli {

namespace detail {

inline std::string timestamp_utc() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char buf[32];
    std::tm tm_utc{};
    gmtime_r(&now, &tm_utc);
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
    return buf;
}

inline std::vector<double> parse_csv_doubles(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        out.push_back(std::stod(item));
    }
    return out;
}

// "radial:<poly in r>" with terms like "r", "r^2", "0.5*r^3", "2", joined by '+';
// or "spline:rmax=<R>;v0=<v>;w=<w1,w2,...>"
inline profiles::RadialProfile parse_radial(const std::string& spec) {
    const auto colon = spec.find(':');
    if (colon == std::string::npos)
        throw argument_error("Hamiltonian spec needs the form radial:<poly> or spline:<params>");
    const std::string kind = spec.substr(0, colon);
    const std::string body = spec.substr(colon + 1);
    if (kind == "radial") {
        std::vector<double> coeffs;
        std::stringstream ss(body);
        std::string term;
        while (std::getline(ss, term, '+')) {
            term.erase(std::remove(term.begin(), term.end(), ' '), term.end());
            if (term.empty()) continue;
            double coef = 1.0;
            int power = 0;
            const auto rpos = term.find('r');
            if (rpos == std::string::npos) {
                coef = std::stod(term);
            } else {
                std::string pre = term.substr(0, rpos);
                if (!pre.empty() && pre.back() == '*') pre.pop_back();
                if (!pre.empty()) coef = std::stod(pre);
                power = 1;
                const auto hat = term.find('^', rpos);
                if (hat != std::string::npos) power = std::stoi(term.substr(hat + 1));
            }
            if (power < 0) throw argument_error("negative powers are not radial profiles");
            if (coeffs.size() < static_cast<std::size_t>(power) + 1)
                coeffs.resize(static_cast<std::size_t>(power) + 1, 0.0);
            coeffs[static_cast<std::size_t>(power)] += coef;
        }
        if (coeffs.empty()) throw argument_error("empty radial polynomial");
        return profiles::RadialProfile::polynomial(std::move(coeffs));
    }
    if (kind == "spline") {
        double r_max = 0, v0 = 0;
        std::vector<double> weights;
        std::stringstream ss(body);
        std::string field;
        while (std::getline(ss, field, ';')) {
            const auto eq = field.find('=');
            if (eq == std::string::npos) throw argument_error("bad spline field: " + field);
            const std::string key = field.substr(0, eq), val = field.substr(eq + 1);
            if (key == "rmax")
                r_max = std::stod(val);
            else if (key == "v0")
                v0 = std::stod(val);
            else if (key == "w")
                weights = parse_csv_doubles(val);
            else
                throw argument_error("unknown spline field: " + key);
        }
        if (!(r_max > 0) || weights.empty())
            throw argument_error("spline profile needs rmax=<R> and w=<weights>");
        return profiles::RadialProfile::monotone_spline(r_max, v0, weights);
    }
    throw argument_error("unknown Hamiltonian kind: " + kind);
}

struct ManifoldOptions {
    std::string kind = "t1";
    std::string metric_csv;
    double radius = 1.0;
    std::string x_csv, y_csv;
    double theta = -1.0;
};

inline manifolds::FlatTorus make_torus(const ManifoldOptions& opt) {
    const std::size_t n = opt.kind == "t1" ? 1 : 2;
    Mat g = Mat::identity(n);
    if (!opt.metric_csv.empty()) {
        const auto vals = parse_csv_doubles(opt.metric_csv);
        if (vals.size() == 1 && n == 1)
            g(0, 0) = vals[0];
        else if (vals.size() == n * n)
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j) g(i, j) = vals[i * n + j];
        else
            throw argument_error("metric needs 1 (t1) or n*n row-major entries");
    }
    return manifolds::FlatTorus(std::move(g));
}

inline Vec torus_point(const std::string& csv, std::size_t n, const char* name) {
    const auto v = parse_csv_doubles(csv);
    if (v.size() != n)
        throw argument_error(std::string(name) + " needs " + std::to_string(n) + " coordinates");
    return v;
}

struct SearchOptions {
    double r_max = 0;
    int radial = 48;
    int angular = 32;
    double tol_q = 1e-7;
    double coarse_tol = 0.12;
    int polish = 80;
    double dt = 0;
};

inline dynamics::SearchConfig to_search_config(const SearchOptions& o, std::uint64_t seed) {
    dynamics::SearchConfig cfg;
    cfg.r_max = o.r_max;
    cfg.radial_samples = o.radial;
    cfg.angular_samples = o.angular;
    cfg.tol_q = o.tol_q;
    cfg.coarse_tol = o.coarse_tol;
    cfg.polish_iters = o.polish;
    cfg.dt = o.dt;
    cfg.seed = seed;
    return cfg;
}

inline nlohmann::json search_config_json(const dynamics::SearchConfig& cfg) {
    nlohmann::json j;
    j["r_max"] = cfg.r_max;
    j["radial_samples"] = cfg.radial_samples;
    j["angular_samples"] = cfg.angular_samples;
    j["tol_q"] = cfg.tol_q;
    j["coarse_tol"] = cfg.coarse_tol;
    j["polish_iters"] = cfg.polish_iters;
    j["dt"] = cfg.dt;
    return j;
}

inline void emit(const nlohmann::json& doc, const std::string& out_path, std::ostream& out) {
    if (out_path.empty()) {
        out << doc.dump(2) << "\n";
    } else {
        std::ofstream f(out_path);
        if (!f) throw argument_error("cannot open output file: " + out_path);
        f << doc.dump(2) << "\n";
    }
}

// seeded smooth phase-space fields for the identity checks
inline pbopt::PhaseFunction random_identity_field(std::uint64_t& state, std::size_t n) {
    auto next = [&state] {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return static_cast<double>((z ^ (z >> 31)) >> 11) * 0x1.0p-53;
    };
    const double a = 2.0 * next() - 1.0;
    const double b = 2.0 * next() - 1.0;
    const double c = next() - 0.5;
    std::vector<int> m(n);
    for (auto& v : m) v = 1 + static_cast<int>(next() * 2);
    auto phase = [m](const Vec& q) {
        double s = 0;
        for (std::size_t i = 0; i < q.size(); ++i) s += m[i] * q[i];
        return 2.0 * std::numbers::pi * s;
    };
    return pbopt::PhaseFunction{
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

} // namespace detail

inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"interlink: geodesic barcodes, Poisson-bracket bounds, and "
                 "Hamiltonian-chord verification on cotangent bundles"};
    app.require_subcommand(1);

    detail::ManifoldOptions man;
    detail::SearchOptions search;
    std::string ham_spec = "radial:r^2";
    double eps = 0.0;
    int pert_mode = 1;
    std::string bump_csv = "0.5,1.5,0.25";
    double a_radius = 1.0, b_radius = 2.0;
    std::string variant = "spheres";
    double cutoff = 0.0;
    double t_max = 0.0;
    std::uint64_t seed = 0;
    std::string out_path;
    std::string traj_out;
    int draws = 100;
    int ident_n = 1;
    pbopt::PbEstimateConfig pb_cfg;

    auto add_manifold = [&](CLI::App* cmd, bool sphere_allowed) {
        cmd->add_option("--manifold", man.kind, "t1, t2" + std::string(sphere_allowed ? ", or s2" : ""))
            ->default_val("t1");
        cmd->add_option("--metric", man.metric_csv, "torus metric entries, row-major CSV");
        cmd->add_option("--x", man.x_csv, "torus point, CSV coordinates");
        cmd->add_option("--y", man.y_csv, "torus point, CSV coordinates");
        if (sphere_allowed) {
            cmd->add_option("--radius", man.radius, "sphere radius")->default_val(1.0);
            cmd->add_option("--theta", man.theta, "sphere angle between the two points");
        }
    };
    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--out", out_path, "write the JSON result here instead of stdout");
        cmd->add_option("--seed", seed, "root seed, echoed into the config")->default_val(0);
    };
    auto add_ham = [&](CLI::App* cmd) {
        cmd->add_option("--ham", ham_spec, "radial:<poly in r> or spline:rmax=..;v0=..;w=..")
            ->default_val("radial:r^2");
        cmd->add_option("--eps", eps, "perturbation size (0 = radial)")->default_val(0.0);
        cmd->add_option("--pert-mode", pert_mode, "angular mode of the perturbation")
            ->default_val(1);
        cmd->add_option("--bump", bump_csv, "radial bump lo,hi,transition")
            ->default_val("0.5,1.5,0.25");
    };
    auto add_search = [&](CLI::App* cmd) {
        cmd->add_option("--rmax", search.r_max, "covector search radius (0 = default)");
        cmd->add_option("--grid-radial", search.radial)->default_val(48);
        cmd->add_option("--grid-angular", search.angular)->default_val(32);
        cmd->add_option("--tol-q", search.tol_q)->default_val(1e-7);
        cmd->add_option("--coarse-tol", search.coarse_tol)->default_val(0.12);
        cmd->add_option("--polish-iters", search.polish)->default_val(80);
        cmd->add_option("--dt", search.dt, "integrator step (0 = automatic)")->default_val(0.0);
        cmd->add_option("--traj-out", traj_out, "write the chord trajectory CSV here");
    };

    CLI::App* c_distance = app.add_subcommand("distance", "Riemannian distance between two points");
    add_manifold(c_distance, true);
    add_common(c_distance);

    CLI::App* c_spectrum = app.add_subcommand("spectrum", "geodesic spectrum below a cutoff");
    add_manifold(c_spectrum, true);
    c_spectrum->add_option("--cutoff", cutoff, "length cutoff")->required();
    add_common(c_spectrum);

    CLI::App* c_barcode = app.add_subcommand("barcode", "wrapped-Floer barcode of a fiber pair");
    add_manifold(c_barcode, true);
    c_barcode->add_option("--cutoff", cutoff, "length cutoff")->required();
    add_common(c_barcode);

    CLI::App* c_bounds = app.add_subcommand("bounds", "pb+ lower bounds and kappa");
    add_manifold(c_bounds, true);
    c_bounds->add_option("--a", a_radius, "inner radius")->default_val(1.0);
    c_bounds->add_option("--b", b_radius, "outer radius")->default_val(2.0);
    c_bounds->add_option("--variant", variant, "spheres or zero-section")->default_val("spheres");
    add_common(c_bounds);

    CLI::App* c_chords = app.add_subcommand("chords", "search Hamiltonian chords between fibers");
    add_manifold(c_chords, false);
    add_ham(c_chords);
    c_chords->add_option("--tmax", t_max, "search horizon")->required();
    add_search(c_chords);
    add_common(c_chords);

    int sep_samples = 4096;
    CLI::App* c_verify = app.add_subcommand("verify", "end-to-end interlinking verification");
    add_manifold(c_verify, false);
    add_ham(c_verify);
    c_verify->add_option("--a", a_radius, "inner radius")->default_val(1.0);
    c_verify->add_option("--b", b_radius, "outer radius")->default_val(2.0);
    c_verify->add_option("--variant", variant, "spheres or zero-section")->default_val("spheres");
    c_verify->add_option("--sep-samples", sep_samples, "sample count for Delta estimation")
        ->default_val(4096);
    add_search(c_verify);
    add_common(c_verify);

    CLI::App* c_pb = app.add_subcommand("pb-estimate", "minimax upper estimate of pb+ on T^1");
    add_manifold(c_pb, false);
    c_pb->add_option("--a", a_radius)->default_val(1.0);
    c_pb->add_option("--b", b_radius)->default_val(2.0);
    c_pb->add_option("--variant", variant)->default_val("spheres");
    c_pb->add_option("--weights", pb_cfg.weights_per_ramp)->default_val(32);
    c_pb->add_option("--restarts", pb_cfg.restarts)->default_val(2);
    c_pb->add_option("--nm-iters", pb_cfg.nm_iters)->default_val(500);
    c_pb->add_option("--coord-rounds", pb_cfg.coord_rounds)->default_val(6);
    c_pb->add_option("--margin-frac", pb_cfg.margin_frac)->default_val(0.003);
    c_pb->add_option("--grid-q", pb_cfg.grid_q)->default_val(512);
    c_pb->add_option("--grid-r", pb_cfg.grid_r)->default_val(256);
    c_pb->add_flag("--nonseparable", pb_cfg.nonseparable,
                   "search the coupled (joint) ansatz as well");
    add_common(c_pb);

    CLI::App* c_ident = app.add_subcommand("identity-check",
                                           "Poisson bracket and deformation identity residuals");
    c_ident->add_option("--n", ident_n, "fiber dimension (1 or 2)")->default_val(1);
    c_ident->add_option("--draws", draws, "random draws")->default_val(100);
    add_common(c_ident);

    {
        std::vector<std::string> rev(args.rbegin(), args.rend());
        try {
            app.parse(rev);
        } catch (const CLI::CallForHelp& e) {
            return app.exit(e, out, err);
        } catch (const CLI::ParseError& e) {
            app.exit(e, out, err);
            return 2;
        }
    }

    nlohmann::json doc;
    doc["timestamp"] = detail::timestamp_utc();
    nlohmann::json& config = doc["config"];
    config["seed"] = seed;

    try {
        const bool is_sphere = man.kind == "s2";
        auto need_torus_points = [&](std::size_t n) {
            return std::make_pair(detail::torus_point(man.x_csv, n, "--x"),
                                  detail::torus_point(man.y_csv, n, "--y"));
        };
        auto sphere_pair = [&] {
            if (man.theta < 0) throw argument_error("s2 needs --theta");
            return manifolds::RoundSphere::points_at_angle(man.theta);
        };
        auto make_quad = [&] {
            if (variant == "spheres") return bounds::QuadrupleSpec::spheres(a_radius, b_radius);
            if (variant == "zero-section") return bounds::QuadrupleSpec::zero_section(a_radius);
            throw argument_error("variant must be spheres or zero-section");
        };
        auto make_ham = [&](const manifolds::FlatTorus& torus) {
            auto profile = detail::parse_radial(ham_spec);
            config["ham"] = ham_spec;
            config["eps"] = eps;
            if (eps == 0.0) return dynamics::Hamiltonian(torus, std::move(profile));
            const auto bump_v = detail::parse_csv_doubles(bump_csv);
            if (bump_v.size() != 3) throw argument_error("--bump needs lo,hi,transition");
            dynamics::Perturbation pert;
            pert.eps = eps;
            pert.angular = profiles::TrigPolynomial({{{pert_mode}, 0.0, 1.0}});
            pert.radial_bump = profiles::C2Bump(bump_v[0], bump_v[1], bump_v[2]);
            config["pert_mode"] = pert_mode;
            config["bump"] = bump_v;
            return dynamics::Hamiltonian(torus, std::move(profile), std::move(pert));
        };

        if (app.got_subcommand(c_distance)) {
            doc["command"] = "distance";
            doc["basis"] = nlohmann::json::array();
            if (is_sphere) {
                const auto [x, y] = sphere_pair();
                manifolds::RoundSphere s2(man.radius);
                config["manifold"] = s2.to_json();
                config["theta"] = man.theta;
                doc["d"] = s2.distance(x, y);
            } else {
                const auto torus = detail::make_torus(man);
                const auto [x, y] = need_torus_points(torus.dim());
                config["manifold"] = torus.to_json();
                config["x"] = x;
                config["y"] = y;
                doc["d"] = torus.distance(x, y);
            }
        } else if (app.got_subcommand(c_spectrum)) {
            doc["command"] = "spectrum";
            doc["basis"] = nlohmann::json::array();
            config["cutoff"] = cutoff;
            if (is_sphere) {
                const auto [x, y] = sphere_pair();
                manifolds::RoundSphere s2(man.radius);
                config["manifold"] = s2.to_json();
                config["theta"] = man.theta;
                doc["spectrum"] = manifolds::to_json(s2.spectrum(x, y, cutoff), true);
            } else {
                const auto torus = detail::make_torus(man);
                const auto [x, y] = need_torus_points(torus.dim());
                config["manifold"] = torus.to_json();
                config["x"] = x;
                config["y"] = y;
                doc["spectrum"] = manifolds::to_json(torus.spectrum(x, y, cutoff), false);
            }
        } else if (app.got_subcommand(c_barcode)) {
            doc["command"] = "barcode";
            doc["basis"] = {"Theorem6.2", "StructureTheorem"};
            config["cutoff"] = cutoff;
            nlohmann::json rep;
            if (is_sphere) {
                const auto [x, y] = sphere_pair();
                manifolds::RoundSphere s2(man.radius);
                config["manifold"] = s2.to_json();
                config["theta"] = man.theta;
                rep = wfh::to_json(wfh::barcode_report(s2, x, y, cutoff));
            } else {
                const auto torus = detail::make_torus(man);
                const auto [x, y] = need_torus_points(torus.dim());
                config["manifold"] = torus.to_json();
                rep = wfh::to_json(wfh::barcode_report(torus, x, y, cutoff));
            }
            doc.update(rep);
        } else if (app.got_subcommand(c_bounds)) {
            doc["command"] = "bounds";
            doc["basis"] = {"TheoremB", "Theorem1.11", "Theorem6.1", "Theorem6.2"};
            const auto quad = make_quad();
            config["quadruple"] = bounds::to_json(quad);
            nlohmann::json rep;
            if (is_sphere) {
                const auto [x, y] = sphere_pair();
                manifolds::RoundSphere s2(man.radius);
                config["manifold"] = s2.to_json();
                config["theta"] = man.theta;
                rep = bounds::to_json(bounds::bound_report(s2, x, y, quad));
            } else {
                const auto torus = detail::make_torus(man);
                const auto [x, y] = need_torus_points(torus.dim());
                config["manifold"] = torus.to_json();
                config["x"] = x;
                config["y"] = y;
                rep = bounds::to_json(bounds::bound_report(torus, x, y, quad));
            }
            doc.update(rep);
            if (persistence::bar_from_json(doc["bar"]).left <= 0)
                doc["warnings"] = {"bar with nonpositive left endpoint: pb+ must be finite"};
        } else if (app.got_subcommand(c_chords)) {
            doc["command"] = "chords";
            doc["basis"] = {"Theorem1.11"};
            const auto torus = detail::make_torus(man);
            const auto [x, y] = need_torus_points(torus.dim());
            config["manifold"] = torus.to_json();
            config["x"] = x;
            config["y"] = y;
            config["t_max"] = t_max;
            const auto ham = make_ham(torus);
            auto cfg = detail::to_search_config(search, seed);
            if (!(cfg.r_max > 0)) cfg.r_max = 2.0;
            config["search"] = detail::search_config_json(cfg);
            dynamics::SearchStats stats;
            auto chord = dynamics::find_chord(ham, x, y, t_max, cfg, &stats);
            if (chord) {
                const auto traj = dynamics::chord_trajectory(ham, x, *chord);
                chord->action = dynamics::chord_action(ham, *chord, traj);
                if (!traj_out.empty()) {
                    std::ofstream f(traj_out);
                    f << dynamics::trajectory_csv(traj);
                }
            }
            doc["chord"] = chord ? dynamics::to_json(*chord) : nlohmann::json(nullptr);
            doc["search_stats"] = dynamics::to_json(stats);
        } else if (app.got_subcommand(c_verify)) {
            doc["command"] = "verify";
            doc["basis"] = {"TheoremA", "Theorem1.11", "TheoremB", "Theorem6.1", "Theorem6.2"};
            const auto torus = detail::make_torus(man);
            const auto [x, y] = need_torus_points(torus.dim());
            config["manifold"] = torus.to_json();
            config["x"] = x;
            config["y"] = y;
            const auto quad = make_quad();
            config["quadruple"] = bounds::to_json(quad);
            const auto ham = make_ham(torus);
            dynamics::VerifyConfig vcfg;
            vcfg.search = detail::to_search_config(search, seed);
            vcfg.separation_samples = sep_samples;
            config["search"] = detail::search_config_json(vcfg.search);
            config["separation_samples"] = sep_samples;
            const auto rep = dynamics::verify_interlinking(ham, x, y, quad, vcfg);
            if (rep.chord && !traj_out.empty()) {
                const auto traj = dynamics::chord_trajectory(ham, x, *rep.chord);
                std::ofstream f(traj_out);
                f << dynamics::trajectory_csv(traj);
            }
            doc.update(dynamics::to_json(rep));
            detail::emit(doc, out_path, out);
            return rep.verdict == "INCONCLUSIVE" ? 4 : 0;
        } else if (app.got_subcommand(c_pb)) {
            doc["command"] = "pb-estimate";
            doc["basis"] = {"Definition1.2", "TheoremB", "Theorem6.1"};
            const auto torus = detail::make_torus(man);
            const auto [x, y] = need_torus_points(1);
            config["manifold"] = torus.to_json();
            config["x"] = x;
            config["y"] = y;
            const auto quad = make_quad();
            pb_cfg.seed = seed;
            config["weights_per_ramp"] = pb_cfg.weights_per_ramp;
            config["restarts"] = pb_cfg.restarts;
            config["nm_iters"] = pb_cfg.nm_iters;
            config["coord_rounds"] = pb_cfg.coord_rounds;
            config["margin_frac"] = pb_cfg.margin_frac;
            const auto est = pbopt::estimate_pb_upper(torus, x[0], y[0], quad, pb_cfg);
            doc.update(pbopt::to_json(est, quad));
        } else if (app.got_subcommand(c_ident)) {
            doc["command"] = "identity-check";
            doc["basis"] = {"Lemma5.1"};
            if (ident_n < 1 || ident_n > 2) throw argument_error("--n must be 1 or 2");
            config["n"] = ident_n;
            config["draws"] = draws;
            std::uint64_t state = seed * 0x9e3779b97f4a7c15ull + 17;
            auto next_unit = [&state] {
                std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
                z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
                z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
                return static_cast<double>((z ^ (z >> 31)) >> 11) * 0x1.0p-53;
            };
            double max_pf = 0, max_wedge = 0, max_fd = 0;
            const std::size_t n = static_cast<std::size_t>(ident_n);
            for (int d = 0; d < draws; ++d) {
                auto f = detail::random_identity_field(state, n);
                auto g = detail::random_identity_field(state, n);
                Vec q(n), p(n);
                for (auto& v : q) v = next_unit();
                for (auto& v : p) v = 4.0 * next_unit() - 2.0;
                const double tau = next_unit();
                max_pf = std::max(max_pf, pbopt::degeneracy_residual(f, g, tau, q, p));
                max_wedge = std::max(max_wedge, pbopt::wedge_identity_residual(f, g, q, p));
                const double pb = pbopt::poisson_bracket(f, g, q, p);
                max_fd = std::max(max_fd, std::abs(pb - pbopt::poisson_bracket_fd(f, g, q, p)) /
                                              std::max(1.0, std::abs(pb)));
            }
            doc["max_pfaffian_residual"] = max_pf;
            doc["max_wedge_residual"] = max_wedge;
            doc["max_bracket_fd_relative_error"] = max_fd;
            const bool pass = max_pf < 1e-10 && max_wedge < 1e-10 && max_fd < 1e-6;
            doc["pass"] = pass;
            detail::emit(doc, out_path, out);
            return pass ? 0 : 3;
        }
        detail::emit(doc, out_path, out);
        return 0;
    } catch (const argument_error& e) {
        err << "argument error: " << e.what() << "\n";
        return 2;
    } catch (const domain_error& e) {
        err << "domain error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 3;
    }
}

} // namespace interlink::cli
