#pragma once

// Command-line front end. run() is separate from main() so tests can drive it
// with captured streams. Exit codes: 0 success, 1 failed check or numerical
// failure, 2 usage or domain error.

#include <CLI11.hpp>

#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "chmlab/electrostatics.hpp"
#include "chmlab/json_io.hpp"
#include "chmlab/model_params.hpp"
#include "chmlab/radial_profile.hpp"
#include "chmlab/stability_spectrum.hpp"
#include "chmlab/surface_geometry.hpp"
#include "chmlab/sweep.hpp"
#include "chmlab/variation_lab.hpp"
#include "chmlab/verification.hpp"

namespace chmlab::cli {

struct RunConfig {
    std::optional<double> m, q, lambda, neck_a, s0, s_max, tol, dt, t_max, amp, h, nariai_alpha, tol_scale;
    std::optional<int> grid, k, steps, samples, jobs;
    std::optional<std::uint64_t> seed;
    std::string out, format, config, surface, phi, check, x_axis, y_axis, suite;
    bool timing = false;
};

namespace detail {

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

// Flat "key = value" lines; keys are long flag names. Values only fill options not given on the command line.
inline void apply_config(CLI::App& sub, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open config file: " + path);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find_first_of("#;");
        if (hash != std::string::npos) line.resize(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw UsageError("config line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key == "config") throw UsageError("config: nested config files are not supported");
        CLI::Option* opt = sub.get_option_no_throw("--" + key);
        if (opt == nullptr) throw UsageError("config: key '" + key + "' is not a flag of '" + sub.get_name() + "'");
        if (opt->count() == 0) {
            opt->add_result(value);
            opt->run_callback();
        }
    }
}

inline double need(const std::optional<double>& v, const char* flag) {
    if (!v) throw UsageError(std::string("missing required flag --") + flag);
    return *v;
}

inline void emit(const RunConfig& cfg, std::ostream& out, const std::string& text) {
    if (cfg.out.empty()) {
        out << text;
        return;
    }
    std::ofstream f(cfg.out, std::ios::binary);
    if (!f) throw UsageError("cannot open output file: " + cfg.out);
    f << text;
}

inline std::string format_or(const RunConfig& cfg, const std::string& def, std::initializer_list<const char*> allowed) {
    const std::string f = cfg.format.empty() ? def : cfg.format;
    for (const char* a : allowed) {
        if (f == a) return f;
    }
    throw UsageError("unsupported --format '" + f + "' for this subcommand");
}

// "Y:l,m" gives the harmonic with unit L2 norm on the neck sphere of radius a; anything else is a field file.
inline ScalarField parse_phi(const std::string& spec, double a, int n_theta) {
    if (spec.rfind("Y:", 0) == 0) {
        int l = 0, m = 0;
        char comma = 0;
        std::istringstream ss(spec.substr(2));
        if (!(ss >> l >> comma >> m) || comma != ',' || !ss.eof()) throw UsageError("--phi expects Y:l,m");
        return (1.0 / a) * harmonic_field(build_grid(n_theta, 2 * n_theta), l, m);
    }
    return field_from_json(read_json_file(spec));
}

}  // namespace detail

inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    RunConfig cfg;
    CLI::App app{"chmlab: charged Hawking mass laboratory for RNdS and charged Nariai models"};
    app.require_subcommand(1);
    app.set_help_flag("--help", "Print this help message and exit");  // -h would clash with --h
    app.set_help_all_flag("--help-all", "Show help for all subcommands");

    std::map<std::string, std::function<int(CLI::App&)>> actions;

    auto common = [&](CLI::App* s) {
        s->add_option("--out", cfg.out, "Write output to this file instead of stdout");
        s->add_option("--format", cfg.format, "Output format");
        s->add_option("--config", cfg.config, "Flat key = value file; keys are long flag names, flags win");
    };
    auto model_flags = [&](CLI::App* s) {
        s->add_option("--m", cfg.m, "Mass parameter m");
        s->add_option("--q", cfg.q, "Charge Q");
        s->add_option("--lambda", cfg.lambda, "Cosmological constant (> 0)");
    };
    auto neck_flags = [&](CLI::App* s) {
        s->add_option("--neck-a", cfg.neck_a, "Neck area radius a");
        s->add_option("--q", cfg.q, "Charge Q");
        s->add_option("--lambda", cfg.lambda, "Cosmological constant (> 0)");
    };
    auto grid_flag = [&](CLI::App* s) {
        s->add_option("--grid", cfg.grid, "Gauss-Legendre latitudes n_theta (n_phi = 2 n_theta)")
            ->check(CLI::Range(8, 512));
    };
    auto lambda = [&] { return cfg.lambda.value_or(1.0); };
    auto charge = [&] { return cfg.q.value_or(0.0); };

    // ---- horizons ----
    auto* horizons = app.add_subcommand("horizons", "Horizon roots, classification and admissible mass window");
    model_flags(horizons);
    horizons->add_option("--neck-a", cfg.neck_a, "Derive m from a neck radius instead of --m");
    common(horizons);
    actions["horizons"] = [&](CLI::App&) {
        detail::format_or(cfg, "json", {"json"});
        const double q = charge(), lam = lambda();
        const ModelParams p = cfg.neck_a ? params_from_neck(*cfg.neck_a, q, lam) : ModelParams{detail::need(cfg.m, "m"), q, lam};
        json j{{"m", p.m}, {"q", p.q}, {"lambda", p.lambda}};
        const json roots = to_json(horizon_roots(p));
        for (const auto& [k, v] : roots.items()) j[k] = v;
        if (q > 0.0 && q * q < 1.0 / (4.0 * lam)) {
            const auto w = admissible_window(q, lam);
            j["admissible_window"] = {{"m_min", w.m_min}, {"m_max", w.m_max}};
            j["in_window"] = w.contains(p.m);
        } else {
            j["admissible_window"] = nullptr;
            j["in_window"] = false;
        }
        detail::emit(cfg, out, dump_json(j));
        return 0;
    };

    // ---- profile ----
    auto* profile = app.add_subcommand("profile", "Integrate the area-radius profile and tabulate slice data");
    neck_flags(profile);
    profile->add_option("--s-max", cfg.s_max, "Half-width of the arclength interval (default 2)");
    profile->add_option("--tol", cfg.tol, "Integrator tolerance (default 1e-10)")->check(CLI::PositiveNumber);
    profile->add_option("--steps", cfg.steps, "Number of output intervals (default 200)")->check(CLI::Range(1, 1000000));
    common(profile);
    actions["profile"] = [&](CLI::App&) {
        const std::string fmt = detail::format_or(cfg, "csv", {"csv", "json"});
        const double q = charge(), lam = lambda(), s_max = cfg.s_max.value_or(2.0);
        const auto prof = integrate_profile(detail::need(cfg.neck_a, "neck-a"), q, lam, s_max, cfg.tol.value_or(1e-10));
        const int n = cfg.steps.value_or(200);
        std::string csv = "s,u,du,ddu,R,ric_nn,H,mch\n";
        json rows = json::array();
        for (int i = 0; i <= n; ++i) {
            const double s = -s_max + 2.0 * s_max * i / n;
            const auto p = prof.evaluate(s);
            const auto c = curvature_scalars(p);
            const double mch = slice_hawking_mass(p, q, 2.0 * lam);
            csv += csv_row({s, p.u, p.du, p.ddu, c.scalar, c.ric_nn, c.h_slice, mch});
            rows.push_back({{"s", s}, {"u", p.u}, {"du", p.du}, {"ddu", p.ddu}, {"R", c.scalar}, {"ric_nn", c.ric_nn},
                            {"H", c.h_slice}, {"mch", mch}});
        }
        if (fmt == "csv") {
            detail::emit(cfg, out, csv);
        } else {
            detail::emit(cfg, out,
                         dump_json({{"a", prof.a()}, {"q", q}, {"lambda", lam}, {"m", prof.m()}, {"samples", rows}}));
        }
        return 0;
    };

    // ---- mass ----
    auto* mass = app.add_subcommand("mass", "Charged Hawking mass, charge and area of a graph surface");
    neck_flags(mass);
    mass->add_option("--surface", cfg.surface, "Surface JSON {\"base\":{...},\"phi\":{...}}");
    mass->add_option("--s0", cfg.s0, "Slice height when no surface file is given (default 0)");
    grid_flag(mass);
    common(mass);
    actions["mass"] = [&](CLI::App&) {
        detail::format_or(cfg, "json", {"json"});
        SurfaceSpec spec;
        if (!cfg.surface.empty()) {
            spec = surface_from_json(read_json_file(cfg.surface));
        } else {
            const int nt = cfg.grid.value_or(32);
            spec = {detail::need(cfg.neck_a, "neck-a"), charge(), lambda(), cfg.s0.value_or(0.0),
                    ScalarField(build_grid(nt, 2 * nt))};
        }
        const auto geom = induced_geometry(build_surface(spec));
        const json j{{"mch", charged_hawking_mass(geom)},
                     {"charge", geom.charge},
                     {"area", geom.area},
                     {"h2_integral", geom.h2_integral},
                     {"closed_form", geom.closed_form},
                     {"n_theta", geom.grid->n_theta()},
                     {"n_phi", geom.grid->n_phi()}};
        detail::emit(cfg, out, dump_json(j));
        return 0;
    };

    // ---- spectrum ----
    auto* spectrum = app.add_subcommand("spectrum", "Jacobi and Laplace spectra of the neck slice");
    neck_flags(spectrum);
    grid_flag(spectrum);
    spectrum->add_option("--k", cfg.k, "Number of Laplace eigenvalues (default 10)")->check(CLI::Range(1, 81));
    common(spectrum);
    actions["spectrum"] = [&](CLI::App&) {
        detail::format_or(cfg, "json", {"json"});
        const auto r = spectral_report(detail::need(cfg.neck_a, "neck-a"), charge(), lambda(), cfg.grid.value_or(32),
                                       cfg.k.value_or(10));
        detail::emit(cfg, out, dump_json(to_json(r)));
        return 0;
    };

    // ---- variation ----
    auto* variation = app.add_subcommand("variation", "First and second variation against finite differences");
    neck_flags(variation);
    variation->add_option("--s0", cfg.s0, "Slice height of the base surface (default 0)");
    variation->add_option("--phi", cfg.phi, "Direction: Y:l,m or a field JSON file");
    variation->add_option("--dt", cfg.dt, "Finite-difference step (default 1e-2)")->check(CLI::PositiveNumber);
    grid_flag(variation);
    common(variation);
    actions["variation"] = [&](CLI::App&) {
        detail::format_or(cfg, "json", {"json"});
        if (cfg.phi.empty()) throw UsageError("missing required flag --phi");
        const double a = detail::need(cfg.neck_a, "neck-a");
        const auto phi = detail::parse_phi(cfg.phi, a, cfg.grid.value_or(32));
        const auto r = variation_report(a, charge(), cfg.s0.value_or(0.0), phi, cfg.dt.value_or(1e-2), lambda());
        detail::emit(cfg, out, dump_json(to_json(r)));
        return 0;
    };

    // ---- foliate ----
    auto* foliate = app.add_subcommand("foliate", "Slice foliation around the neck");
    neck_flags(foliate);
    foliate->add_option("--t-max", cfg.t_max, "Foliation half-range (default 0.5)")->check(CLI::NonNegativeNumber);
    foliate->add_option("--steps", cfg.steps, "Number of t intervals (default 40)")->check(CLI::Range(1, 1000000));
    common(foliate);
    actions["foliate"] = [&](CLI::App&) {
        const std::string fmt = detail::format_or(cfg, "csv", {"csv", "json"});
        const double t_max = cfg.t_max.value_or(0.5);
        const auto prof = integrate_profile(detail::need(cfg.neck_a, "neck-a"), charge(), lambda(), t_max + 0.1, 1e-12);
        const auto fol = cmc_foliation(prof, t_max, cfg.steps.value_or(40));
        if (fmt == "csv") {
            std::string csv = "t,u,H,dH,lambda1,dmch\n";
            for (const auto& s : fol) csv += csv_row({s.t, s.u, s.mean_curvature, s.dh_dt, s.lambda1, s.dmch_dt});
            detail::emit(cfg, out, csv);
        } else {
            json rows = json::array();
            const auto mono = monotonicity_report(fol, prof);
            for (std::size_t i = 0; i < fol.size(); ++i) {
                const auto& s = fol[i];
                const auto& m = mono[i];
                rows.push_back({{"t", s.t},
                                {"u", s.u},
                                {"H", s.mean_curvature},
                                {"dH", s.dh_dt},
                                {"lambda1", s.lambda1},
                                {"rho", s.rho},
                                {"mch", s.mch},
                                {"dmch", s.dmch_dt},
                                {"dmch_fd", s.dmch_dt_fd},
                                {"lemma43_residual", s.lemma43_residual},
                                {"scalar_term_printed", m.scalar_term_printed},
                                {"scalar_term_consistent", m.scalar_term_consistent},
                                {"umbilic_term", m.umbilic_term},
                                {"charge_term", m.charge_term},
                                {"lapse_term", m.lapse_term},
                                {"decomposition_printed", m.decomposition_printed},
                                {"decomposition_consistent", m.decomposition_consistent},
                                {"printed_mismatch", m.printed_mismatch}});
            }
            detail::emit(cfg, out, dump_json({{"a", prof.a()}, {"q", prof.q()}, {"lambda", prof.lambda()}, {"leaves", rows}}));
        }
        return 0;
    };

    // ---- localmax ----
    auto* localmax = app.add_subcommand("localmax", "Seeded perturbations of the neck versus the model mass");
    neck_flags(localmax);
    localmax->add_option("--samples", cfg.samples, "Number of random graphs (default 200)")->check(CLI::Range(1, 100000000));
    localmax->add_option("--amp", cfg.amp, "c2 amplitude, at most 0.05 (default 0.02)")->check(CLI::NonNegativeNumber);
    localmax->add_option("--seed", cfg.seed, "Experiment seed (default 0)");
    grid_flag(localmax);
    common(localmax);
    actions["localmax"] = [&](CLI::App&) {
        detail::format_or(cfg, "json", {"json"});
        const auto r = local_max_experiment(detail::need(cfg.neck_a, "neck-a"), charge(), cfg.samples.value_or(200),
                                            cfg.amp.value_or(0.02), cfg.seed.value_or(0), lambda(), cfg.grid.value_or(32));
        detail::emit(cfg, out, dump_json(to_json(r)));
        return r.max_excess <= 1e-9 && r.rigidity_consistent ? 0 : 1;
    };

    // ---- electrostatics ----
    auto* elec = app.add_subcommand("electrostatics", "Static Einstein-Maxwell residuals and area-charge data");
    model_flags(elec);
    elec->add_option("--nariai-alpha", cfg.nariai_alpha, "Use the charged Nariai model of this radius");
    elec->add_option("--samples", cfg.samples, "Interior samples (default 32)")->check(CLI::Range(1, 100000));
    elec->add_option("--h", cfg.h, "Robinson-Shen difference step (default 1e-4)")->check(CLI::PositiveNumber);
    common(elec);
    actions["electrostatics"] = [&](CLI::App&) {
        detail::format_or(cfg, "json", {"json"});
        const int n = cfg.samples.value_or(32);
        const double h = cfg.h.value_or(1e-4);
        const auto rep = cfg.nariai_alpha
                             ? verify_einstein_maxwell_static(nariai_from_alpha(*cfg.nariai_alpha, lambda()), n, h)
                             : verify_einstein_maxwell_static(ModelParams{detail::need(cfg.m, "m"), charge(), lambda()}, n, h);
        detail::emit(cfg, out, dump_json(to_json(rep)));
        return 0;
    };

    // ---- nariai ----
    auto* nariai = app.add_subcommand("nariai", "Charged Nariai data and the area-charge equality");
    nariai->add_option("--nariai-alpha", cfg.nariai_alpha, "Double-root radius alpha");
    nariai->add_option("--lambda", cfg.lambda, "Cosmological constant (> 0)");
    common(nariai);
    actions["nariai"] = [&](CLI::App&) {
        detail::format_or(cfg, "json", {"json"});
        const auto np = nariai_from_alpha(detail::need(cfg.nariai_alpha, "nariai-alpha"), lambda());
        json j = to_json(np);
        j["classification"] = to_string(horizon_roots(np.model()).classification);
        j["flow"] = to_json(nariai_flow_diagnostic(np));
        detail::emit(cfg, out, dump_json(j));
        return 0;
    };

    // ---- sweep ----
    auto* sweep = app.add_subcommand("sweep", "Evaluate a check over a two-axis parameter grid (CSV)");
    sweep->add_option("--check", cfg.check, "prop41 (a^2, Q^2) | window (a^2, Q^2) | corA2 (Q, t in mass window)");
    sweep->add_option("--x", cfg.x_axis, "First axis lo:hi:n");
    sweep->add_option("--y", cfg.y_axis, "Second axis lo:hi:n");
    sweep->add_option("--jobs", cfg.jobs, "Worker threads (default 1)")->check(CLI::Range(1, 1024));
    sweep->add_option("--lambda", cfg.lambda, "Cosmological constant (> 0)");
    common(sweep);
    actions["sweep"] = [&](CLI::App&) {
        detail::format_or(cfg, "csv", {"csv"});
        if (cfg.check.empty()) throw UsageError("missing required flag --check");
        const auto c = parse_sweep_check(cfg.check);
        auto [x, y] = default_axes(c);
        if (!cfg.x_axis.empty()) x = parse_axis(cfg.x_axis);
        if (!cfg.y_axis.empty()) y = parse_axis(cfg.y_axis);
        const auto r = run_sweep(c, x, y, cfg.jobs.value_or(1), lambda());
        detail::emit(cfg, out, r.csv());
        err << "sweep " << cfg.check << ": " << r.rows.size() << " rows, " << r.failures << " failing\n";
        return r.failures == 0 ? 0 : 1;
    };

    // ---- verify ----
    auto* verify = app.add_subcommand("verify", "Run the acceptance criteria");
    verify->add_option("--suite", cfg.suite, "all, or a comma list of criterion ids or names (default all)");
    verify->add_option("--tol-scale", cfg.tol_scale, "Multiply every numeric bound (default 1)")->check(CLI::PositiveNumber);
    verify->add_flag("--timing", cfg.timing, "Include wall time per criterion in JSON output");
    common(verify);
    actions["verify"] = [&](CLI::App&) {
        const std::string fmt = detail::format_or(cfg, "json", {"json", "text"});
        const auto s = run_verification(parse_suite(cfg.suite.empty() ? "all" : cfg.suite), cfg.tol_scale.value_or(1.0));
        detail::emit(cfg, out, fmt == "json" ? dump_json(to_json(s, cfg.timing)) : summary_lines(s));
        return s.pass ? 0 : 1;
    };

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        const auto subs = app.get_subcommands();
        err << (subs.empty() ? app.help() : subs.front()->help());
        return 2;
    }

    CLI::App* sub = app.get_subcommands().front();
    try {
        if (!cfg.config.empty()) detail::apply_config(*sub, cfg.config);
        return actions.at(sub->get_name())(*sub);
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n" << sub->help();
        return 2;
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const DomainError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const NumericError& e) {
        err << "numerical failure: " << e.what() << "\n";
        return 1;
    } catch (const IntegrationError& e) {
        err << "numerical failure: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace chmlab::cli
