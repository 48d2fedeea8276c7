#pragma once

// The acceptance suite: fourteen numbered criteria, each a list of
// "value <= bound" items. Boolean items use value 0/1 against bound 0 and are
// not affected by the tolerance scale.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <numbers>
#include <set>
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

namespace chmlab {

struct CheckItem {
    std::string label;
    double value = 0.0;
    double bound = 0.0;
    bool pass = false;
};

struct CriterionResult {
    int id = 0;
    std::string name;
    std::vector<CheckItem> items;
    bool pass = false;
    double seconds = 0.0;

    // the item closest to (or furthest past) its bound
    const CheckItem& worst() const {
        auto ratio = [](const CheckItem& c) {
            if (c.bound > 0.0) return c.value / c.bound;
            return c.value > 0.0 ? 1e300 : 0.0;
        };
        return *std::max_element(items.begin(), items.end(),
                                 [&](const CheckItem& a, const CheckItem& b) { return ratio(a) < ratio(b); });
    }
};

struct VerificationSummary {
    std::vector<CriterionResult> criteria;
    bool pass = false;
    double tol_scale = 1.0;
};

namespace detail {

class ItemSink {
public:
    explicit ItemSink(double scale) : scale_(scale) {}

    void within(std::string label, double value, double bound) {
        const double b = bound * scale_;
        items.push_back({std::move(label), std::abs(value), b, std::isfinite(value) && std::abs(value) <= b});
    }
    void require(std::string label, bool ok) { items.push_back({std::move(label), ok ? 0.0 : 1.0, 0.0, ok}); }

    std::vector<CheckItem> items;

private:
    double scale_;
};

inline double max_over(const std::vector<double>& xs, const std::function<double(double)>& f) {
    double m = 0.0;
    for (double x : xs) m = std::max(m, std::abs(f(x)));
    return m;
}

inline std::vector<double> linspace(double lo, double hi, int n) {
    std::vector<double> out;
    for (int i = 0; i < n; ++i) out.push_back(n == 1 ? lo : lo + (hi - lo) * i / (n - 1));
    return out;
}

inline ProfilePtr neck_profile_05_03(double s_max = 2.0) {
    return share_profile(integrate_profile(0.5, 0.3, 1.0, s_max, 1e-12));
}

inline void c01_nariai_double_root(ItemSink& s) {
    const auto np = nariai_from_alpha(0.8);
    const auto p = np.model();
    s.within("|quartic(0.8)|", horizon_quartic(0.8, p), 1e-12);
    s.within("|quartic'(0.8)|", horizon_quartic_d1(0.8, p), 1e-12);
    const auto h = horizon_roots(p);
    s.require("classification double-outer", h.classification == HorizonClass::double_outer);
    s.within("|r_minus - 0.511488|", h.r_minus.value_or(1e300) - 0.511488, 1e-6);
    std::vector<double> roots;
    for (const auto& r : h.roots) roots.insert(roots.end(), static_cast<std::size_t>(r.multiplicity), r.r);
    const std::vector<double> expected{-2.11149, 0.51149, 0.8, 0.8};
    double dev = roots.size() == expected.size() ? 0.0 : 1e300;
    for (std::size_t i = 0; i < std::min(roots.size(), expected.size()); ++i) {
        dev = std::max(dev, std::abs(roots[i] - expected[i]));
    }
    s.within("root multiset deviation", dev, 1e-3);
}

inline void c02_admissible_window(ItemSink& s) {
    const auto w = admissible_window(0.3, 1.0);
    s.within("|m_min - 0.295146|", w.m_min - 0.295146, 1e-6);
    s.within("|m_max - 0.379473|", w.m_max - 0.379473, 1e-6);
    s.require("m = 0.3191667 inside window", w.contains(0.3191667));
    s.require("three distinct positive roots",
              horizon_roots({0.3191667, 0.3, 1.0}).classification == HorizonClass::three_distinct_positive);
}

inline void c03_profile_conservation(ItemSink& s) {
    const auto prof = integrate_profile(0.5, 0.3, 1.0, 2.0, 1e-10);
    const auto grid = linspace(-2.0, 2.0, 801);
    s.within("max |I(s) - m|", max_over(grid, [&](double x) { return first_integral(prof, x) - prof.m(); }), 1e-8);
    s.within("max |R - 2 - 2Q^2/u^4|", max_over(grid, [&](double x) {
                 const auto p = prof.evaluate(x);
                 return curvature_scalars(p).scalar - 2.0 - 2.0 * 0.09 / std::pow(p.u, 4);
             }), 1e-7);
}

inline void c04_slice_mass(ItemSink& s) {
    const auto prof = neck_profile_05_03();
    const auto grid = build_grid(32, 64);
    double closed = 0.0, quad = 0.0;
    for (double x : linspace(-1.9, 1.9, 50)) {
        const auto slice = make_slice(prof, x, grid);
        closed = std::max(closed, std::abs(charged_hawking_mass(slice) - prof->m()));
        quad = std::max(quad, std::abs(charged_hawking_mass(slice, std::nullopt, {true}) - prof->m()));
    }
    s.within("closed-form max |m_CH - m| (50 slices)", closed, 1e-8);
    s.within("quadrature max |m_CH - m| (n_theta 32)", quad, 1e-5);
}

inline void c05_charge_invariance(ItemSink& s) {
    const auto prof = neck_profile_05_03(0.5);
    const auto grid = build_grid(64, 128);
    double dev = 0.0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const auto g = induced_geometry(make_graph(prof, 0.0, random_c2_field(grid, seed, 4, 0.05)));
        dev = std::max(dev, std::abs(g.charge - 0.3));
    }
    s.within("max |Q(graph) - 0.3| (20 seeds)", dev, 1e-6);
}

inline void c06_spectra(ItemSink& s) {
    const auto prof = share_profile(integrate_profile(0.5, 0.3, 1.0, 0.0, 1e-12));
    const auto geom = induced_geometry(make_slice(prof, 0.0, build_grid(32, 64)), {true});
    const auto lap = laplace_spectrum_discrete(geom, 4);
    s.within("Laplace gap relative error vs 2/a^2", (lap[1] - 8.0) / 8.0, 1e-3);
    s.within("|lambda1_discrete - 1.56|", lambda1_discrete(geom) - 1.56, 2e-3);
    const auto w = stability_window(0.3);
    s.require("window exists", w.has_value());
    s.within("|window - (0.1, 0.9)|", w ? std::max(std::abs(w->first - 0.1), std::abs(w->second - 0.9)) : 1.0,
             1e-15);
}

inline void c07_prop41(ItemSink& s) {
    double worst = 0.0;
    for (double a2 : linspace(0.01, 1.0, 100)) {
        for (double q2 : linspace(0.0, 0.25, 100)) {
            worst = std::max(worst, std::abs(prop41_identity_check(std::sqrt(a2), std::sqrt(q2))));
        }
    }
    s.within("max |residual| on 100x100 (a^2, Q^2)", worst, 1e-12);
}

inline void c08_first_variation(ItemSink& s) {
    const auto prof = neck_profile_05_03();
    const auto grid = build_grid(32, 64);
    double zmax = 0.0;
    for (double x : {-1.0, -0.5, 0.0, 0.3, 0.7, 1.2}) {
        zmax = std::max(zmax, z_functional(induced_geometry(make_slice(prof, x, grid))).max_abs());
    }
    s.within("max |Z| on slices", zmax, 1e-10);
    double order_dev = 0.0;
    bool resolved = true;
    for (int seed = 1; seed <= 10; ++seed) {
        const auto phi = random_c2_field(grid, 100 + seed, 4, 0.05);
        const auto psi = random_c2_field(grid, 200 + seed, 4, 0.15);
        const auto e = first_variation_fd(make_graph(prof, 0.3, phi), psi, 0.05);
        resolved = resolved && e.resolved;
        order_dev = std::max(order_dev, e.resolved ? std::abs(e.order - 2.0) : 1e300);
    }
    s.require("FD errors resolved above round-off", resolved);
    s.within("max |order - 2| (10 seeded graphs)", order_dev, 0.4);
}

inline void c09_second_variation(ItemSink& s) {
    const auto grid = build_grid(32, 64);
    const auto prof = neck_profile_05_03(0.5);
    const auto y1 = 2.0 * harmonic_field(grid, 1, 0);  // unit L2 on the radius-1/2 sphere
    const double sv = second_variation_minimal(0.5, 0.3, y1);
    s.within("|second variation + 0.760761|", sv + 0.760761, 1e-3);
    for (double dt : {1e-2, 5e-3}) {
        const auto e = second_variation_fd(make_slice(prof, 0.0, grid), y1, dt, sv);
        s.within("|FD - analytic| at dt " + format_double(dt), e.err_coarse, std::max(1e-4, 5 * dt * dt));
    }
    const ScalarField one(grid, 1.0);
    s.within("constant-phi null", second_variation_minimal(0.5, 0.3, one), 1e-8);
    s.within("|printed(constant) - 0.024375|", second_variation_as_printed(0.5, 0.3, one) - 0.024375, 1e-10);
}

inline void c10_local_max(ItemSink& s) {
    const auto r = local_max_experiment(0.5, 0.3, 200, 0.02, 1);
    s.items.push_back({"max excess m_CH - m (200 graphs)", r.max_excess, 1e-9, r.max_excess <= 1e-9});
    s.within("near-equality non-constant c2 part", r.max_nonconstant_c2_near_equality, 1e-6);
}

inline void c11_nariai_equality(ItemSink& s) {
    const auto r = nariai_flow_diagnostic(nariai_from_alpha(0.8));
    s.within("Nariai |area + 16pi^2Q^2/area - 4pi|", r.equality_residual, 1e-12);
    const double neck = area_charge_sum(0.5, 0.3);
    s.within("|neck value - 2.44 pi|", neck - 2.44 * std::numbers::pi, 1e-10);
    s.require("neck value strictly below 4 pi", neck < 4.0 * std::numbers::pi);
}

inline void c12_foliation(ItemSink& s) {
    const auto prof = neck_profile_05_03();
    const auto fol = cmc_foliation(*prof, 0.5, 20);
    const auto& mid = fol[fol.size() / 2];
    s.within("|H'(0) + lambda1|", mid.dh_dt + lambda1_analytic(0.5, 0.3), 1e-8);
    double l43 = 0.0, dm = 0.0;
    for (const auto& st : fol) {
        l43 = std::max(l43, std::abs(st.lemma43_residual));
        dm = std::max({dm, std::abs(st.dmch_dt), std::abs(st.dmch_dt_fd)});
    }
    s.within("max |H' - L rho| on t-grid", l43, 1e-8);
    s.within("max |d/dt m_CH|", dm, 1e-7);
}

inline void c13_electrostatics(ItemSink& s) {
    const ModelParams rnds{0.3191666666666667, 0.3, 1.0};
    const ModelParams ds{0.0, 0.0, 1.0};
    const auto rep = verify_einstein_maxwell_static(rnds);
    const auto rep_ds = verify_einstein_maxwell_static(ds);
    const auto rep_n = verify_einstein_maxwell_static(nariai_from_alpha(0.8));
    s.within("RNdS static residuals (32 samples)", rep.closed_form.max_abs(), 1e-8);
    s.within("de Sitter static residuals", rep_ds.closed_form.max_abs(), 1e-8);
    s.within("Nariai static residuals", rep_n.closed_form.max_abs(), 1e-8);
    const auto rs = robinson_shen_residual(rnds, 0.8, 1e-4);
    s.within("Robinson-Shen residual at h = 1e-4", rs.residual, 1e-6);
    s.within("|Robinson-Shen order - 2|", rs.resolved ? rs.order - 2.0 : 1e300, 0.4);
    s.within("|de Sitter area-charge lhs - 12 pi|",
             rep_ds.area_charge.components.at(0).cor_a2_lhs - 12.0 * std::numbers::pi, 1e-10);
    s.within("|sup |E|^2 - 1.44|", rep.sup_e2 - 1.44, 1e-9);
    s.require("hypothesis flag false for the neck instance", !rep.hypothesis_sup_e2_le_lambda);
    const double lhs = rep.area_charge.components.at(0).cor_a2_lhs;
    s.within("|r+ area-charge lhs - 5.32 pi|", lhs - 5.32 * std::numbers::pi, 1e-9);
    s.require("area-charge conclusion holds (5.32 pi < 12 pi)", rep.area_charge.cor_a2_holds);
}

inline void c14_determinism(ItemSink& s) {
    int differing = 0;
    for (auto c : {SweepCheck::prop41, SweepCheck::window, SweepCheck::cor_a2}) {
        const auto [x, y] = default_axes(c);
        if (run_sweep(c, x, y, 1).csv() != run_sweep(c, x, y, 8).csv()) ++differing;
    }
    s.items.push_back({"sweeps differing between jobs 1 and 8", static_cast<double>(differing), 0.0, differing == 0});
}

struct CriterionDef {
    int id;
    const char* name;
    void (*run)(ItemSink&);
};

inline const std::vector<CriterionDef>& criteria_table() {
    static const std::vector<CriterionDef> table{
        {1, "nariai-double-root", c01_nariai_double_root},
        {2, "admissible-window", c02_admissible_window},
        {3, "profile-conservation", c03_profile_conservation},
        {4, "slice-mass-constancy", c04_slice_mass},
        {5, "charge-invariance", c05_charge_invariance},
        {6, "spectra", c06_spectra},
        {7, "prop41-identity", c07_prop41},
        {8, "first-variation", c08_first_variation},
        {9, "second-variation", c09_second_variation},
        {10, "local-maximality", c10_local_max},
        {11, "nariai-equality", c11_nariai_equality},
        {12, "foliation", c12_foliation},
        {13, "electrostatics", c13_electrostatics},
        {14, "sweep-determinism", c14_determinism},
    };
    return table;
}

}  // namespace detail

/// Criterion ids selected by "all" or a comma list of ids and names.
inline std::set<int> parse_suite(const std::string& suite) {
    std::set<int> out;
    if (suite == "all") {
        for (const auto& c : detail::criteria_table()) out.insert(c.id);
        return out;
    }
    std::stringstream ss(suite);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        bool found = false;
        for (const auto& c : detail::criteria_table()) {
            if (tok == c.name || tok == std::to_string(c.id)) {
                out.insert(c.id);
                found = true;
            }
        }
        if (!found) throw UsageError("verify: unknown criterion '" + tok + "'");
    }
    if (out.empty()) throw UsageError("verify: empty suite");
    return out;
}

inline VerificationSummary run_verification(const std::set<int>& ids, double tol_scale = 1.0) {
    if (!(tol_scale > 0.0)) throw UsageError("verify: tol-scale must be positive");
    VerificationSummary sum;
    sum.tol_scale = tol_scale;
    sum.pass = true;
    for (const auto& def : detail::criteria_table()) {
        if (!ids.count(def.id)) continue;
        CriterionResult r;
        r.id = def.id;
        r.name = def.name;
        const auto t0 = std::chrono::steady_clock::now();
        detail::ItemSink sink(tol_scale);
        try {
            def.run(sink);
        } catch (const std::exception& e) {
            sink.items.push_back({std::string("exception: ") + e.what(), 1.0, 0.0, false});
        }
        r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        r.items = std::move(sink.items);
        r.pass = std::all_of(r.items.begin(), r.items.end(), [](const CheckItem& c) { return c.pass; });
        sum.pass = sum.pass && r.pass;
        sum.criteria.push_back(std::move(r));
    }
    return sum;
}

/// Wall times are left out unless requested so that reports stay byte-stable.
inline json to_json(const VerificationSummary& s, bool with_timing = false) {
    json crit = json::array();
    for (const auto& c : s.criteria) {
        json items = json::array();
        for (const auto& i : c.items) {
            items.push_back({{"label", i.label}, {"value", i.value}, {"bound", i.bound}, {"pass", i.pass}});
        }
        const auto& w = c.worst();
        json j{{"id", c.id}, {"name", c.name}, {"value", w.value}, {"bound", w.bound}, {"pass", c.pass}};
        if (with_timing) j["seconds"] = c.seconds;
        j["items"] = items;
        crit.push_back(j);
    }
    return json{{"tol_scale", s.tol_scale}, {"pass", s.pass}, {"criteria", crit}};
}

/// One line per criterion: "PASS 01 name  value <= bound  (seconds)".
inline std::string summary_lines(const VerificationSummary& s) {
    std::string out;
    for (const auto& c : s.criteria) {
        const auto& w = c.worst();
        char buf[256];
        std::snprintf(buf, sizeof buf, "%s %02d %-22s %-45s %.3e <= %.3e  (%.2fs)\n", c.pass ? "PASS" : "FAIL", c.id,
                      c.name.c_str(), w.label.c_str(), w.value, w.bound, c.seconds);
        out += buf;
    }
    out += s.pass ? "ALL PASS\n" : "FAILURES PRESENT\n";
    return out;
}

}  // namespace chmlab
