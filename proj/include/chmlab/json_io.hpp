#pragma once

// JSON and CSV serialization. Every floating-point value is written with 17
// significant digits so that reports round-trip exactly; NaN/inf become null.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "chmlab/electrostatics.hpp"
#include "chmlab/model_params.hpp"
#include "chmlab/sphere_grid.hpp"
#include "chmlab/stability_spectrum.hpp"
#include "chmlab/surface_geometry.hpp"
#include "chmlab/variation_lab.hpp"

namespace chmlab {

using json = nlohmann::ordered_json;

inline std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    if (x == 0.0) return "0";  // no negative zero in reports
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

namespace detail {

inline void dump_into(std::string& out, const json& j, int indent, int depth) {
    const std::string pad(static_cast<std::size_t>(indent * (depth + 1)), ' ');
    const std::string close_pad(static_cast<std::size_t>(indent * depth), ' ');
    const char* nl = indent > 0 ? "\n" : "";
    switch (j.type()) {
        case json::value_t::object: {
            if (j.empty()) {
                out += "{}";
                return;
            }
            out += "{";
            out += nl;
            bool first = true;
            for (const auto& [k, v] : j.items()) {
                if (!first) {
                    out += ",";
                    out += nl;
                }
                first = false;
                out += pad + json(k).dump() + (indent > 0 ? ": " : ":");
                dump_into(out, v, indent, depth + 1);
            }
            out += nl + close_pad + "}";
            return;
        }
        case json::value_t::array: {
            // numeric arrays stay on one line
            bool flat = true;
            for (const auto& v : j) flat = flat && v.is_primitive();
            if (j.empty()) {
                out += "[]";
                return;
            }
            out += "[";
            bool first = true;
            for (const auto& v : j) {
                if (!first) out += flat ? ", " : ",";
                if (!flat) out += nl + pad;
                first = false;
                dump_into(out, v, indent, depth + 1);
            }
            if (!flat) out += nl + close_pad;
            out += "]";
            return;
        }
        case json::value_t::number_float: {
            const double x = j.get<double>();
            out += std::isfinite(x) ? format_double(x) : "null";
            return;
        }
        default:
            out += j.dump();
    }
}

}  // namespace detail

/// Deterministic pretty printer with 17-digit floats.
inline std::string dump_json(const json& j, int indent = 2) {
    std::string out;
    detail::dump_into(out, j, indent, 0);
    out += "\n";
    return out;
}

inline json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open JSON file: " + path);
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw UsageError("malformed JSON in " + path + ": " + e.what());
    }
}

namespace detail {

inline const json& require_key(const json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) throw UsageError(std::string("JSON: missing key \"") + key + "\"");
    return j.at(key);
}

inline double require_number(const json& j, const char* key) {
    const auto& v = require_key(j, key);
    if (!v.is_number()) throw UsageError(std::string("JSON: key \"") + key + "\" must be a number");
    return v.get<double>();
}

inline int require_int(const json& j, const char* key) {
    const auto& v = require_key(j, key);
    if (!v.is_number_integer()) throw UsageError(std::string("JSON: key \"") + key + "\" must be an integer");
    return v.get<int>();
}

}  // namespace detail

// ---- fields and surfaces ----

inline json to_json(const ScalarField& f) {
    return json{{"n_theta", f.grid().n_theta()}, {"n_phi", f.grid().n_phi()}, {"values", f.values()}};
}

inline ScalarField field_from_json(const json& j) {
    const int nt = detail::require_int(j, "n_theta");
    const int np = detail::require_int(j, "n_phi");
    const auto& vals = detail::require_key(j, "values");
    if (!vals.is_array()) throw UsageError("JSON: \"values\" must be an array");
    std::vector<double> v;
    v.reserve(vals.size());
    for (const auto& x : vals) {
        if (!x.is_number()) throw UsageError("JSON: field values must be numbers");
        v.push_back(x.get<double>());
    }
    return ScalarField(build_grid(nt, np), std::move(v));
}

/// Graph surface s = s0 + phi over the profile of a neck (a, Q, Lambda).
struct SurfaceSpec {
    double neck_a = 0.0, q = 0.0, lambda = 1.0, s0 = 0.0;
    ScalarField phi;
};

inline json to_json(const SurfaceSpec& s) {
    return json{{"base", {{"neck_a", s.neck_a}, {"q", s.q}, {"lambda", s.lambda}, {"s0", s.s0}}},
                {"phi", to_json(s.phi)}};
}

inline SurfaceSpec surface_from_json(const json& j) {
    const auto& base = detail::require_key(j, "base");
    SurfaceSpec s;
    s.neck_a = detail::require_number(base, "neck_a");
    s.q = detail::require_number(base, "q");
    s.lambda = base.contains("lambda") ? detail::require_number(base, "lambda") : 1.0;
    s.s0 = base.contains("s0") ? detail::require_number(base, "s0") : 0.0;
    s.phi = field_from_json(detail::require_key(j, "phi"));
    return s;
}

inline GraphSurface build_surface(const SurfaceSpec& s, double tol = 1e-12) {
    const double reach = std::abs(s.s0) + s.phi.max_abs() + 0.05;
    return make_graph(share_profile(integrate_profile(s.neck_a, s.q, s.lambda, reach, tol)), s.s0, s.phi);
}

// ---- reports ----

inline json to_json(const HorizonStructure& h) {
    json roots = json::array();
    for (const auto& r : h.roots) roots.push_back({{"r", r.r}, {"multiplicity", r.multiplicity}});
    json j{{"classification", to_string(h.classification)}, {"roots", roots}};
    j["r_minus"] = h.r_minus ? json(*h.r_minus) : json(nullptr);
    j["r_plus"] = h.r_plus ? json(*h.r_plus) : json(nullptr);
    j["r_c"] = h.r_c ? json(*h.r_c) : json(nullptr);
    j["max_residual"] = h.max_residual;
    return j;
}

inline json to_json(const SpectralReport& r) {
    json j{{"a", r.a},
           {"q", r.q},
           {"lambda", r.lambda},
           {"lambda1_analytic", r.lambda1_analytic},
           {"lambda1_discrete", r.lambda1_discrete},
           {"laplace_eigenvalues", r.laplace_eigenvalues},
           {"laplace_eigenvalues_discrete", r.laplace_eigenvalues_discrete}};
    j["stability_window"] = r.window ? json::array({r.window->first, r.window->second}) : json(nullptr);
    j["gap_identity_residual"] = r.gap_identity_residual;
    j["prop41_residual"] = r.prop41_residual;
    return j;
}

inline json to_json(const FdEstimate& e) {
    return json{{"analytic", e.analytic}, {"fd_coarse", e.fd_coarse}, {"fd_fine", e.fd_fine},
                {"err_coarse", e.err_coarse}, {"err_fine", e.err_fine}, {"order", e.order},
                {"resolved", e.resolved}};
}

inline json to_json(const VariationReport& r) {
    return json{{"a", r.a},
                {"q", r.q},
                {"lambda", r.lambda},
                {"s0", r.s0},
                {"first_analytic", r.first_analytic},
                {"first_fd", r.first_fd},
                {"second_analytic", r.second_analytic},
                {"second_as_printed", r.second_as_printed},
                {"second_fd", r.second_fd},
                {"z_max", r.z_max},
                {"fd_orders", {{"first", r.first_estimate.order}, {"second", r.second_estimate.order}}},
                {"first_estimate", to_json(r.first_estimate)},
                {"second_estimate", to_json(r.second_estimate)}};
}

inline json to_json(const LocalMaxReport& r) {
    return json{{"samples", r.samples},
                {"amplitude", r.amplitude},
                {"model_mass", r.model_mass},
                {"max_excess", r.max_excess},
                {"min_excess", r.min_excess},
                {"near_equality", r.near_equality},
                {"max_nonconstant_c2_near_equality", r.max_nonconstant_c2_near_equality},
                {"rigidity_consistent", r.rigidity_consistent}};
}

inline json to_json(const EquationResiduals& r) {
    return json{{"hessian_rr", std::abs(r.hessian_rr)},
                {"hessian_tangential", std::abs(r.hessian_tangential)},
                {"laplace", std::abs(r.laplace)},
                {"div_E", std::abs(r.div_e)},
                {"curl_VE", std::abs(r.curl_ve)}};
}

inline json to_json(const RobinsonShenResult& r) {
    return json{{"lhs", r.lhs}, {"rhs", r.rhs}, {"residual", r.residual}, {"residual_half_step", r.residual_half},
                {"order", r.order}, {"resolved", r.resolved}};
}

inline json to_json(const AreaChargeSummary& s) {
    json comps = json::array();
    for (const auto& c : s.components) {
        comps.push_back({{"radius", c.radius},
                         {"k", c.k},
                         {"area", c.area},
                         {"chi", c.euler_characteristic},
                         {"charge", c.charge},
                         {"corA2_lhs", c.cor_a2_lhs},
                         {"corA2_bound", 12.0 * std::numbers::pi}});
    }
    return json{{"components", comps},
                {"thmA1_lhs", s.thm_a1_lhs},
                {"thmA1_rhs", s.thm_a1_rhs},
                {"thmA1_holds", s.thm_a1_holds},
                {"corA2_holds", s.cor_a2_holds}};
}

inline json to_json(const ElectrostaticReport& r) {
    json j{{"family", r.family}, {"m", r.m}, {"q", r.q}, {"lambda", r.lambda}};
    if (r.alpha) j["alpha"] = *r.alpha;
    j["samples"] = r.samples;
    j["sample_range"] = json::array({r.sample_min, r.sample_max});
    j["residuals_closed_form"] = to_json(r.closed_form);
    j["residuals_finite_difference"] = to_json(r.finite_difference);
    j["path_agreement"] = r.path_agreement;
    j["robinson_shen_at"] = r.robinson_shen_at;
    j["robinson_shen"] = to_json(r.robinson_shen);
    j["sup_E2"] = r.sup_e2;
    j["hypothesis_supE2_le_lambda"] = r.hypothesis_sup_e2_le_lambda;
    j["area_charge"] = to_json(r.area_charge);
    if (r.area_charge_potential) j["area_charge_potential_k"] = to_json(*r.area_charge_potential);
    return j;
}

inline json to_json(const NariaiParams& n) {
    return json{{"alpha", n.alpha}, {"lambda", n.lambda}, {"m", n.m}, {"q", n.q()},
                {"q2", n.q2},       {"r_minus", n.r_minus}, {"omega", n.omega}};
}

inline json to_json(const NariaiFlowReport& r) {
    return json{{"alpha", r.alpha},
                {"area", r.area},
                {"area_charge_sum", r.area_charge},
                {"equality_residual", r.equality_residual},
                {"mean_curvature", r.mean_curvature},
                {"hprime_estimate", {{"t", r.hprime.t}, {"lhs", r.hprime.lhs}, {"rhs", r.hprime.rhs}}}};
}

/// One CSV line, 17-digit floats.
inline std::string csv_row(const std::vector<double>& vals) {
    std::string out;
    for (std::size_t i = 0; i < vals.size(); ++i) {
        if (i) out += ",";
        out += format_double(vals[i]);
    }
    return out + "\n";
}

}  // namespace chmlab
