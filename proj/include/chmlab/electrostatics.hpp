#pragma once

// Static Einstein-Maxwell system on the model solutions: residuals of
//   Hess V = V(Ric - Lambda g + 2 E (x) E - |E|^2 g),  Delta V = (|E|^2 - Lambda) V,
//   div E = 0,  curl(V E) = 0,
// the Robinson-Shen identity, and the area-charge inequalities at the horizons.
//
// Both families are warped products ds^2 + r(s)^2 dOmega with radial E = (Q/r^2) d_s.
// RNdS uses the chart x = r (d/ds = V d/dr, r' = V); Nariai uses s itself (r = alpha).

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "chmlab/errors.hpp"
#include "chmlab/model_params.hpp"

namespace chmlab {

/// Open static region (lower, upper) of an RNdS/SdS/de Sitter lapse and its horizon radii.
struct StaticRegion {
    double lower = 0.0;
    double upper = 0.0;
    std::vector<double> horizons;  // boundary radii with f = 0 (r = 0 is not a horizon)
};

inline StaticRegion static_region(const ModelParams& p) {
    const auto hs = horizon_roots(p);
    std::vector<double> pos;
    for (const auto& root : hs.roots) {
        if (root.r > 1e-12) pos.push_back(root.r);
    }
    if (pos.empty()) throw DomainError("static_region: no cosmological horizon");
    if (hs.classification == HorizonClass::double_outer) {
        throw DomainError("static_region: r+ = rc leaves no static region in r; use the Nariai chart");
    }
    StaticRegion out;
    out.upper = pos.back();
    out.lower = pos.size() >= 2 ? pos[pos.size() - 2] : 0.0;
    if (!(lapse_squared(0.5 * (out.lower + out.upper), p) > 0.0)) {
        throw DomainError("static_region: lapse not positive below the cosmological horizon");
    }
    if (out.lower > 0.0) out.horizons.push_back(out.lower);
    out.horizons.push_back(out.upper);
    return out;
}

/// Radial data of one sample: r(s) and V(s) with s-derivatives, |E|^2 and d/ds |E|^2.
struct RadialData {
    double r = 0.0, dr = 0.0, ddr = 0.0;
    double v = 0.0, vs = 0.0, vss = 0.0;
    double e2 = 0.0, de2 = 0.0;
};

/// Signed residuals of the static system at one sample.
struct EquationResiduals {
    double hessian_rr = 0.0;
    double hessian_tangential = 0.0;
    double laplace = 0.0;
    double div_e = 0.0;
    double curl_ve = 0.0;

    std::array<double, 5> values() const { return {hessian_rr, hessian_tangential, laplace, div_e, curl_ve}; }
    double max_abs() const {
        double m = 0.0;
        for (double x : values()) m = std::max(m, std::abs(x));
        return m;
    }
};

namespace detail {

inline double five_point_d1(const auto& f, double x, double h) {
    return (-f(x + 2 * h) + 8.0 * f(x + h) - 8.0 * f(x - h) + f(x - 2 * h)) / (12.0 * h);
}

inline double five_point_d2(const auto& f, double x, double h) {
    return (-f(x + 2 * h) + 16.0 * f(x + h) - 30.0 * f(x) + 16.0 * f(x - h) - f(x - 2 * h)) / (12.0 * h * h);
}

inline void require_rnds_sample(const ModelParams& p, double r) {
    const auto reg = static_region(p);
    if (!(r > reg.lower && r < reg.upper)) throw DomainError("electrostatics: sample outside the static region");
}

inline void require_nariai_sample(const NariaiParams& np, double s) {
    if (!(s > 0.0 && s < std::numbers::pi / np.omega)) {
        throw DomainError("electrostatics: sample outside the static region");
    }
}

// f, f', f'' in closed form or by five-point differences of f in r.
inline RadialData rnds_data(const ModelParams& p, double r, std::optional<double> fd_h) {
    double f = lapse_squared(r, p), f1, f2;
    if (fd_h) {
        auto lf = [&](double x) { return lapse_squared(x, p); };
        f1 = five_point_d1(lf, r, *fd_h);
        f2 = five_point_d2(lf, r, *fd_h);
    } else {
        f1 = lapse_squared_d1(r, p);
        f2 = lapse_squared_d2(r, p);
    }
    RadialData d;
    d.r = r;
    d.v = std::sqrt(f);
    d.dr = d.v;
    d.ddr = 0.5 * f1;
    d.vs = 0.5 * f1;
    d.vss = 0.5 * d.v * f2;
    d.e2 = p.q * p.q / std::pow(r, 4);
    d.de2 = -4.0 * p.q * p.q * d.v / std::pow(r, 5);
    return d;
}

inline RadialData nariai_data(const NariaiParams& np, double s, std::optional<double> fd_h) {
    const double w = np.omega;
    RadialData d;
    d.r = np.alpha;
    d.v = std::sin(w * s);
    if (fd_h) {
        auto v = [&](double x) { return std::sin(w * x); };
        d.vs = five_point_d1(v, s, *fd_h);
        d.vss = five_point_d2(v, s, *fd_h);
    } else {
        d.vs = w * std::cos(w * s);
        d.vss = -w * w * d.v;
    }
    d.e2 = np.q2 / std::pow(np.alpha, 4);
    return d;
}

// Curl of the Cartesian 1-form g(rho) x_i / rho at rho * dir, by five-point differences.
inline double radial_form_curl(const auto& g, double rho, double h) {
    constexpr std::array<double, 3> dir{0.48, 0.6, 0.64};
    auto omega = [&](const std::array<double, 3>& x, int i) {
        const double n = std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
        return g(n) * x[i] / n;
    };
    auto partial = [&](int i, int j) {  // d_i omega_j
        auto along = [&](double t) {
            std::array<double, 3> x{rho * dir[0], rho * dir[1], rho * dir[2]};
            x[i] += t;
            return omega(x, j);
        };
        return five_point_d1(along, 0.0, h * rho);
    };
    double m = 0.0;
    for (auto [i, j] : {std::pair{0, 1}, std::pair{1, 2}, std::pair{2, 0}}) {
        m = std::max(m, std::abs(partial(i, j) - partial(j, i)));
    }
    return m;
}

inline EquationResiduals pointwise_residuals(const RadialData& d, double lambda) {
    const double ric_ss = -2.0 * d.ddr / d.r;
    const double ric_aa = (1.0 - d.dr * d.dr - d.r * d.ddr) / (d.r * d.r);
    EquationResiduals res;
    res.hessian_rr = d.vss - d.v * (ric_ss - lambda + d.e2);
    res.hessian_tangential = d.dr / d.r * d.vs - d.v * (ric_aa - lambda - d.e2);
    res.laplace = d.vss + 2.0 * d.dr / d.r * d.vs - (d.e2 - lambda) * d.v;
    return res;
}

}  // namespace detail

/// Residuals at one sample, closed-form path (fd_h empty) or finite-difference path.
inline EquationResiduals static_residuals(const ModelParams& p, double r, std::optional<double> fd_h = std::nullopt) {
    detail::require_rnds_sample(p, r);
    const auto d = detail::rnds_data(p, r, fd_h);
    auto res = detail::pointwise_residuals(d, p.lambda);
    // flux r^2 E_s and its s-derivative V d/dr
    const double q = p.q;
    if (fd_h) {
        auto flux = [&](double x) { return x * x * (q / (x * x)); };
        res.div_e = d.v * detail::five_point_d1(flux, r, *fd_h) / (r * r);
        res.curl_ve = detail::radial_form_curl([&](double x) { return q / (x * x); }, r, *fd_h);
    } else {
        const double de_ds = -2.0 * q * d.dr / (r * r * r);
        res.div_e = (2.0 * r * d.dr * (q / (r * r)) + r * r * de_ds) / (r * r);
        res.curl_ve = 0.0;  // (V E)^flat = (Q/r^2) dr is exact
    }
    return res;
}

inline EquationResiduals static_residuals(const NariaiParams& np, double s, std::optional<double> fd_h = std::nullopt) {
    detail::require_nariai_sample(np, s);
    const auto d = detail::nariai_data(np, s, fd_h);
    auto res = detail::pointwise_residuals(d, np.lambda);
    const double e = np.q() / (np.alpha * np.alpha);
    if (fd_h) {
        auto flux = [&](double) { return np.alpha * np.alpha * e; };
        res.div_e = detail::five_point_d1(flux, s, *fd_h) / (np.alpha * np.alpha);
        // chart rho = e^s: (V E)^flat = sin(omega s) e ds = (sin(omega ln rho) e / rho) d rho
        auto g = [&](double rho) { return std::sin(np.omega * std::log(rho)) * e / rho; };
        res.curl_ve = detail::radial_form_curl(g, std::exp(s), *fd_h);
    } else {
        res.div_e = 0.0;
        res.curl_ve = 0.0;
    }
    return res;
}

/// Both sides of the Robinson-Shen identity (n = 3); the outer divergence uses a three-point
/// central difference with step h, so the residual decays like h^2.
struct RobinsonShenResult {
    double lhs = 0.0;
    double rhs = 0.0;
    double residual = 0.0;       // |lhs - rhs| at step h
    double residual_half = 0.0;  // at step h/2
    double order = 0.0;
    bool resolved = false;       // false when both residuals sit at round-off
};

namespace detail {

inline double rs_flux(const RadialData& d) {
    const double lap = d.vss + 2.0 * d.dr / d.r * d.vs;
    return (2.0 * d.vs * d.vss - (2.0 / 3.0) * lap * d.vs) / d.v;
}

inline double rs_rhs(const RadialData& d) {
    const double t = d.dr / d.r * d.vs;
    return (2.0 / d.v) * (2.0 / 3.0) * (d.vss - t) * (d.vss - t) + (4.0 / 3.0) * d.de2 * d.vs;
}

inline RobinsonShenResult rs_finish(double lhs_h, double lhs_half, double rhs, double noise_floor = 1e-10) {
    RobinsonShenResult out;
    out.lhs = lhs_h;
    out.rhs = rhs;
    out.residual = std::abs(lhs_h - rhs);
    out.residual_half = std::abs(lhs_half - rhs);
    out.resolved = out.residual > noise_floor && out.residual_half > 0.0;
    out.order = out.resolved ? std::log2(out.residual / out.residual_half) : std::nan("");
    return out;
}

}  // namespace detail

inline RobinsonShenResult robinson_shen_residual(const ModelParams& p, double r, double h = 1e-4) {
    detail::require_rnds_sample(p, r);
    const auto d = detail::rnds_data(p, r, std::nullopt);
    if (!(d.v > 1e-8)) throw NumericError("robinson_shen_residual: V too small near the horizon", d.v);
    auto weighted = [&](double x) { return x * x * detail::rs_flux(detail::rnds_data(p, x, std::nullopt)); };
    auto lhs = [&](double step) { return d.v * (weighted(r + step) - weighted(r - step)) / (2.0 * step) / (r * r); };
    return detail::rs_finish(lhs(h), lhs(0.5 * h), detail::rs_rhs(d));
}

inline RobinsonShenResult robinson_shen_residual(const NariaiParams& np, double s, double h = 1e-4) {
    detail::require_nariai_sample(np, s);
    const auto d = detail::nariai_data(np, s, std::nullopt);
    if (!(d.v > 1e-8)) throw NumericError("robinson_shen_residual: V too small near the horizon", d.v);
    auto flux = [&](double x) { return detail::rs_flux(detail::nariai_data(np, x, std::nullopt)); };
    auto lhs = [&](double step) { return (flux(s + step) - flux(s - step)) / (2.0 * step); };
    return detail::rs_finish(lhs(h), lhs(0.5 * h), detail::rs_rhs(d));
}

/// One boundary component of a static region: a horizon sphere.
struct BoundaryComponent {
    double radius = 0.0;
    double k = 0.0;  // |grad V| on the component
    double area = 0.0;
    int euler_characteristic = 2;
    double charge = 0.0;
    double cor_a2_lhs = 0.0;  // Lambda |dN| + 48 pi^2 Q^2/|dN|, compared with 12 pi
};

struct AreaChargeSummary {
    std::vector<BoundaryComponent> components;
    double thm_a1_lhs = 0.0;  // sum k_i (Lambda |dN_i| + 48 pi^2 Q_i^2/|dN_i|)
    double thm_a1_rhs = 0.0;  // 6 pi sum k_i chi_i
    bool thm_a1_holds = false;
    bool cor_a2_holds = false;
};

struct ElectrostaticReport {
    std::string family;  // "rnds" or "nariai"
    double m = 0.0, q = 0.0, lambda = 1.0;
    std::optional<double> alpha;
    int samples = 0;
    double sample_min = 0.0, sample_max = 0.0;  // r (RNdS) or s (Nariai)
    EquationResiduals closed_form;               // max |residual| over samples
    EquationResiduals finite_difference;
    double path_agreement = 0.0;  // max |closed - fd| over samples and components
    double robinson_shen_at = 0.0;
    RobinsonShenResult robinson_shen;
    double sup_e2 = 0.0;
    bool hypothesis_sup_e2_le_lambda = false;
    AreaChargeSummary area_charge;
    std::optional<AreaChargeSummary> area_charge_potential;  // Nariai: k = omega from V = sin(omega s)
};

namespace detail {

inline AreaChargeSummary summarize(std::vector<BoundaryComponent> comps, double lambda, double tol = 1e-12) {
    const double pi = std::numbers::pi;
    AreaChargeSummary s;
    s.cor_a2_holds = true;
    for (auto& c : comps) {
        c.area = 4.0 * pi * c.radius * c.radius;
        c.cor_a2_lhs = lambda * c.area + 48.0 * pi * pi * c.charge * c.charge / c.area;
        s.thm_a1_lhs += c.k * c.cor_a2_lhs;
        s.thm_a1_rhs += 6.0 * pi * c.k * c.euler_characteristic;
        s.cor_a2_holds = s.cor_a2_holds && c.cor_a2_lhs <= 12.0 * pi * (1.0 + tol);
    }
    s.thm_a1_holds = s.thm_a1_lhs <= s.thm_a1_rhs + tol * std::max(1.0, s.thm_a1_rhs);
    s.components = std::move(comps);
    return s;
}

inline void accumulate(EquationResiduals& acc, const EquationResiduals& r) {
    acc.hessian_rr = std::max(acc.hessian_rr, std::abs(r.hessian_rr));
    acc.hessian_tangential = std::max(acc.hessian_tangential, std::abs(r.hessian_tangential));
    acc.laplace = std::max(acc.laplace, std::abs(r.laplace));
    acc.div_e = std::max(acc.div_e, std::abs(r.div_e));
    acc.curl_ve = std::max(acc.curl_ve, std::abs(r.curl_ve));
}

inline double path_gap(const EquationResiduals& a, const EquationResiduals& b) {
    double m = 0.0;
    const auto va = a.values(), vb = b.values();
    for (std::size_t i = 0; i < va.size(); ++i) m = std::max(m, std::abs(va[i] - vb[i]));
    return m;
}

}  // namespace detail

/// Horizon data and the weighted area-charge sums for RNdS, SdS and de Sitter.
inline AreaChargeSummary area_charge_summary(const ModelParams& p) {
    const auto reg = static_region(p);
    std::vector<BoundaryComponent> comps;
    for (double r : reg.horizons) {
        BoundaryComponent c;
        c.radius = r;
        c.k = surface_gravity(r, p);
        c.charge = p.q;
        comps.push_back(c);
    }
    return detail::summarize(std::move(comps), p.lambda);
}

/// Nariai: both boundary spheres have area 4 pi alpha^2. With use_potential the k_i are
/// |V'| = omega for V = sin(omega s); otherwise the degenerate-horizon value 0.
inline AreaChargeSummary area_charge_summary(const NariaiParams& np, bool use_potential = false) {
    std::vector<BoundaryComponent> comps(2);
    for (auto& c : comps) {
        c.radius = np.alpha;
        c.k = use_potential ? np.omega : 0.0;
        c.charge = np.q();
    }
    return detail::summarize(std::move(comps), np.lambda);
}

/// Sample r_i = lower + (upper - lower)(i + 1/2)/n.
inline std::vector<double> static_samples(double lower, double upper, int n) {
    if (n < 1) throw UsageError("electrostatics: need at least one sample");
    std::vector<double> out;
    for (int i = 0; i < n; ++i) out.push_back(lower + (upper - lower) * (i + 0.5) / n);
    return out;
}

/// h is the Robinson-Shen step; fd_h the step of the finite-difference derivative path.
inline ElectrostaticReport verify_einstein_maxwell_static(const ModelParams& p, int samples = 32, double h = 1e-4,
                                                          double fd_h = 1e-3) {
    const auto reg = static_region(p);
    ElectrostaticReport rep;
    rep.family = "rnds";
    rep.m = p.m;
    rep.q = p.q;
    rep.lambda = p.lambda;
    rep.samples = samples;
    const auto pts = static_samples(reg.lower, reg.upper, samples);
    rep.sample_min = pts.front();
    rep.sample_max = pts.back();
    for (double r : pts) {
        const auto c = static_residuals(p, r);
        const auto f = static_residuals(p, r, fd_h);
        detail::accumulate(rep.closed_form, c);
        detail::accumulate(rep.finite_difference, f);
        rep.path_agreement = std::max(rep.path_agreement, detail::path_gap(c, f));
    }
    rep.robinson_shen_at = 0.5 * (reg.lower + reg.upper);
    rep.robinson_shen = robinson_shen_residual(p, rep.robinson_shen_at, h);
    rep.sup_e2 = reg.lower > 0.0 ? p.q * p.q / std::pow(reg.lower, 4) : 0.0;
    rep.hypothesis_sup_e2_le_lambda = rep.sup_e2 <= p.lambda;
    rep.area_charge = area_charge_summary(p);
    return rep;
}

inline ElectrostaticReport verify_einstein_maxwell_static(const NariaiParams& np, int samples = 32, double h = 1e-4,
                                                          double fd_h = 1e-3) {
    const double s_max = std::numbers::pi / np.omega;
    ElectrostaticReport rep;
    rep.family = "nariai";
    rep.m = np.m;
    rep.q = np.q();
    rep.lambda = np.lambda;
    rep.alpha = np.alpha;
    rep.samples = samples;
    const auto pts = static_samples(0.0, s_max, samples);
    rep.sample_min = pts.front();
    rep.sample_max = pts.back();
    for (double s : pts) {
        const auto c = static_residuals(np, s);
        const auto f = static_residuals(np, s, fd_h);
        detail::accumulate(rep.closed_form, c);
        detail::accumulate(rep.finite_difference, f);
        rep.path_agreement = std::max(rep.path_agreement, detail::path_gap(c, f));
    }
    rep.robinson_shen_at = 0.5 * s_max;
    rep.robinson_shen = robinson_shen_residual(np, rep.robinson_shen_at, h);
    rep.sup_e2 = np.q2 / std::pow(np.alpha, 4);
    rep.hypothesis_sup_e2_le_lambda = rep.sup_e2 <= np.lambda;
    rep.area_charge = area_charge_summary(np, false);
    rep.area_charge_potential = area_charge_summary(np, true);
    return rep;
}

}  // namespace chmlab
