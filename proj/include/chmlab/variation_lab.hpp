#pragma once

// First and second variations of the charged Hawking mass, adjudicated
// against finite differences of m_CH along coordinate-graph families, plus
// diagnostics along the slice foliation of the model profiles.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <optional>
#include <vector>

#include "chmlab/errors.hpp"
#include "chmlab/model_params.hpp"
#include "chmlab/quadrature.hpp"
#include "chmlab/stability_spectrum.hpp"
#include "chmlab/surface_geometry.hpp"

namespace chmlab {

/// Pointwise Z = 4pi/|S| - K - 16pi^2 Q^2/|S|^2 + (R - zeta)/2 + (2|A|^2 - int H^2/|S|)/4.
inline ScalarField z_functional(const SurfaceGeometry& g, std::optional<double> zeta = std::nullopt) {
    const double z = zeta.value_or(2.0 * g.lambda);
    const double pi = std::numbers::pi, P = g.area;
    const double c0 = 4.0 * pi / P - 16.0 * pi * pi * g.charge * g.charge / (P * P) - 0.25 * g.h2_integral / P;
    ScalarField out(g.grid);
    for (std::size_t n = 0; n < out.size(); ++n) {
        out[n] = c0 - g.gauss_curvature[n] + 0.5 * (g.scalar_curvature[n] - z) + 0.5 * g.a_norm2[n];
    }
    return out;
}

enum class FirstVariationForm {
    z_form,      // canonical: constant zeta inside Z
    as_printed,  // Lambda in place of zeta, kept for discrepancy reports
};

/// Normal speed of the coordinate variation s -> s + t psi: <psi d_s, nu> = psi / W.
inline ScalarField coordinate_normal_speed(const SurfaceGeometry& g, const ScalarField& psi) {
    ScalarField out(g.grid);
    for (std::size_t n = 0; n < out.size(); ++n) out[n] = psi[n] / g.w[n];
    return out;
}

/// d/dt m_CH for normal speed eta:
/// -(2|S|^{1/2}/(16pi)^{3/2}) int (Delta H + Z H) eta dA, with int eta Delta H taken in weak form.
inline double first_variation(const SurfaceGeometry& g, const ScalarField& eta,
                              std::optional<double> zeta = std::nullopt,
                              FirstVariationForm form = FirstVariationForm::z_form) {
    eta.require_same_grid(ScalarField(g.grid));
    const double z = form == FirstVariationForm::as_printed ? g.lambda : zeta.value_or(2.0 * g.lambda);
    const auto Z = z_functional(g, z);
    const double pi = std::numbers::pi;
    const double laplacian_term = -g.integrate_area(gradient_dot(g, g.mean_curvature, eta));
    const double z_term = g.integrate_area(Z * g.mean_curvature * eta);
    return -2.0 * std::sqrt(g.area) / std::pow(16.0 * pi, 1.5) * (laplacian_term + z_term);
}

/// Central-difference estimates at dt and dt/2 compared with an analytic value.
struct FdEstimate {
    double analytic = 0.0;
    double fd_coarse = 0.0;
    double fd_fine = 0.0;
    double err_coarse = 0.0;
    double err_fine = 0.0;
    double order = 0.0;     // log2(err_coarse / err_fine)
    bool resolved = false;  // false when both errors sit at round-off and the order is meaningless
};

inline FdEstimate make_fd_estimate(double analytic, double coarse, double fine, double noise_floor = 1e-12) {
    FdEstimate e{analytic, coarse, fine, std::abs(coarse - analytic), std::abs(fine - analytic)};
    e.resolved = e.err_coarse > noise_floor && e.err_fine > 0.0;
    e.order = e.resolved ? std::log2(e.err_coarse / e.err_fine) : std::nan("");
    return e;
}

/// m_CH along the coordinate family s = s0 + phi + t psi.
inline std::function<double(double)> mass_along(const GraphSurface& base, const ScalarField& psi,
                                                std::optional<double> zeta = std::nullopt) {
    return [base, psi, zeta](double t) {
        ScalarField phi = base.phi;
        for (std::size_t n = 0; n < phi.size(); ++n) phi[n] += t * psi[n];
        return charged_hawking_mass(make_graph(base.profile, base.s0, phi), zeta, {true});
    };
}

/// First variation of m_CH in the direction psi d_s: analytic Z-form versus central differences.
inline FdEstimate first_variation_fd(const GraphSurface& base, const ScalarField& psi, double dt,
                                     std::optional<double> zeta = std::nullopt) {
    const auto geom = induced_geometry(base, {true});
    const double analytic = first_variation(geom, coordinate_normal_speed(geom, psi), zeta);
    const auto m = mass_along(base, psi, zeta);
    auto central = [&](double h) { return (m(h) - m(-h)) / (2.0 * h); };
    return make_fd_estimate(analytic, central(dt), central(0.5 * dt));
}

/// Five-point second derivative of m_CH along s = s0 + phi + t psi.
inline FdEstimate second_variation_fd(const GraphSurface& base, const ScalarField& psi, double dt, double analytic,
                                      std::optional<double> zeta = std::nullopt) {
    const auto m = mass_along(base, psi, zeta);
    const double m0 = m(0.0);
    auto five = [&](double h) {
        return (-m(2 * h) + 16.0 * m(h) - 30.0 * m0 + 16.0 * m(-h) - m(-2 * h)) / (12.0 * h * h);
    };
    return make_fd_estimate(analytic, five(dt), five(0.5 * dt));
}

namespace detail {

// Spectral sums for phi on the radius-a sphere: int phi^2 dA, int |grad phi|^2 dA, int (Delta phi)^2 dA.
struct SpectralSums {
    double l2 = 0.0, grad = 0.0, lap = 0.0;
    double jacobi = 0.0;    // int phi L phi dA
    double jacobi2 = 0.0;   // int (L phi)^2 dA
};

inline SpectralSums spectral_sums(double a, double ric, const ScalarField& phi) {
    const auto c = analyze(phi);
    SpectralSums s;
    const double a2 = a * a;
    for (int l = 0; l <= c.lmax(); ++l) {
        const double mu = l * (l + 1.0) / a2;
        for (int m = -l; m <= l; ++m) {
            const double c2 = a2 * c(l, m) * c(l, m);
            s.l2 += c2;
            s.grad += mu * c2;
            s.lap += mu * mu * c2;
            s.jacobi += (ric - mu) * c2;
            s.jacobi2 += (ric - mu) * (ric - mu) * c2;
        }
    }
    return s;
}

inline double neck_ric(double a, double q, double lambda) { return -lambda1_analytic(a, q, lambda); }

inline double second_variation_prefactor(double a) {
    const double pi = std::numbers::pi;
    return std::sqrt(4.0 * pi * a * a) / (32.0 * std::pow(pi, 1.5));
}

}  // namespace detail

/// (|S|^{1/2}/32 pi^{3/2}) [Ric(nu,nu) int |grad phi|^2 - int (Delta phi)^2] on the minimal slice of radius a.
inline double second_variation_minimal(double a, double q, const ScalarField& phi, double lambda = 1.0) {
    const double ric = detail::neck_ric(a, q, lambda);
    const auto s = detail::spectral_sums(a, ric, phi);
    return detail::second_variation_prefactor(a) * (ric * s.grad - s.lap);
}

/// The displayed coefficient ((|S| Lambda - 8 pi)/(2|S|) + 16 pi^2 Q^2/|S|^2) in front of int phi L phi.
inline double second_variation_as_printed(double a, double q, const ScalarField& phi, double lambda = 1.0) {
    const double pi = std::numbers::pi, P = 4.0 * pi * a * a;
    const double ric = detail::neck_ric(a, q, lambda);
    const auto s = detail::spectral_sums(a, ric, phi);
    const double coef = (P * lambda - 8.0 * pi) / (2.0 * P) + 16.0 * pi * pi * q * q / (P * P);
    return detail::second_variation_prefactor(a) * (coef * s.jacobi - s.jacobi2);
}

/// Predicted gap printed - minimal: prefactor (zeta - Lambda)/2 (-int phi L phi).
inline double second_variation_discrepancy(double a, double q, const ScalarField& phi, double lambda = 1.0,
                                           std::optional<double> zeta = std::nullopt) {
    const double z = zeta.value_or(2.0 * lambda);
    const auto s = detail::spectral_sums(a, detail::neck_ric(a, q, lambda), phi);
    return detail::second_variation_prefactor(a) * 0.5 * (z - lambda) * (-s.jacobi);
}

struct InstabilityConstant {
    double value = 0.0;
    int l_min = 1;
};

/// Best C with d^2 m_CH <= -C int (phi - mean)^2 dA over mean-zero phi on a strictly stable neck.
inline InstabilityConstant strict_instability_constant(double a, double q, double lambda = 1.0, int l_max = 32) {
    if (!inside_stability_window(a, q, lambda)) {
        throw DomainError("strict_instability_constant: neck outside the strict stability window");
    }
    const double ric = detail::neck_ric(a, q, lambda);
    const double pre = detail::second_variation_prefactor(a);
    InstabilityConstant best{1e300, 1};
    for (int l = 1; l <= l_max; ++l) {
        const double mu = l * (l + 1.0) / (a * a);
        const double c = pre * mu * (mu - ric);
        if (c < best.value) best = {c, l};
    }
    return best;
}

/// One leaf Sigma(t) of the slice foliation s = t (lapse rho_t = 1).
struct FoliationState {
    double t = 0.0;
    double u = 0.0, du = 0.0;
    double mean_curvature = 0.0;  // H(t) = -2u'/u
    double dh_dt = 0.0;           // five-point difference of H along the dense profile
    double jacobi_of_lapse = 0.0; // L(t) rho_t = Ric(nu,nu) + |A|^2
    double lambda1 = 0.0;         // -(Ric + |A|^2), constant potential on a slice
    double rho = 1.0;
    double mch = 0.0;
    double dmch_dt = 0.0;         // closed-form derivative of the slice mass
    double dmch_dt_fd = 0.0;      // five-point difference of the slice mass
    double lemma43_residual = 0.0;
};

inline std::vector<FoliationState> cmc_foliation(const RadialProfile& prof, double t_max, int n_steps,
                                                 double h = 1e-3, std::optional<double> zeta = std::nullopt) {
    if (n_steps < 1) throw UsageError("cmc_foliation: need at least one step");
    if (!(t_max >= 0.0) || t_max + 2.0 * h > prof.s_max()) {
        throw DomainError("cmc_foliation: t range exceeds the integrated profile");
    }
    const double z = zeta.value_or(2.0 * prof.lambda());
    const double q = prof.q();
    auto H = [&](double s) {
        const auto p = prof.evaluate(s);
        return -2.0 * p.du / p.u;
    };
    auto mass = [&](double s) { return slice_hawking_mass(prof.evaluate(s), q, z); };
    auto five = [&](const auto& f, double s) {
        return (-f(s + 2 * h) + 8.0 * f(s + h) - 8.0 * f(s - h) + f(s - 2 * h)) / (12.0 * h);
    };

    std::vector<FoliationState> out;
    for (int i = 0; i <= n_steps; ++i) {
        const double t = -t_max + 2.0 * t_max * i / n_steps;
        const auto p = prof.evaluate(t);
        const auto c = curvature_scalars(p);
        FoliationState st;
        st.t = t;
        st.u = p.u;
        st.du = p.du;
        st.mean_curvature = c.h_slice;
        st.dh_dt = five(H, t);
        st.jacobi_of_lapse = c.ric_nn + c.a2_slice;
        st.lambda1 = -st.jacobi_of_lapse;
        st.mch = mass(t);
        st.dmch_dt = p.du * (0.5 * (1.0 - p.du * p.du - z * p.u * p.u / 6.0 + q * q / (p.u * p.u)) -
                             p.u * p.ddu - z * p.u * p.u / 6.0 - q * q / (p.u * p.u));
        st.dmch_dt_fd = five(mass, t);
        st.lemma43_residual = st.dh_dt - st.jacobi_of_lapse * st.rho;
        out.push_back(st);
    }
    return out;
}

/// Terms of the monotonicity decomposition of d/dt m_CH along a CMC leaf.
struct MonotonicityState {
    double t = 0.0;
    double dmch_dt = 0.0;
    double scalar_term_printed = 0.0;     // int (R - Lambda - 2|E|^2) dA
    double scalar_term_consistent = 0.0;  // int (R - zeta - 2|E|^2) dA
    double umbilic_term = 0.0;            // int (|A|^2 - H^2/2) dA
    double charge_term = 0.0;             // int |E|^2 dA - 16 pi^2 Q^2/|S|
    double lapse_term = 0.0;              // int (Ric + |A|^2)(rho - mean rho) dA
    double decomposition_printed = 0.0;
    double decomposition_consistent = 0.0;
    double lapse_inequality_lhs = 0.0;
    double lapse_inequality_rhs = 0.0;
    bool printed_mismatch = false;  // printed decomposition disagrees with dmch_dt
};

inline std::vector<MonotonicityState> monotonicity_report(const std::vector<FoliationState>& fol,
                                                          const RadialProfile& prof,
                                                          std::optional<double> zeta = std::nullopt,
                                                          double mismatch_tol = 1e-8) {
    const double z = zeta.value_or(2.0 * prof.lambda());
    const double pi = std::numbers::pi, lam = prof.lambda(), q = prof.q();
    const double lambda1_neck = lambda1_analytic(prof.a(), q, lam);
    std::vector<MonotonicityState> out;
    for (const auto& st : fol) {
        const auto p = prof.evaluate(st.t);
        const auto c = curvature_scalars(p);
        const double P = 4.0 * pi * p.u * p.u;
        const double e2 = q * q / (p.u * p.u * p.u * p.u);
        const double H = c.h_slice, rho_bar = st.rho;
        MonotonicityState m;
        m.t = st.t;
        m.dmch_dt = st.dmch_dt;
        m.scalar_term_printed = (c.scalar - lam - 2.0 * e2) * P;
        m.scalar_term_consistent = (c.scalar - z - 2.0 * e2) * P;
        m.umbilic_term = (c.a2_slice - 0.5 * H * H) * P;
        m.charge_term = e2 * P - 16.0 * pi * pi * q * q / P;
        m.lapse_term = (c.ric_nn + c.a2_slice) * (st.rho - rho_bar) * P;
        const double k64 = H * rho_bar * std::sqrt(P) / (64.0 * std::pow(pi, 1.5));
        const double k32 = 2.0 * k64;
        const double tail = -k32 * m.charge_term - H * std::sqrt(P) / (32.0 * std::pow(pi, 1.5)) * m.lapse_term;
        m.decomposition_printed = -k64 * (m.scalar_term_printed + m.umbilic_term) + tail;
        m.decomposition_consistent = -k64 * (m.scalar_term_consistent + m.umbilic_term) + tail;
        m.lapse_inequality_lhs = m.lapse_term;
        m.lapse_inequality_rhs = lambda1_neck / rho_bar * (st.rho - rho_bar) * (st.rho - rho_bar) * P;
        m.printed_mismatch = std::abs(m.decomposition_printed - m.dmch_dt) > mismatch_tol;
        out.push_back(m);
    }
    return out;
}

struct LocalMaxReport {
    int samples = 0;
    double amplitude = 0.0;
    double model_mass = 0.0;
    double max_excess = -1e300;  // max over samples of m_CH(graph) - m
    double min_excess = 1e300;
    int near_equality = 0;       // samples with excess > -tol
    double max_nonconstant_c2_near_equality = 0.0;
    bool rigidity_consistent = true;  // every near-equality sample is a slice up to 1e-6
};

/// Stream seed for sample i of experiment `seed`.
inline std::uint64_t sample_seed(std::uint64_t seed, int i) {
    return splitmix64(seed ^ (0x632BE59BD9B4E019ull * static_cast<std::uint64_t>(i + 1)));
}

/// Mean-free part of a field on the unit sphere.
inline ScalarField nonconstant_part(const ScalarField& f) {
    const double mean = integrate(f) / (4.0 * std::numbers::pi);
    ScalarField out = f;
    for (std::size_t n = 0; n < out.size(); ++n) out[n] -= mean;
    return out;
}

inline LocalMaxReport local_max_experiment(double a, double q, int n_samples, double amplitude, std::uint64_t seed,
                                           double lambda = 1.0, int n_theta = 32, int lmax = 4,
                                           double equality_tol = 1e-9) {
    if (!inside_stability_window(a, q, lambda)) throw DomainError("local_max_experiment: neck not strictly stable");
    if (!(amplitude >= 0.0 && amplitude <= 0.05)) throw DomainError("local_max_experiment: amplitude must be <= 0.05");
    if (n_samples < 1) throw UsageError("local_max_experiment: need at least one sample");
    const auto grid = build_grid(n_theta, 2 * n_theta);
    const auto prof = share_profile(integrate_profile(a, q, lambda, 4.0 * amplitude + 0.1, 1e-12));
    LocalMaxReport r;
    r.samples = n_samples;
    r.amplitude = amplitude;
    r.model_mass = prof->m();
    for (int i = 0; i < n_samples; ++i) {
        const auto phi = random_c2_field(grid, sample_seed(seed, i), lmax, amplitude);
        const double excess = charged_hawking_mass(make_graph(prof, 0.0, phi), std::nullopt, {true}) - r.model_mass;
        r.max_excess = std::max(r.max_excess, excess);
        r.min_excess = std::min(r.min_excess, excess);
        if (excess > -equality_tol) {
            ++r.near_equality;
            const double nc = c2_norm(nonconstant_part(phi));
            r.max_nonconstant_c2_near_equality = std::max(r.max_nonconstant_c2_near_equality, nc);
            if (nc > 1e-6) r.rigidity_consistent = false;
        }
    }
    return r;
}

/// Excess of m_CH for phi = amp * Y / a against the quadratic Taylor prediction.
struct TaylorCheck {
    double excess = 0.0;
    double predicted = 0.0;  // second_variation_minimal(phi) / 2
    double ratio = 0.0;
};

inline TaylorCheck taylor_check(double a, double q, const ScalarField& phi, double lambda = 1.0) {
    const auto prof = share_profile(integrate_profile(a, q, lambda, phi.max_abs() + 0.05, 1e-12));
    TaylorCheck t;
    t.excess = charged_hawking_mass(make_graph(prof, 0.0, phi), std::nullopt, {true}) - prof->m();
    t.predicted = 0.5 * second_variation_minimal(a, q, phi, lambda);
    t.ratio = t.excess / t.predicted;
    return t;
}

/// First and second variation of m_CH in the direction phi. First-variation entries are taken at the
/// slice s0; second-variation entries at the neck slice, the only place the closed form applies.
struct VariationReport {
    double a = 0.0, q = 0.0, lambda = 1.0, s0 = 0.0;
    double first_analytic = 0.0;
    double first_fd = 0.0;
    double second_analytic = 0.0;
    double second_as_printed = 0.0;
    double second_fd = 0.0;
    double z_max = 0.0;
    FdEstimate first_estimate;
    FdEstimate second_estimate;
};

inline VariationReport variation_report(double a, double q, double s0, const ScalarField& phi, double dt = 1e-2,
                                        double lambda = 1.0) {
    if (!(dt > 0.0)) throw UsageError("variation_report: dt must be positive");
    const double reach = std::abs(s0) + 2.0 * dt * phi.max_abs() + 0.05;
    const auto prof = share_profile(integrate_profile(a, q, lambda, reach, 1e-12));
    const auto base = make_slice(prof, s0, phi.grid_ptr());
    const auto geom = induced_geometry(base, {true});
    VariationReport r;
    r.a = a;
    r.q = q;
    r.lambda = lambda;
    r.s0 = s0;
    r.z_max = z_functional(geom).max_abs();
    r.first_estimate = first_variation_fd(base, phi, dt);
    r.first_analytic = r.first_estimate.analytic;
    r.first_fd = r.first_estimate.fd_fine;
    r.second_analytic = second_variation_minimal(a, q, phi, lambda);
    r.second_as_printed = second_variation_as_printed(a, q, phi, lambda);
    r.second_estimate = second_variation_fd(make_slice(prof, 0.0, phi.grid_ptr()), phi, dt, r.second_analytic);
    r.second_fd = r.second_estimate.fd_fine;
    return r;
}

/// |Sigma| + 16 pi^2 Q^2/|Sigma| for the round sphere of area radius a.
inline double area_charge_sum(double a, double q) {
    const double pi = std::numbers::pi, P = 4.0 * pi * a * a;
    return P + 16.0 * pi * pi * q * q / P;
}

/// Both sides of |S_t| H'(t) int 1/rho dA <= kappa int_0^t H(s) int rho dA ds along the slice foliation.
struct HPrimeEstimate {
    double t = 0.0;
    double lhs = 0.0;
    double rhs = 0.0;
};

inline HPrimeEstimate hprime_estimate(const RadialProfile& prof, double t) {
    const double pi = std::numbers::pi, q = prof.q();
    auto P = [&](double s) {
        const double u = prof.evaluate(s).u;
        return 4.0 * pi * u * u;
    };
    auto H = [&](double s) {
        const auto p = prof.evaluate(s);
        return -2.0 * p.du / p.u;
    };
    const auto p = prof.evaluate(t);
    const double dh = curvature_scalars(p).ric_nn + curvature_scalars(p).a2_slice;
    const double kappa = 16.0 * pi * pi * q * q / P(0.0);
    HPrimeEstimate e;
    e.t = t;
    e.lhs = P(t) * dh * P(t);
    e.rhs = kappa * integrate_adaptive([&](double s) { return H(s) * P(s); }, 0.0, t, 1e-12);
    return e;
}

struct NariaiFlowReport {
    double alpha = 0.0;
    double area = 0.0;
    double area_charge = 0.0;        // |S| + 16 pi^2 Q^2/|S|
    double equality_residual = 0.0;  // area_charge - 4 pi
    double mean_curvature = 0.0;
    HPrimeEstimate hprime;
};

inline NariaiFlowReport nariai_flow_diagnostic(const NariaiParams& np, double t = 0.5) {
    const auto prof = integrate_profile(np.alpha, np.q(), np.lambda, t + 0.1, 1e-12);
    NariaiFlowReport r;
    r.alpha = np.alpha;
    r.area = 4.0 * std::numbers::pi * np.alpha * np.alpha;
    r.area_charge = area_charge_sum(np.alpha, np.q());
    r.equality_residual = r.area_charge - 4.0 * std::numbers::pi;
    r.mean_curvature = curvature_scalars(prof, t).h_slice;
    r.hprime = hprime_estimate(prof, t);
    return r;
}

}  // namespace chmlab
