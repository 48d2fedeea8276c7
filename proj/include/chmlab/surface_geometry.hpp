#pragma once

// Graphs s = s0 + phi(x) over the round sphere inside the warped product
// g = ds^2 + u(s)^2 g_{S^2}. Unit normal points toward increasing s and the
// second fundamental form is A(X, Y) = -<D_X nu, Y>, so a slice has H = -2u'/u.

#include <cmath>
#include <memory>
#include <numbers>
#include <optional>

#include "chmlab/errors.hpp"
#include "chmlab/radial_profile.hpp"
#include "chmlab/sphere_grid.hpp"

namespace chmlab {

using ProfilePtr = std::shared_ptr<const RadialProfile>;

inline ProfilePtr share_profile(RadialProfile prof) { return std::make_shared<const RadialProfile>(std::move(prof)); }

struct GraphSurface {
    ProfilePtr profile;
    double s0 = 0.0;
    ScalarField phi;

    const GridPtr& grid() const { return phi.grid_ptr(); }
};

inline GraphSurface make_graph(ProfilePtr profile, double s0, ScalarField phi) {
    if (!profile) throw UsageError("make_graph: missing profile");
    return {std::move(profile), s0, std::move(phi)};
}

inline GraphSurface make_slice(ProfilePtr profile, double s0, const GridPtr& grid) {
    return make_graph(std::move(profile), s0, ScalarField(grid, 0.0));
}

struct GeometryOptions {
    /// Evaluate slices through the general graph formulas instead of closed forms.
    bool force_quadrature = false;
};

/// Pointwise fields are node values; densities are relative to the unit-sphere element.
struct SurfaceGeometry {
    GridPtr grid;
    double q = 0.0;
    double lambda = 1.0;
    bool closed_form = false;
    double slice_s = 0.0;  // arclength of the slice when closed_form

    ScalarField height;           // s = s0 + phi
    ScalarField u, du, ddu;       // profile at the height
    ScalarField w;                // W = sqrt(1 + |d phi|^2 / u^2)
    ScalarField area_density;     // dA / d sigma_unit = u^2 W
    ScalarField mean_curvature;   // H
    ScalarField a_norm2;          // |A|^2
    ScalarField gauss_curvature;  // intrinsic K of the induced metric
    ScalarField gauss_curvature_from_equation;  // (R - 2 Ric(nu,nu) + H^2 - |A|^2) / 2
    ScalarField scalar_curvature;  // ambient R
    ScalarField ric_nn;            // ambient Ric(nu, nu)
    ScalarField e_norm2;           // |E|^2
    ScalarField e_normal;          // <E, nu>
    ScalarField nu_s, nu_theta, nu_phi;  // coordinate components of nu

    // Inverse induced metric in (theta, phi) coordinates.
    ScalarField h_inv_tt, h_inv_tp, h_inv_pp;

    double area = 0.0;
    double charge = 0.0;
    double h2_integral = 0.0;  // integral of H^2 dA

    /// Surface integral of a node field against dA.
    double integrate_area(const ScalarField& f) const { return chmlab::integrate(f * area_density); }
};

namespace detail {

inline void allocate(SurfaceGeometry& g) {
    for (auto* f : {&g.height, &g.u, &g.du, &g.ddu, &g.w, &g.area_density, &g.mean_curvature, &g.a_norm2,
                    &g.gauss_curvature, &g.gauss_curvature_from_equation, &g.scalar_curvature, &g.ric_nn,
                    &g.e_norm2, &g.e_normal, &g.nu_s, &g.nu_theta, &g.nu_phi, &g.h_inv_tt, &g.h_inv_tp,
                    &g.h_inv_pp}) {
        *f = ScalarField(g.grid);
    }
}

inline bool is_constant(const ScalarField& f) {
    for (std::size_t i = 1; i < f.size(); ++i) {
        if (f[i] != f[0]) return false;
    }
    return true;
}

inline void finish_integrals(SurfaceGeometry& g) {
    g.area = integrate(g.area_density);
    g.charge = integrate(g.e_normal * g.area_density) / (4.0 * std::numbers::pi);
    g.h2_integral = g.integrate_area(g.mean_curvature * g.mean_curvature);
}

inline SurfaceGeometry slice_geometry(const GraphSurface& surf) {
    const auto& prof = *surf.profile;
    SurfaceGeometry g;
    g.grid = surf.grid();
    g.q = prof.q();
    g.lambda = prof.lambda();
    g.closed_form = true;
    g.slice_s = surf.s0 + surf.phi[0];
    allocate(g);
    const auto p = prof.evaluate(g.slice_s);
    const auto c = curvature_scalars(p);
    const double e2 = g.q * g.q / (p.u * p.u * p.u * p.u);
    const auto& grid = *g.grid;
    for (int j = 0; j < grid.n_theta(); ++j) {
        const double s2 = grid.sin_theta(j) * grid.sin_theta(j);
        for (int k = 0; k < grid.n_phi(); ++k) {
            const std::size_t n = grid.node(j, k);
            g.height[n] = g.slice_s;
            g.u[n] = p.u;
            g.du[n] = p.du;
            g.ddu[n] = p.ddu;
            g.w[n] = 1.0;
            g.area_density[n] = p.u * p.u;
            g.mean_curvature[n] = c.h_slice;
            g.a_norm2[n] = c.a2_slice;
            g.gauss_curvature[n] = c.k_slice;
            g.gauss_curvature_from_equation[n] =
                0.5 * (c.scalar - 2.0 * c.ric_nn + c.h_slice * c.h_slice - c.a2_slice);
            g.scalar_curvature[n] = c.scalar;
            g.ric_nn[n] = c.ric_nn;
            g.e_norm2[n] = e2;
            g.e_normal[n] = g.q / (p.u * p.u);
            g.nu_s[n] = 1.0;
            g.h_inv_tt[n] = 1.0 / (p.u * p.u);
            g.h_inv_pp[n] = 1.0 / (p.u * p.u * s2);
        }
    }
    g.area = 4.0 * std::numbers::pi * p.u * p.u;
    g.charge = g.q;
    g.h2_integral = g.area * c.h_slice * c.h_slice;
    return g;
}

inline double det3(double a, double b, double c, double d, double e, double f, double g, double h, double i) {
    return a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g);
}

}  // namespace detail

/// Induced metric, second fundamental form, curvatures, area and charge of a graph.
inline SurfaceGeometry induced_geometry(const GraphSurface& surf, GeometryOptions opts = {}) {
    if (!surf.profile) throw UsageError("induced_geometry: missing profile");
    const auto& prof = *surf.profile;
    for (std::size_t i = 0; i < surf.phi.size(); ++i) {
        if (!prof.contains(surf.s0 + surf.phi[i])) {
            throw DomainError("induced_geometry: graph leaves the integrated profile range");
        }
    }
    if (!opts.force_quadrature && detail::is_constant(surf.phi)) return detail::slice_geometry(surf);

    SurfaceGeometry g;
    g.grid = surf.grid();
    g.q = prof.q();
    g.lambda = prof.lambda();
    detail::allocate(g);
    const auto& grid = *g.grid;
    const auto d = field_derivatives(surf.phi);
    const double q2 = g.q * g.q;

    for (int j = 0; j < grid.n_theta(); ++j) {
        const double sn = grid.sin_theta(j), cs = grid.cos_theta(j);
        const double S = sn * sn, St = 2.0 * sn * cs, Stt = 2.0 * (cs * cs - sn * sn);
        for (int k = 0; k < grid.n_phi(); ++k) {
            const std::size_t n = grid.node(j, k);
            const double f = surf.s0 + surf.phi[n];
            const auto p = prof.evaluate(f);
            const double u = p.u, u1 = p.du, u2 = p.ddu, uu = u * u;
            const double ft = d.t[n], fp = d.p[n], ftt = d.tt[n], ftp = d.tp[n], fpp = d.pp[n];
            const double fttp = d.ttp[n], ftpp = d.tpp[n];

            const double grad2 = ft * ft + fp * fp / S;  // |d phi|^2 on the unit sphere
            const double W = std::sqrt(1.0 + grad2 / uu);

            // Induced metric h = u^2 sigma + d phi (x) d phi.
            const double E = ft * ft + uu, F = ft * fp, G = fp * fp + uu * S;
            const double det = E * G - F * F;
            const double hi_tt = G / det, hi_tp = -F / det, hi_pp = E / det;

            // A_ij = (Hess_sigma phi - u u' sigma - 2 (u'/u) phi_i phi_j) / W
            const double htt = ftt, htp = ftp - cs / sn * fp, hpp = fpp + sn * cs * ft;
            const double A_tt = (htt - u * u1 - 2.0 * u1 / u * ft * ft) / W;
            const double A_tp = (htp - 2.0 * u1 / u * ft * fp) / W;
            const double A_pp = (hpp - u * u1 * S - 2.0 * u1 / u * fp * fp) / W;

            const double H = hi_tt * A_tt + 2.0 * hi_tp * A_tp + hi_pp * A_pp;
            // Mixed tensor B = h^{-1} A; |A|^2 = tr(B^2).
            const double B_tt = hi_tt * A_tt + hi_tp * A_tp, B_tp = hi_tt * A_tp + hi_tp * A_pp;
            const double B_pt = hi_tp * A_tt + hi_pp * A_tp, B_pp = hi_tp * A_tp + hi_pp * A_pp;
            const double A2 = B_tt * B_tt + 2.0 * B_tp * B_pt + B_pp * B_pp;

            const double ric_ss = -2.0 * u2 / u;
            const double ric_tan = (1.0 - u1 * u1 - u * u2);  // coefficient of sigma in Ric
            const double ric_nn = (ric_ss + ric_tan * grad2 / (uu * uu)) / (W * W);
            const double R = -4.0 * u2 / u + 2.0 * (1.0 - u1 * u1) / uu;

            // Brioschi formula with w = u u', w' = u'^2 + u u''.
            const double w = u * u1, wp = u1 * u1 + u * u2;
            const double E_t = 2.0 * ft * ftt + 2.0 * w * ft, E_p = 2.0 * ft * ftp + 2.0 * w * fp;
            const double F_t = ftt * fp + ft * ftp, F_p = ftp * fp + ft * fpp;
            const double G_t = 2.0 * fp * ftp + 2.0 * w * ft * S + uu * St;
            const double G_p = 2.0 * fp * fpp + 2.0 * w * fp * S;
            const double E_pp = 2.0 * ftp * ftp + 2.0 * ft * ftpp + 2.0 * wp * fp * fp + 2.0 * w * fpp;
            const double F_tp = fttp * fp + ftt * fpp + ftp * ftp + ft * ftpp;
            const double G_tt = 2.0 * ftp * ftp + 2.0 * fp * fttp + 2.0 * wp * ft * ft * S + 2.0 * w * ftt * S +
                                4.0 * w * ft * St + uu * Stt;
            const double m1 = detail::det3(-0.5 * E_pp + F_tp - 0.5 * G_tt, 0.5 * E_t, F_t - 0.5 * E_p,
                                           F_p - 0.5 * G_t, E, F, 0.5 * G_p, F, G);
            const double m2 = detail::det3(0.0, 0.5 * E_p, 0.5 * G_t, 0.5 * E_p, E, F, 0.5 * G_t, F, G);

            g.height[n] = f;
            g.u[n] = u;
            g.du[n] = u1;
            g.ddu[n] = u2;
            g.w[n] = W;
            g.area_density[n] = uu * W;
            g.mean_curvature[n] = H;
            g.a_norm2[n] = A2;
            g.gauss_curvature[n] = (m1 - m2) / (det * det);
            g.gauss_curvature_from_equation[n] = 0.5 * (R - 2.0 * ric_nn + H * H - A2);
            g.scalar_curvature[n] = R;
            g.ric_nn[n] = ric_nn;
            g.e_norm2[n] = q2 / (uu * uu);
            g.e_normal[n] = g.q / (uu * W);
            g.nu_s[n] = 1.0 / W;
            g.nu_theta[n] = -ft / (uu * W);
            g.nu_phi[n] = -fp / (uu * S * W);
            g.h_inv_tt[n] = hi_tt;
            g.h_inv_tp[n] = hi_tp;
            g.h_inv_pp[n] = hi_pp;
        }
    }
    detail::finish_integrals(g);
    return g;
}

inline double area(const SurfaceGeometry& g) { return g.area; }
inline double area(const GraphSurface& s) { return induced_geometry(s).area; }

/// (1/4 pi) times the flux of E through the surface.
inline double charge(const SurfaceGeometry& g) { return g.charge; }
inline double charge(const GraphSurface& s) { return induced_geometry(s).charge; }

/// m_CH on the slice through p: (u/2)(1 - u'^2 - zeta u^2/6 + Q^2/u^2).
inline double slice_hawking_mass(const ProfileSample& p, double q, double zeta) {
    return 0.5 * p.u * (1.0 - p.du * p.du - zeta * p.u * p.u / 6.0 + q * q / (p.u * p.u));
}

/// Charged Hawking mass; zeta defaults to 2 Lambda, the infimum of R - 2|E|^2 on the models.
inline double charged_hawking_mass(const SurfaceGeometry& g, std::optional<double> zeta = std::nullopt) {
    const double z = zeta.value_or(2.0 * g.lambda);
    if (g.closed_form) {
        return slice_hawking_mass({g.slice_s, g.u[0], g.du[0], g.ddu[0]}, g.q, z);
    }
    const double P = g.area, pi = std::numbers::pi;
    return std::sqrt(P / (16.0 * pi)) *
           (1.0 - (g.h2_integral + 2.0 / 3.0 * z * P) / (16.0 * pi) + 4.0 * pi * g.charge * g.charge / P);
}

inline double charged_hawking_mass(const GraphSurface& s, std::optional<double> zeta = std::nullopt,
                                   GeometryOptions opts = {}) {
    return charged_hawking_mass(induced_geometry(s, opts), zeta);
}

/// Tangential inner product <grad a, grad b>_h of two node fields on the surface.
inline ScalarField gradient_dot(const SurfaceGeometry& g, const ScalarField& a, const ScalarField& b) {
    const auto da = field_derivatives(a), db = field_derivatives(b);
    ScalarField out(g.grid);
    for (std::size_t n = 0; n < out.size(); ++n) {
        out[n] = g.h_inv_tt[n] * da.t[n] * db.t[n] + g.h_inv_tp[n] * (da.t[n] * db.p[n] + da.p[n] * db.t[n]) +
                 g.h_inv_pp[n] * da.p[n] * db.p[n];
    }
    return out;
}

}  // namespace chmlab
