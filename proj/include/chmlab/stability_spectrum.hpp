#pragma once

// Jacobi operator L = Delta + Ric(nu,nu) + |A|^2 on slices and graphs.
// lambda_1 is the bottom of J(phi) = -int phi L phi / int phi^2, so strict
// stability means lambda_1 > 0.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "chmlab/errors.hpp"
#include "chmlab/surface_geometry.hpp"

namespace chmlab {

/// -Ric(nu,nu) on the minimal slice of area radius a: -Lambda + 1/a^2 - Q^2/a^4.
inline double lambda1_analytic(double a, double q, double lambda = 1.0) {
    if (!(a > 0.0)) throw DomainError("lambda1_analytic: radius must be positive");
    const double a2 = a * a;
    return -lambda + 1.0 / a2 - q * q / (a2 * a2);
}

/// Range of a^2 with lambda1_analytic > 0, i.e. Lambda a^4 - a^2 + Q^2 < 0.
/// At Q^2 = 1/(4 Lambda) both ends coincide; beyond it there is no window.
inline std::optional<std::pair<double, double>> stability_window(double q, double lambda = 1.0) {
    if (!(lambda > 0.0)) throw DomainError("stability_window: requires Lambda > 0");
    const double disc = 1.0 - 4.0 * lambda * q * q;
    if (disc < 0.0) return std::nullopt;
    const double s = std::sqrt(disc);
    return std::pair{(1.0 - s) / (2.0 * lambda), (1.0 + s) / (2.0 * lambda)};
}

inline bool inside_stability_window(double a, double q, double lambda = 1.0) {
    const auto w = stability_window(q, lambda);
    return w && w->first < a * a && a * a < w->second;
}

struct JacobiMode {
    double eigenvalue = 0.0;
    HarmonicCoeffs coeffs;  // lowest mode, normalized so that int phi^2 dA = 1
};

namespace detail {

// Galerkin matrices of the quadratic form in the real harmonic basis through lmax:
// K_ij = int (<grad Y_i, grad Y_j>_h - V Y_i Y_j) dA, M_ij = int Y_i Y_j dA.
inline std::pair<Eigen::MatrixXd, Eigen::MatrixXd> galerkin(const SurfaceGeometry& g, int lmax, bool with_potential) {
    const auto& grid = *g.grid;
    const int nb = (lmax + 1) * (lmax + 1);
    const std::size_t nn = grid.size();
    Eigen::MatrixXd val(nn, nb), dt(nn, nb), dp(nn, nb);
    for (int l = 0; l <= lmax; ++l) {
        for (int m = -l; m <= l; ++m) {
            HarmonicCoeffs c(l);
            c(l, m) = 1.0;
            const auto d = synthesize_derivatives(c, grid);
            const int b = HarmonicCoeffs::index(l, m);
            for (std::size_t n = 0; n < nn; ++n) {
                val(n, b) = d.v[n];
                dt(n, b) = d.t[n];
                dp(n, b) = d.p[n];
            }
        }
    }
    Eigen::VectorXd wt(nn), wtt(nn), wtp(nn), wpp(nn), wv(nn);
    for (int j = 0; j < grid.n_theta(); ++j) {
        for (int k = 0; k < grid.n_phi(); ++k) {
            const std::size_t n = grid.node(j, k);
            const double dA = grid.weight(j) * g.area_density[n];
            wt(n) = dA;
            wtt(n) = dA * g.h_inv_tt[n];
            wtp(n) = dA * g.h_inv_tp[n];
            wpp(n) = dA * g.h_inv_pp[n];
            wv(n) = with_potential ? dA * (g.ric_nn[n] + g.a_norm2[n]) : 0.0;
        }
    }
    Eigen::MatrixXd M = val.transpose() * wt.asDiagonal() * val;
    Eigen::MatrixXd cross = dt.transpose() * wtp.asDiagonal() * dp;
    Eigen::MatrixXd K = dt.transpose() * wtt.asDiagonal() * dt + dp.transpose() * wpp.asDiagonal() * dp + cross +
                        cross.transpose() - val.transpose() * wv.asDiagonal() * val;
    K = 0.5 * (K + K.transpose());
    M = 0.5 * (M + M.transpose());
    return {K, M};
}

inline Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> solve_galerkin(const Eigen::MatrixXd& K,
                                                                               const Eigen::MatrixXd& M) {
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(K, M);
    if (es.info() != Eigen::Success) {
        throw NumericError("generalized eigensolve did not converge", (K - K.transpose()).norm());
    }
    const Eigen::VectorXd v = es.eigenvectors().col(0);
    const double residual = (K * v - es.eigenvalues()(0) * M * v).norm();
    if (!std::isfinite(residual) || residual > 1e-8 * std::max(1.0, K.norm())) {
        throw NumericError("generalized eigensolve residual too large", residual);
    }
    return es;
}

}  // namespace detail

/// Lowest eigenpair of the Jacobi quadratic form over harmonics of degree <= lmax.
inline JacobiMode jacobi_lowest_mode(const SurfaceGeometry& g, int lmax = 8) {
    if (lmax < 0 || lmax > g.grid->lmax()) throw UsageError("jacobi_lowest_mode: lmax outside grid band");
    const auto [K, M] = detail::galerkin(g, lmax, true);
    const auto es = detail::solve_galerkin(K, M);
    JacobiMode out{es.eigenvalues()(0), HarmonicCoeffs(lmax)};
    const Eigen::VectorXd v = es.eigenvectors().col(0);
    for (int i = 0; i < v.size(); ++i) out.coeffs.data()[i] = v(i);
    return out;
}

inline double lambda1_discrete(const SurfaceGeometry& g, int lmax = 8) { return jacobi_lowest_mode(g, lmax).eigenvalue; }

inline double lambda1_discrete(const GraphSurface& s, int lmax = 8) {
    return lambda1_discrete(induced_geometry(s, {true}), lmax);
}

/// First k eigenvalues of -Delta on the round sphere of radius a: l(l+1)/a^2, multiplicity 2l+1.
inline std::vector<double> laplace_spectrum(double a, int k) {
    if (!(a > 0.0)) throw DomainError("laplace_spectrum: radius must be positive");
    if (k < 0) throw UsageError("laplace_spectrum: negative count");
    std::vector<double> out;
    for (int l = 0; static_cast<int>(out.size()) < k; ++l) {
        for (int m = 0; m < 2 * l + 1 && static_cast<int>(out.size()) < k; ++m) out.push_back(l * (l + 1.0) / (a * a));
    }
    return out;
}

/// First k eigenvalues of -Delta on the surface by the same Galerkin discretization.
inline std::vector<double> laplace_spectrum_discrete(const SurfaceGeometry& g, int k, int lmax = 8) {
    if (k > (lmax + 1) * (lmax + 1)) throw UsageError("laplace_spectrum_discrete: k exceeds basis size");
    const auto [K, M] = detail::galerkin(g, lmax, false);
    const auto es = detail::solve_galerkin(K, M);
    std::vector<double> out;
    for (int i = 0; i < k; ++i) out.push_back(std::max(0.0, es.eigenvalues()(i)));
    std::sort(out.begin(), out.end());
    return out;
}

/// (lambda_1 + 1)|Sigma| + 16 pi^2 Q^2/|Sigma| - 4 pi on the minimal slice (Lambda = 1).
inline double prop41_identity_check(double a, double q) {
    const double pi = std::numbers::pi;
    const double area = 4.0 * pi * a * a;
    return (lambda1_analytic(a, q, 1.0) + 1.0) * area + 16.0 * pi * pi * q * q / area - 4.0 * pi;
}

struct SpectralReport {
    double a = 0.0, q = 0.0, lambda = 1.0;
    double lambda1_analytic = 0.0;
    double lambda1_discrete = 0.0;
    std::vector<double> laplace_eigenvalues;           // analytic, radius a
    std::vector<double> laplace_eigenvalues_discrete;  // Galerkin on the neck slice
    std::optional<std::pair<double, double>> window;
    double gap_identity_residual = 0.0;  // 2/a^2 - 8 pi/|Sigma|
    double prop41_residual = 0.0;
};

inline SpectralReport spectral_report(double a, double q, double lambda = 1.0, int n_theta = 32, int k = 10,
                                      int lmax = 8) {
    const auto grid = build_grid(n_theta, 2 * n_theta);
    const auto prof = share_profile(integrate_profile(a, q, lambda, 0.0, 1e-12));
    const auto geom = induced_geometry(make_slice(prof, 0.0, grid), {true});
    SpectralReport r;
    r.a = a;
    r.q = q;
    r.lambda = lambda;
    r.lambda1_analytic = lambda1_analytic(a, q, lambda);
    r.lambda1_discrete = lambda1_discrete(geom, lmax);
    r.laplace_eigenvalues = laplace_spectrum(a, k);
    r.laplace_eigenvalues_discrete = laplace_spectrum_discrete(geom, k, lmax);
    r.window = stability_window(q, lambda);
    r.gap_identity_residual = 2.0 / (a * a) - 8.0 * std::numbers::pi / geom.area;
    r.prop41_residual = prop41_identity_check(a, q);
    return r;
}

}  // namespace chmlab
