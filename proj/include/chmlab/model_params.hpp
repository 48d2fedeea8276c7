#pragma once

// Parameter space of the Reissner-Nordstrom-de Sitter (RNdS) family and its
// charged Nariai limit: the lapse polynomial, horizon roots and their
// classification, the three-horizon mass window, and surface gravities.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "chmlab/errors.hpp"

namespace chmlab {

/// Mass m, charge Q and cosmological constant Lambda of g_{m,Q,Lambda}.
struct ModelParams {
    double m = 0.0;
    double q = 0.0;
    double lambda = 1.0;
};

/// Two roots closer than this (relative to max(1, r)) are one multiple root.
inline constexpr double kDoubleRootTol = 1e-6;

/// f(r) = 1 - Lambda r^2/3 + Q^2/r^2 - 2m/r, the squared lapse rho(r)^2.
inline double lapse_squared(double r, const ModelParams& p) {
    if (!(r > 0.0)) throw DomainError("lapse_squared: radius must be positive");
    return 1.0 - p.lambda * r * r / 3.0 + p.q * p.q / (r * r) - 2.0 * p.m / r;
}

/// f'(r).
inline double lapse_squared_d1(double r, const ModelParams& p) {
    if (!(r > 0.0)) throw DomainError("lapse_squared_d1: radius must be positive");
    return -2.0 * p.lambda * r / 3.0 - 2.0 * p.q * p.q / (r * r * r) + 2.0 * p.m / (r * r);
}

/// f''(r).
inline double lapse_squared_d2(double r, const ModelParams& p) {
    if (!(r > 0.0)) throw DomainError("lapse_squared_d2: radius must be positive");
    return -2.0 * p.lambda / 3.0 + 6.0 * p.q * p.q / (r * r * r * r) - 4.0 * p.m / (r * r * r);
}

/// Horizon quartic Lambda/3 r^4 - r^2 + 2 m r - Q^2; equals -r^2 f(r).
inline double horizon_quartic(double r, const ModelParams& p) {
    return ((p.lambda / 3.0 * r * r - 1.0) * r + 2.0 * p.m) * r - p.q * p.q;
}

inline double horizon_quartic_d1(double r, const ModelParams& p) {
    return (4.0 * p.lambda / 3.0 * r * r - 2.0) * r + 2.0 * p.m;
}

/// Slice mass m(r) = (r/2)(1 - Lambda r^2/3 + Q^2/r^2 - f), recovered from a lapse value.
inline double mass_from_lapse(double r, double lapse_sq, double q, double lambda) {
    return 0.5 * r * (1.0 - lambda * r * r / 3.0 + q * q / (r * r) - lapse_sq);
}

enum class HorizonClass {
    three_distinct_positive,  // generic RNdS: r- < r+ < rc and one negative root
    double_outer,             // charged Nariai: r+ = rc
    double_inner,             // cold limit: r- = r+
    degenerate,
};

inline std::string to_string(HorizonClass c) {
    switch (c) {
        case HorizonClass::three_distinct_positive: return "three-distinct-positive";
        case HorizonClass::double_outer: return "double-outer";
        case HorizonClass::double_inner: return "double-inner";
        case HorizonClass::degenerate: return "degenerate";
    }
    return "degenerate";
}

struct HorizonRoot {
    double r = 0.0;
    int multiplicity = 1;
};

struct HorizonStructure {
    std::vector<HorizonRoot> roots;  // real roots, ascending
    HorizonClass classification = HorizonClass::degenerate;
    std::optional<double> r_minus;
    std::optional<double> r_plus;
    std::optional<double> r_c;
    double max_residual = 0.0;  // max |quartic| over reported roots

    int real_multiplicity() const {
        int n = 0;
        for (const auto& root : roots) n += root.multiplicity;
        return n;
    }
};

namespace detail {

// Monic form r^4 + c2 r^2 + c1 r + c0 of the horizon quartic.
struct MonicQuartic {
    double c2, c1, c0;

    double value(double r) const { return ((r * r + c2) * r + c1) * r + c0; }
    double d1(double r) const { return (4.0 * r * r + 2.0 * c2) * r + c1; }
    double d2(double r) const { return 12.0 * r * r + 2.0 * c2; }
    double d3(double r) const { return 24.0 * r; }
};

// Newton on g with derivative dg; a step is kept only if it does not increase |g|.
template <class G, class DG>
double polish(double r, G g, DG dg, int max_iter) {
    double gr = g(r);
    for (int it = 0; it < max_iter && gr != 0.0; ++it) {
        const double d = dg(r);
        if (d == 0.0 || !std::isfinite(d)) break;
        const double next = r - gr / d;
        const double gn = g(next);
        if (!(std::abs(gn) <= std::abs(gr))) break;
        r = next;
        gr = gn;
    }
    return r;
}

}  // namespace detail

/// Real roots of the horizon quartic via companion-matrix eigenvalues,
/// Newton polishing, and merging of near-coincident roots.
inline HorizonStructure horizon_roots(const ModelParams& p) {
    if (!(p.lambda > 0.0)) throw DomainError("horizon_roots: requires Lambda > 0");

    const detail::MonicQuartic poly{-3.0 / p.lambda, 6.0 * p.m / p.lambda, -3.0 * p.q * p.q / p.lambda};

    Eigen::Matrix4d companion = Eigen::Matrix4d::Zero();
    companion(1, 0) = 1.0;
    companion(2, 1) = 1.0;
    companion(3, 2) = 1.0;
    companion(0, 3) = -poly.c0;
    companion(1, 3) = -poly.c1;
    companion(2, 3) = -poly.c2;
    companion(3, 3) = 0.0;

    Eigen::EigenSolver<Eigen::Matrix4d> solver(companion, false);
    const auto eig = solver.eigenvalues();

    std::vector<double> real;
    for (int i = 0; i < 4; ++i) {
        const std::complex<double> z = eig(i);
        if (std::abs(z.imag()) <= kDoubleRootTol * std::max(1.0, std::abs(z.real()))) {
            const double r = detail::polish(
                z.real(), [&](double x) { return poly.value(x); }, [&](double x) { return poly.d1(x); }, 5);
            real.push_back(r);
        }
    }
    std::sort(real.begin(), real.end());

    HorizonStructure out;
    for (std::size_t i = 0; i < real.size();) {
        std::size_t j = i + 1;
        double sum = real[i];
        while (j < real.size() &&
               std::abs(real[j] - real[j - 1]) <= kDoubleRootTol * std::max(1.0, std::abs(real[j - 1]))) {
            sum += real[j];
            ++j;
        }
        const int mult = static_cast<int>(j - i);
        double r = sum / mult;
        // A k-fold root of the quartic is a simple root of its (k-1)-th derivative.
        if (mult == 2) {
            r = detail::polish(r, [&](double x) { return poly.d1(x); }, [&](double x) { return poly.d2(x); }, 8);
        } else if (mult == 3) {
            r = detail::polish(r, [&](double x) { return poly.d2(x); }, [&](double x) { return poly.d3(x); }, 8);
        }
        out.roots.push_back({r, mult});
        out.max_residual = std::max(out.max_residual, std::abs(horizon_quartic(r, p)));
        i = j;
    }

    if (out.real_multiplicity() != 4) return out;

    std::vector<HorizonRoot> positive;
    int negative = 0;
    for (const auto& root : out.roots) {
        if (root.r > 0.0) {
            positive.push_back(root);
        } else if (root.r < 0.0) {
            negative += root.multiplicity;
        }
    }
    if (negative != 1) return out;

    if (positive.size() == 3) {
        out.classification = HorizonClass::three_distinct_positive;
        out.r_minus = positive[0].r;
        out.r_plus = positive[1].r;
        out.r_c = positive[2].r;
    } else if (positive.size() == 2 && positive[0].multiplicity == 1 && positive[1].multiplicity == 2) {
        out.classification = HorizonClass::double_outer;
        out.r_minus = positive[0].r;
        out.r_plus = positive[1].r;
        out.r_c = positive[1].r;
    } else if (positive.size() == 2 && positive[0].multiplicity == 2 && positive[1].multiplicity == 1) {
        out.classification = HorizonClass::double_inner;
        out.r_minus = positive[0].r;
        out.r_plus = positive[0].r;
        out.r_c = positive[1].r;
    }
    return out;
}

struct MassWindow {
    double m_min = 0.0;
    double m_max = 0.0;

    bool contains(double m) const { return m_min < m && m < m_max; }
};

/// Evaluates the two closed-form mass bounds for 0 <= Q^2 <= 1/(4 Lambda)
/// without the strict-window check, so the collapsed endpoint can be inspected.
inline MassWindow mass_window_bounds(double q, double lambda) {
    if (!(lambda > 0.0)) throw DomainError("mass_window_bounds: requires Lambda > 0");
    const double disc = 1.0 - 4.0 * lambda * q * q;
    if (disc < 0.0) throw DomainError("mass_window_bounds: Q^2 exceeds 1/(4 Lambda)");
    const double s = std::sqrt(disc);
    const double scale = 3.0 * std::sqrt(2.0 * lambda);
    return {(2.0 + s) / scale * std::sqrt(1.0 - s), (2.0 - s) / scale * std::sqrt(1.0 + s)};
}

/// Open mass interval in which the horizon quartic has three distinct positive
/// roots and one negative root. Requires 0 < Q^2 < 1/(4 Lambda).
inline MassWindow admissible_window(double q, double lambda) {
    if (!(lambda > 0.0)) throw DomainError("admissible_window: requires Lambda > 0");
    if (q == 0.0 || !(q * q < 1.0 / (4.0 * lambda))) {
        throw DomainError("admissible_window: window undefined unless 0 < Q^2 < 1/(4 Lambda)");
    }
    return mass_window_bounds(q, lambda);
}

/// Charged Nariai data for double-root radius alpha.
struct NariaiParams {
    double alpha = 0.0;
    double lambda = 1.0;
    double m = 0.0;
    double q2 = 0.0;
    double r_minus = 0.0;
    double omega = 0.0;  // potential V(s) = sin(omega s)

    double q() const { return std::sqrt(q2); }
    ModelParams model() const { return {m, q(), lambda}; }
};

inline NariaiParams nariai_from_alpha(double alpha, double lambda = 1.0) {
    if (!(lambda > 0.0)) throw DomainError("nariai_from_alpha: requires Lambda > 0");
    const double a2 = alpha * alpha;
    if (!(alpha > 0.0) || !(a2 > 0.5 / lambda) || !(a2 < 1.0 / lambda)) {
        throw DomainError("nariai_from_alpha: alpha^2 must lie in (1/(2 Lambda), 1/Lambda)");
    }
    NariaiParams n;
    n.alpha = alpha;
    n.lambda = lambda;
    n.m = alpha * (1.0 - 2.0 / 3.0 * lambda * a2);
    n.q2 = a2 * (1.0 - lambda * a2);
    n.r_minus = std::sqrt(3.0 / lambda - 2.0 * a2) - alpha;
    n.omega = std::sqrt(lambda - n.q2 / (a2 * a2));
    return n;
}

/// Parameters whose lapse vanishes at the neck radius a (a minimal slice).
inline ModelParams params_from_neck(double a, double q, double lambda = 1.0) {
    if (!(a > 0.0)) throw DomainError("params_from_neck: neck radius must be positive");
    return {0.5 * a * (1.0 - lambda * a * a / 3.0 + q * q / (a * a)), q, lambda};
}

/// Surface gravity k = |f'(r_h)|/2, the horizon value of |grad V| for V = sqrt(f).
inline double surface_gravity(double r_h, const ModelParams& p) {
    if (!(r_h > 0.0)) throw DomainError("surface_gravity: radius must be positive");
    if (std::abs(lapse_squared(r_h, p)) > kDoubleRootTol) {
        throw DomainError("surface_gravity: r_h is not a root of the lapse");
    }
    return 0.5 * std::abs(lapse_squared_d1(r_h, p));
}

}  // namespace chmlab
