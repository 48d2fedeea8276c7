#pragma once

// Warped-product slice metric g = ds^2 + u(s)^2 g_{S^2} generated by the
// profile ODE  u'' = (1 - u'^2)/(2u) - (Lambda u^4 + Q^2)/(2u^3),
// integrated from a neck (u, u') = (a, 0) and mirrored to negative s.

#include <algorithm>
#include <array>
#include <cmath>
#include <initializer_list>
#include <iterator>
#include <numbers>
#include <utility>
#include <vector>

#include "chmlab/errors.hpp"
#include "chmlab/model_params.hpp"
#include "chmlab/quadrature.hpp"

namespace chmlab {

enum class ProfileKind { rnds, nariai };

enum class StepControl {
    proportional_integral,  // Gustafsson PI controller
    integral,               // classical err^(-1/5) controller
};

struct ProfileSample {
    double s = 0.0;
    double u = 0.0;
    double du = 0.0;
    double ddu = 0.0;
};

/// Right-hand side of the profile ODE.
inline double profile_rhs(double u, double du, double q, double lambda) {
    return 0.5 * (1.0 - du * du) / u - 0.5 * (lambda * u * u * u * u + q * q) / (u * u * u);
}

namespace detail {

// Dormand-Prince 5(4) tableau.
struct DP5 {
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                            a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                            a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                            b6 = 11.0 / 84;
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                            e6 = 22.0 / 525, e7 = -1.0 / 40;
};

using State = std::array<double, 2>;  // (u, u')

struct StepResult {
    State y;
    State err;
};

inline State profile_field(const State& y, double q, double lambda) {
    return {y[1], profile_rhs(y[0], y[1], q, lambda)};
}

inline StepResult dp5_step(const State& y, double h, double q, double lambda) {
    using T = DP5;
    auto f = [&](const State& x) { return profile_field(x, q, lambda); };
    auto comb = [&](std::initializer_list<std::pair<double, const State*>> terms) {
        State out = y;
        for (const auto& [c, k] : terms) {
            out[0] += h * c * (*k)[0];
            out[1] += h * c * (*k)[1];
        }
        return out;
    };
    const State k1 = f(y);
    const State k2 = f(comb({{T::a21, &k1}}));
    const State k3 = f(comb({{T::a31, &k1}, {T::a32, &k2}}));
    const State k4 = f(comb({{T::a41, &k1}, {T::a42, &k2}, {T::a43, &k3}}));
    const State k5 = f(comb({{T::a51, &k1}, {T::a52, &k2}, {T::a53, &k3}, {T::a54, &k4}}));
    const State k6 = f(comb({{T::a61, &k1}, {T::a62, &k2}, {T::a63, &k3}, {T::a64, &k4}, {T::a65, &k5}}));
    const State y5 = comb({{T::b1, &k1}, {T::b3, &k3}, {T::b4, &k4}, {T::b5, &k5}, {T::b6, &k6}});
    const State k7 = f(y5);
    StepResult r;
    r.y = y5;
    for (int i = 0; i < 2; ++i) {
        r.err[i] = h * (T::e1 * k1[i] + T::e3 * k3[i] + T::e4 * k4[i] + T::e5 * k5[i] + T::e6 * k6[i] +
                        T::e7 * k7[i]);
    }
    return r;
}

}  // namespace detail

/// Immutable sampled solution of the profile ODE on [-s_max, s_max].
/// Evaluation between accepted steps restarts one Dormand-Prince step from
/// the nearest node on the left, which reproduces the node values exactly.
class RadialProfile {
public:
    struct Node {
        double s, u, du;
    };

    double a() const { return a_; }
    double q() const { return q_; }
    double lambda() const { return lambda_; }
    double m() const { return m_; }
    double s_max() const { return s_max_; }
    double tol() const { return tol_; }
    ProfileKind kind() const { return kind_; }
    const std::vector<Node>& nodes() const { return nodes_; }
    ModelParams params() const { return {m_, q_, lambda_}; }

    bool contains(double s) const { return std::abs(s) <= s_max_; }

    ProfileSample evaluate(double s) const {
        if (!contains(s)) throw DomainError("RadialProfile: arclength outside integrated range");
        const double as = std::abs(s);
        auto it = std::upper_bound(nodes_.begin(), nodes_.end(), as,
                                   [](double x, const Node& n) { return x < n.s; });
        const Node& left = *std::prev(it);
        double u = left.u, du = left.du;
        const double h = as - left.s;
        if (h > 0.0) {
            const auto step = detail::dp5_step({left.u, left.du}, h, q_, lambda_);
            u = step.y[0];
            du = step.y[1];
        }
        const double sign = s < 0.0 ? -1.0 : 1.0;
        return {s, u, sign * du, profile_rhs(u, du, q_, lambda_)};
    }

    /// Accepted nodes mirrored through the neck, ascending in s.
    std::vector<ProfileSample> samples() const {
        std::vector<ProfileSample> out;
        out.reserve(2 * nodes_.size());
        for (auto it = nodes_.rbegin(); it != nodes_.rend(); ++it) {
            if (it->s == 0.0) continue;
            out.push_back({-it->s, it->u, -it->du, profile_rhs(it->u, it->du, q_, lambda_)});
        }
        for (const auto& n : nodes_) out.push_back({n.s, n.u, n.du, profile_rhs(n.u, n.du, q_, lambda_)});
        return out;
    }

    friend RadialProfile integrate_profile(double, double, double, double, double, StepControl);

private:
    double a_ = 0.0, q_ = 0.0, lambda_ = 1.0, m_ = 0.0, s_max_ = 0.0, tol_ = 0.0;
    ProfileKind kind_ = ProfileKind::rnds;
    std::vector<Node> nodes_;
};

/// Adaptive Dormand-Prince integration of the profile ODE from the neck (a, 0).
inline RadialProfile integrate_profile(double a, double q, double lambda, double s_max, double tol,
                                       StepControl control = StepControl::proportional_integral) {
    if (!(a > 0.0)) throw DomainError("integrate_profile: neck radius must be positive");
    if (!(tol >= 1e-14 && tol <= 1e-6)) throw DomainError("integrate_profile: tol must lie in [1e-14, 1e-6]");
    if (!(s_max >= 0.0) || !std::isfinite(s_max)) throw DomainError("integrate_profile: s_max must be >= 0");

    const double ddu0 = profile_rhs(a, 0.0, q, lambda);
    const double scale = std::max(1.0, 1.0 / a);
    // A neck with u''(0) < 0 is a maximal slice, i.e. the cosmological end of the static region.
    if (ddu0 < -1e-12 * scale) throw DomainError("integrate_profile: neck not in the positive-lapse regime");

    RadialProfile prof;
    prof.a_ = a;
    prof.q_ = q;
    prof.lambda_ = lambda;
    prof.m_ = params_from_neck(a, q, lambda).m;
    prof.s_max_ = s_max;
    prof.tol_ = tol;
    prof.kind_ = std::abs(ddu0) <= 1e-12 * scale ? ProfileKind::nariai : ProfileKind::rnds;
    prof.nodes_.push_back({0.0, a, 0.0});

    constexpr double safety = 0.9, min_fac = 0.2, max_fac = 5.0;
    double s = 0.0;
    detail::State y{a, 0.0};
    double h = std::min(s_max, 0.01);
    double err_prev = 1.0;
    std::size_t steps = 0;
    while (s < s_max) {
        if (++steps > 5'000'000) throw IntegrationError("integrate_profile: step budget exhausted", s);
        if (s_max - s <= 1e-13 * std::max(1.0, s_max)) {
            prof.nodes_.back().s = s_max;
            break;
        }
        if (s + h > s_max) h = s_max - s;
        if (h <= 1e-14 * std::max(1.0, s)) throw IntegrationError("integrate_profile: step size collapsed", s);

        const auto step = detail::dp5_step(y, h, q, lambda);
        double err = 0.0;
        for (int i = 0; i < 2; ++i) {
            const double sc = tol + tol * std::max(std::abs(y[i]), std::abs(step.y[i]));
            err = std::max(err, std::abs(step.err[i]) / sc);
        }
        if (!std::isfinite(err) || !(step.y[0] > 0.0)) {
            if (h <= 1e-12 * std::max(1.0, s)) {
                throw IntegrationError(step.y[0] > 0.0 ? "integrate_profile: solution diverged"
                                                       : "integrate_profile: area radius reached zero",
                                       s);
            }
            h *= min_fac;
            continue;
        }
        if (err <= 1.0) {
            s = (s + h >= s_max) ? s_max : s + h;
            y = step.y;
            prof.nodes_.push_back({s, y[0], y[1]});
            double fac = control == StepControl::proportional_integral
                             ? safety * std::pow(std::max(err, 1e-10), -0.7 / 5.0) * std::pow(err_prev, 0.4 / 5.0)
                             : safety * std::pow(std::max(err, 1e-10), -1.0 / 5.0);
            h *= std::clamp(fac, min_fac, max_fac);
            err_prev = std::max(err, 1e-4);
        } else {
            h *= std::max(min_fac, safety * std::pow(err, -1.0 / 5.0));
        }
    }
    return prof;
}

/// I(s) = (u/2)(1 - u'^2 - Lambda u^2/3 + Q^2/u^2); conserved by the profile ODE.
inline double first_integral(const RadialProfile& prof, double s) {
    const auto p = prof.evaluate(s);
    return 0.5 * p.u * (1.0 - p.du * p.du - prof.lambda() * p.u * p.u / 3.0 + prof.q() * prof.q() / (p.u * p.u));
}

struct CurvatureScalars {
    double scalar = 0.0;   // ambient scalar curvature R
    double ric_nn = 0.0;   // Ric(d_s, d_s)
    double k_slice = 0.0;  // Gauss curvature of the slice
    double h_slice = 0.0;  // mean curvature, H = -2u'/u for normal +d_s
    double a2_slice = 0.0; // |A|^2 = H^2/2 (umbilic)
};

inline CurvatureScalars curvature_scalars(const ProfileSample& p) {
    CurvatureScalars c;
    c.scalar = -4.0 * p.ddu / p.u + 2.0 * (1.0 - p.du * p.du) / (p.u * p.u);
    c.ric_nn = -2.0 * p.ddu / p.u;
    c.k_slice = 1.0 / (p.u * p.u);
    c.h_slice = -2.0 * p.du / p.u;
    c.a2_slice = 0.5 * c.h_slice * c.h_slice;
    return c;
}

inline CurvatureScalars curvature_scalars(const RadialProfile& prof, double s) {
    return curvature_scalars(prof.evaluate(s));
}

struct ElectricFieldSample {
    double magnitude = 0.0;  // |E| = |Q|/u^2, directed along d_s
    double flux = 0.0;       // integral of <E, d_s> over the slice = 4 pi Q
};

inline ElectricFieldSample electric_field(const RadialProfile& prof, double s) {
    const auto p = prof.evaluate(s);
    const double signed_e = prof.q() / (p.u * p.u);
    return {std::abs(signed_e), signed_e * 4.0 * std::numbers::pi * p.u * p.u};
}

/// s(r) = integral of f^{-1/2} from r+ to r on (r+, rc). The lapse is evaluated in
/// factored form -(Lambda/3) prod(xi - r_j)/xi^2 and the endpoint singularity is
/// removed with xi = r+ + eta^2 (or xi = rc - eta^2 on the upper half).
inline double arclength_from_r(const ModelParams& p, double r) {
    const auto hs = horizon_roots(p);
    if (hs.classification != HorizonClass::three_distinct_positive) {
        throw DomainError("arclength_from_r: requires three distinct positive horizons");
    }
    const double rp = *hs.r_plus, rc = *hs.r_c;
    if (!(r > rp && r < rc)) throw DomainError("arclength_from_r: r outside (r+, rc)");

    std::array<double, 4> roots{};
    for (std::size_t i = 0; i < 4; ++i) roots[i] = hs.roots[i].r;
    const double lam3 = p.lambda / 3.0;
    // xi / sqrt(|P(xi) / (xi - skip)|): the integrand after the substitution, divided by 2.
    auto reduced = [&](double xi, double skip) {
        double prod = 1.0;
        for (double rj : roots) {
            if (rj != skip) prod *= (xi - rj);
        }
        return xi / std::sqrt(lam3 * std::abs(prod));
    };

    const double mid = 0.5 * (rp + rc);
    auto lower = [&](double upper) {
        return integrate_adaptive([&](double eta) { return 2.0 * reduced(rp + eta * eta, rp); }, 0.0,
                                  std::sqrt(upper - rp));
    };
    if (r <= mid) return lower(r);
    const double upper_part = integrate_adaptive([&](double eta) { return 2.0 * reduced(rc - eta * eta, rc); },
                                                 std::sqrt(rc - r), std::sqrt(rc - mid));
    return lower(mid) + upper_part;
}

}  // namespace chmlab
