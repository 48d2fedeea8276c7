#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <utility>
#include <vector>

#include "chmlab/errors.hpp"

namespace chmlab {

struct GaussLegendreRule {
    std::vector<double> nodes;    // ascending in (-1, 1)
    std::vector<double> weights;  // sum to 2
};

/// n-point Gauss-Legendre rule on [-1, 1] by Newton iteration on P_n.
inline GaussLegendreRule gauss_legendre(int n) {
    if (n < 1) throw UsageError("gauss_legendre: need at least one node");
    GaussLegendreRule rule;
    rule.nodes.assign(n, 0.0);
    rule.weights.assign(n, 0.0);
    const int half = (n + 1) / 2;
    for (int i = 0; i < half; ++i) {
        // Tricomi initial guess for the i-th largest root.
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = pk;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) <= 1e-16 * std::max(1.0, std::abs(x))) break;
        }
        // recompute derivative at the converged node
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= n; ++k) {
            const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = pk;
        }
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[n - 1 - i] = x;
        rule.nodes[i] = -x;
        rule.weights[n - 1 - i] = w;
        rule.weights[i] = w;
    }
    return rule;
}

namespace detail {

template <class F>
double gl_panel(const F& f, double a, double b, const GaussLegendreRule& rule) {
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double sum = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) sum += rule.weights[i] * f(mid + half * rule.nodes[i]);
    return half * sum;
}

template <class F>
double adaptive_gl(const F& f, double a, double b, double whole, double tol, const GaussLegendreRule& rule,
                   int depth) {
    const double mid = 0.5 * (a + b);
    const double left = gl_panel(f, a, mid, rule);
    const double right = gl_panel(f, mid, b, rule);
    if (std::abs(left + right - whole) <= tol || depth <= 0) return left + right;
    return adaptive_gl(f, a, mid, left, 0.5 * tol, rule, depth - 1) +
           adaptive_gl(f, mid, b, right, 0.5 * tol, rule, depth - 1);
}

}  // namespace detail

/// Adaptive bisection with a 15-point Gauss-Legendre panel rule.
template <class F>
double integrate_adaptive(const F& f, double a, double b, double tol = 1e-13) {
    static const GaussLegendreRule rule = gauss_legendre(15);
    if (a == b) return 0.0;
    return detail::adaptive_gl(f, a, b, detail::gl_panel(f, a, b, rule), tol, rule, 40);
}

}  // namespace chmlab
