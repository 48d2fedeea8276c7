#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "chmlab/sphere_grid.hpp"

using namespace chmlab;
constexpr double kPi = std::numbers::pi;

TEST(SphereGrid, WeightsSumToSphereArea) {
    const auto g = build_grid(32, 64);
    double w = 0.0;
    for (int j = 0; j < g->n_theta(); ++j) w += g->weight(j) * g->n_phi();
    EXPECT_NEAR(w, 4 * kPi, 1e-13);
    EXPECT_NEAR(integrate(ScalarField(g, 1.0)), 4 * kPi, 1e-13);
}

TEST(SphereGrid, RejectsSmallGrids) {
    EXPECT_THROW(build_grid(7, 32), UsageError);
    EXPECT_THROW(build_grid(8, 15), UsageError);
    EXPECT_THROW(build_grid(16, 31), UsageError);
    EXPECT_NO_THROW(build_grid(8, 16));
}

TEST(SphereGrid, NoPoleNodes) {
    const auto g = build_grid(16, 32);
    for (int j = 0; j < g->n_theta(); ++j) {
        EXPECT_GT(g->sin_theta(j), 0.0);
        if (j > 0) {
            EXPECT_GT(g->theta(j), g->theta(j - 1));
        }
    }
}

TEST(Integrate, ZonalPolynomials) {
    const auto g = build_grid(32, 64);
    const auto c = ScalarField::from_function(g, [](double t, double) { return std::cos(t); });
    EXPECT_NEAR(integrate(c), 0.0, 1e-14);
    const auto c2 = ScalarField::from_function(g, [](double t, double) { return std::cos(t) * std::cos(t); });
    EXPECT_NEAR(integrate(c2), 4 * kPi / 3, 1e-12);
}

TEST(Integrate, GridMismatch) {
    const auto a = ScalarField(build_grid(16, 32), 1.0);
    const auto b = ScalarField(build_grid(16, 40), 1.0);
    EXPECT_THROW(integrate(a, b), UsageError);
}

TEST(ScalarField, RejectsBadValues) {
    const auto g = build_grid(8, 16);
    EXPECT_THROW(ScalarField(g, std::vector<double>(10, 0.0)), UsageError);
    std::vector<double> v(g->size(), 0.0);
    v[3] = std::nan("");
    EXPECT_THROW(ScalarField(g, v), UsageError);
}

TEST(Harmonics, Orthonormality) {
    const auto g = build_grid(24, 48);
    const int lmax = 12;
    std::vector<ScalarField> ys;
    for (int l = 0; l <= lmax; ++l) {
        for (int m = -l; m <= l; ++m) ys.push_back(harmonic_field(g, l, m));
    }
    double dev = 0.0;
    for (std::size_t i = 0; i < ys.size(); ++i) {
        for (std::size_t j = i; j < ys.size(); ++j) {
            dev = std::max(dev, std::abs(integrate(ys[i], ys[j]) - (i == j ? 1.0 : 0.0)));
        }
    }
    EXPECT_LE(dev, 1e-10);
}

TEST(Harmonics, AnalysisSynthesisRoundTripAndParseval) {
    const auto g = build_grid(32, 64);
    const auto f = random_c2_field(g, 11, 8, 0.3);
    const auto c = analyze(f);
    const auto back = synthesize(c, g);
    double dev = 0.0, sum2 = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) dev = std::max(dev, std::abs(back[i] - f[i]));
    for (double x : c.data()) sum2 += x * x;
    EXPECT_LE(dev, 1e-12);
    EXPECT_NEAR(integrate(f, f), sum2, 1e-10);
}

TEST(LaplaceBeltrami, Eigenfunctions) {
    const auto g = build_grid(32, 64);
    const auto c = ScalarField::from_function(g, [](double t, double) { return std::cos(t); });
    const auto p2 = ScalarField::from_function(g, [](double t, double) {
        return 0.5 * (3 * std::cos(t) * std::cos(t) - 1);
    });
    const auto lc = laplace_beltrami(c), lp = laplace_beltrami(p2), l1 = laplace_beltrami(ScalarField(g, 1.0));
    for (std::size_t i = 0; i < c.size(); ++i) {
        EXPECT_NEAR(lc[i], -2 * c[i], 1e-10);
        EXPECT_NEAR(lp[i], -6 * p2[i], 1e-10);
        EXPECT_NEAR(l1[i], 0.0, 1e-10);
    }
    for (int l = 0; l <= 16; ++l) {
        for (int m = -l; m <= l; m += std::max(1, l)) {
            const auto y = harmonic_field(g, l, m);
            const auto ly = laplace_beltrami(y);
            double dev = 0.0;
            for (std::size_t i = 0; i < y.size(); ++i) dev = std::max(dev, std::abs(ly[i] + l * (l + 1.0) * y[i]));
            EXPECT_LE(dev, 1e-10) << "l = " << l;
        }
    }
}

TEST(LaplaceBeltrami, Symmetric) {
    const auto g = build_grid(32, 64);
    const auto f = random_c2_field(g, 3, 8, 1.0), h = random_c2_field(g, 4, 8, 1.0);
    EXPECT_NEAR(integrate(f, laplace_beltrami(h)), integrate(h, laplace_beltrami(f)), 1e-9);
}

TEST(Derivatives, MatchAnalyticField) {
    // f = sin^2(t) cos(t) cos(2p) + sin(t) sin(p): a band-limited field with nonzero mixed derivatives.
    const auto g = build_grid(16, 32);
    const auto f = ScalarField::from_function(g, [](double t, double p) {
        return std::sin(t) * std::sin(t) * std::cos(t) * std::cos(2 * p) + std::sin(t) * std::sin(p);
    });
    const auto d = synthesize_derivatives(analyze(f), *g);
    for (int j = 0; j < g->n_theta(); ++j) {
        for (int k = 0; k < g->n_phi(); ++k) {
            const double t = g->theta(j), p = g->phi(k), s = std::sin(t), c = std::cos(t);
            const std::size_t n = g->node(j, k);
            const double a = s * s * c, at = 2 * s * c * c - s * s * s;
            const double att = 2 * c * c * c - 4 * s * s * c - 3 * s * s * c;
            EXPECT_NEAR(d.v[n], a * std::cos(2 * p) + s * std::sin(p), 1e-10);
            EXPECT_NEAR(d.t[n], at * std::cos(2 * p) + c * std::sin(p), 1e-10);
            EXPECT_NEAR(d.p[n], -2 * a * std::sin(2 * p) + s * std::cos(p), 1e-10);
            EXPECT_NEAR(d.tt[n], att * std::cos(2 * p) - s * std::sin(p), 1e-10);
            EXPECT_NEAR(d.tp[n], -2 * at * std::sin(2 * p) + c * std::cos(p), 1e-10);
            EXPECT_NEAR(d.pp[n], -4 * a * std::cos(2 * p) - s * std::sin(p), 1e-10);
            EXPECT_NEAR(d.ttp[n], -2 * att * std::sin(2 * p) - s * std::cos(p), 1e-10);
            EXPECT_NEAR(d.tpp[n], -4 * at * std::cos(2 * p) - c * std::sin(p), 1e-10);
        }
    }
}

TEST(C2Norm, CosThetaAndHomogeneity) {
    const auto g = build_grid(32, 64);
    EXPECT_EQ(c2_norm(ScalarField(g, 0.0)), 0.0);
    const auto c = ScalarField::from_function(g, [](double t, double) { return std::cos(t); });
    // Hess(cos) = -cos g, so the node maximum is sqrt(2) times the largest |cos theta_j|.
    double xmax = 0.0;
    for (int j = 0; j < g->n_theta(); ++j) xmax = std::max(xmax, std::abs(g->cos_theta(j)));
    EXPECT_NEAR(c2_norm(c), std::numbers::sqrt2 * xmax, 1e-10);
    EXPECT_NEAR(c2_norm(c), std::numbers::sqrt2, 5e-3);
    EXPECT_NEAR(c2_norm(-3.0 * c), 3.0 * c2_norm(c), 1e-10);
}

TEST(RandomField, DeterministicAndNormalized) {
    const auto g = build_grid(32, 64);
    const auto a = random_c2_field(g, 42, 6, 0.05), b = random_c2_field(g, 42, 6, 0.05);
    EXPECT_EQ(a.values(), b.values());
    EXPECT_NEAR(c2_norm(a), 0.05, 1e-10);
    const auto z = random_c2_field(g, 42, 6, 0.0);
    EXPECT_EQ(z.max_abs(), 0.0);
    const auto c = random_c2_field(g, 43, 6, 0.05);
    EXPECT_NE(a.values(), c.values());
    EXPECT_THROW(random_c2_field(g, 1, 9, 1.0), UsageError);
}
