#include <gtest/gtest.h>

#include <cmath>

#include "chmlab/radial_profile.hpp"

using namespace chmlab;

TEST(RadialProfile, NeckInitialCurvature) {
    EXPECT_NEAR(profile_rhs(0.5, 0.0, 0.3, 1.0), 0.39, 1e-14);
    EXPECT_NEAR(profile_rhs(0.8, 0.0, 0.48, 1.0), 0.0, 1e-14);
    EXPECT_NEAR(profile_rhs(1.0, 0.0, 0.0, 1.0), 0.0, 1e-15);
}

TEST(RadialProfile, NariaiAndCylinderAreConstant) {
    for (auto [a, q] : {std::pair{0.8, 0.48}, std::pair{1.0, 0.0}}) {
        const auto prof = integrate_profile(a, q, 1.0, 3.0, 1e-10);
        EXPECT_EQ(prof.kind(), ProfileKind::nariai);
        double dev = 0.0;
        for (double s = -3.0; s <= 3.0; s += 0.01) dev = std::max(dev, std::abs(prof.evaluate(s).u - a));
        EXPECT_LE(dev, 1e-12);
    }
}

TEST(RadialProfile, FirstIntegralAndScalarCurvature) {
    const auto prof = integrate_profile(0.5, 0.3, 1.0, 2.0, 1e-10);
    EXPECT_EQ(prof.kind(), ProfileKind::rnds);
    EXPECT_NEAR(first_integral(prof, 0.0), 0.31916666666666667, 1e-15);
    double di = 0.0, dr = 0.0;
    for (int i = 0; i <= 4000; ++i) {
        const double s = -2.0 + i * 1e-3;
        di = std::max(di, std::abs(first_integral(prof, s) - prof.m()));
        const auto p = prof.evaluate(s);
        const auto c = curvature_scalars(p);
        dr = std::max(dr, std::abs(c.scalar - 2.0 - 2.0 * 0.09 / std::pow(p.u, 4)));
    }
    EXPECT_LE(di, 1e-8);
    EXPECT_LE(dr, 1e-7);
}

TEST(RadialProfile, MirrorSymmetry) {
    const auto prof = integrate_profile(0.5, 0.3, 1.0, 2.0, 1e-10);
    for (double s = 0.05; s <= 2.0; s += 0.15) {
        const auto p = prof.evaluate(s), m = prof.evaluate(-s);
        EXPECT_EQ(p.u, m.u);
        EXPECT_EQ(p.du, -m.du);
        EXPECT_EQ(p.ddu, m.ddu);
    }
    const auto samples = prof.samples();
    for (std::size_t i = 1; i < samples.size(); ++i) EXPECT_LT(samples[i - 1].s, samples[i].s);
}

TEST(RadialProfile, OdeResidualAtNodes) {
    const double tol = 1e-10;
    const auto prof = integrate_profile(0.5, 0.3, 1.0, 2.0, tol);
    // Finite differences of the dense evaluator against the stored u''.
    const double h = 1e-4;
    for (const auto& n : prof.samples()) {
        if (std::abs(n.s) > 2.0 - 2 * h || std::abs(n.s) < 2 * h) continue;
        const double fd = (prof.evaluate(n.s + h).du - prof.evaluate(n.s - h).du) / (2 * h);
        EXPECT_NEAR(fd, n.ddu, 1e-6);
    }
}

TEST(RadialProfile, StepControllersAgree) {
    const auto a = integrate_profile(0.5, 0.3, 1.0, 2.0, 1e-10, StepControl::proportional_integral);
    const auto b = integrate_profile(0.5, 0.3, 1.0, 2.0, 1e-10, StepControl::integral);
    double dev = 0.0;
    for (double s = -2.0; s <= 2.0; s += 0.01) dev = std::max(dev, std::abs(a.evaluate(s).u - b.evaluate(s).u));
    EXPECT_LE(dev, 1e-7);
}

TEST(RadialProfile, RejectsBadInput) {
    EXPECT_THROW(integrate_profile(0.0, 0.3, 1.0, 1.0, 1e-10), DomainError);
    EXPECT_THROW(integrate_profile(0.5, 0.3, 1.0, 1.0, 1e-3), DomainError);
    EXPECT_THROW(integrate_profile(0.5, 0.3, 1.0, 1.0, 1e-16), DomainError);
    // a = 1.2 with Q = 0.3 is a maximal slice (u'' < 0).
    EXPECT_THROW(integrate_profile(1.2, 0.3, 1.0, 1.0, 1e-10), DomainError);
    const auto prof = integrate_profile(0.5, 0.3, 1.0, 1.0, 1e-10);
    EXPECT_THROW(prof.evaluate(1.5), DomainError);
    EXPECT_THROW(first_integral(prof, -1.01), DomainError);
}

TEST(RadialProfile, IntegrationFailureReportsLastValidS) {
    // With Lambda < 0 the profile grows like exp(s/sqrt(3)) and overflows long before s_max.
    try {
        integrate_profile(0.5, 0.3, -1.0, 1e4, 1e-10);
        FAIL() << "expected IntegrationError";
    } catch (const IntegrationError& e) {
        EXPECT_GT(e.last_valid_s(), 100.0);
        EXPECT_LT(e.last_valid_s(), 1e4);
    }
}

TEST(CurvatureScalars, NeckValues) {
    const auto prof = integrate_profile(0.5, 0.3, 1.0, 1.0, 1e-10);
    const auto c = curvature_scalars(prof, 0.0);
    EXPECT_NEAR(c.scalar, 4.88, 1e-12);
    EXPECT_NEAR(c.h_slice, 0.0, 0.0);
    EXPECT_NEAR(c.a2_slice, 0.0, 0.0);
    EXPECT_NEAR(c.ric_nn, -1.56, 1e-12);
    EXPECT_NEAR(c.k_slice, 4.0, 1e-12);
}

TEST(CurvatureScalars, ExpandingSliceHasNegativeMeanCurvature) {
    const auto prof = integrate_profile(0.5, 0.3, 1.0, 1.0, 1e-10);
    const auto c = curvature_scalars(prof, 0.4);
    EXPECT_LT(c.h_slice, 0.0);
    EXPECT_NEAR(c.a2_slice, 0.5 * c.h_slice * c.h_slice, 1e-15);
}

TEST(ElectricField, Magnitudes) {
    const auto prof = integrate_profile(0.5, 0.3, 1.0, 1.0, 1e-10);
    const auto e = electric_field(prof, 0.0);
    EXPECT_NEAR(e.magnitude, 1.2, 1e-14);
    EXPECT_NEAR(e.flux, 4.0 * std::numbers::pi * 0.3, 1e-13);
    const auto n = integrate_profile(0.8, 0.48, 1.0, 1.0, 1e-10);
    EXPECT_NEAR(electric_field(n, 0.7).magnitude, 0.75, 1e-12);
    const auto z = integrate_profile(1.0, 0.0, 1.0, 1.0, 1e-10);
    EXPECT_EQ(electric_field(z, 0.3).magnitude, 0.0);
}

TEST(ArclengthFromR, RoundTripAgainstProfile) {
    const auto p = params_from_neck(0.5, 0.3, 1.0);
    const double s = arclength_from_r(p, 0.7);
    EXPECT_NEAR(s, 1.0727094586295692, 1e-9);
    const auto prof = integrate_profile(0.5, 0.3, 1.0, 3.0, 1e-12);
    EXPECT_NEAR(prof.evaluate(s).u, 0.7, 1e-6);
}

TEST(ArclengthFromR, EndpointsAndMonotonicity) {
    const auto p = params_from_neck(0.5, 0.3, 1.0);
    EXPECT_LT(arclength_from_r(p, 0.5 + 1e-12), 1e-4);
    double prev = 0.0;
    for (double r = 0.51; r < 1.29; r += 0.02) {
        const double s = arclength_from_r(p, r);
        EXPECT_GT(s, prev);
        prev = s;
    }
    EXPECT_NEAR(arclength_from_r(p, 1.2980617339865226 - 1e-14), 3.4472475530901761, 1e-6);
    EXPECT_THROW(arclength_from_r(p, 0.4), DomainError);
    EXPECT_THROW(arclength_from_r(p, 1.4), DomainError);
}
