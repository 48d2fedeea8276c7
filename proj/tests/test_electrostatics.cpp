#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "chmlab/electrostatics.hpp"

using namespace chmlab;
constexpr double kPi = std::numbers::pi;

namespace {

const ModelParams kNeck{0.3191666666666667, 0.3, 1.0};

void expect_all_below(const EquationResiduals& r, double tol) {
    for (double x : r.values()) EXPECT_LE(std::abs(x), tol);
}

}  // namespace

TEST(StaticRegion, ModelFamilies) {
    const auto reg = static_region(kNeck);
    EXPECT_NEAR(reg.lower, 0.5, 1e-10);
    ASSERT_EQ(reg.horizons.size(), 2u);
    const auto ds = static_region(ModelParams{0.0, 0.0, 1.0});
    EXPECT_EQ(ds.lower, 0.0);
    EXPECT_NEAR(ds.upper, std::sqrt(3.0), 1e-12);
    ASSERT_EQ(ds.horizons.size(), 1u);
    EXPECT_THROW(static_region(nariai_from_alpha(0.8).model()), DomainError);
}

TEST(StaticSystem, RndsPointSample) {
    expect_all_below(static_residuals(kNeck, 0.7), 1e-8);
    expect_all_below(static_residuals(kNeck, 0.7, 1e-3), 1e-8);
    EXPECT_THROW(static_residuals(kNeck, 0.4), DomainError);
    EXPECT_THROW(static_residuals(kNeck, 1.5), DomainError);
}

TEST(StaticSystem, ThirtyTwoSamplesBothPaths) {
    for (const auto& p : {kNeck, ModelParams{0.0, 0.0, 1.0}, ModelParams{0.1, 0.0, 1.0}, ModelParams{0.25, 0.2, 1.0}}) {
        const auto rep = verify_einstein_maxwell_static(p);
        EXPECT_EQ(rep.samples, 32);
        expect_all_below(rep.closed_form, 1e-8);
        expect_all_below(rep.finite_difference, 1e-8);
        EXPECT_LE(rep.path_agreement, 1e-6);
    }
}

TEST(StaticSystem, DeSitterIsExactWithZeroField) {
    const ModelParams ds{0.0, 0.0, 1.0};
    expect_all_below(verify_einstein_maxwell_static(ds).closed_form, 1e-10);
    for (double r : {0.3, 0.9, 1.5}) {
        const auto rs = robinson_shen_residual(ds, r);
        EXPECT_LE(std::abs(rs.lhs), 1e-10);
        EXPECT_LE(std::abs(rs.rhs), 1e-10);
        EXPECT_FALSE(rs.resolved);
    }
}

TEST(StaticSystem, Nariai) {
    const auto np = nariai_from_alpha(0.8);
    EXPECT_NEAR(np.omega * np.omega, 0.4375, 1e-12);
    const auto rep = verify_einstein_maxwell_static(np);
    expect_all_below(rep.closed_form, 1e-8);
    expect_all_below(rep.finite_difference, 1e-8);
    EXPECT_LE(rep.path_agreement, 1e-6);
    EXPECT_THROW(static_residuals(np, -0.1), DomainError);
    EXPECT_THROW(static_residuals(np, kPi / np.omega + 0.1), DomainError);
}

TEST(RobinsonShen, RndsSecondOrder) {
    const auto rs = robinson_shen_residual(kNeck, 0.8, 1e-4);
    EXPECT_LE(rs.residual, 1e-6);
    ASSERT_TRUE(rs.resolved);
    EXPECT_NEAR(rs.order, 2.0, 0.4);
    const auto coarse = robinson_shen_residual(kNeck, 0.8, 1e-3);
    EXPECT_NEAR(coarse.order, 2.0, 0.4);
}

TEST(RobinsonShen, NariaiMidpoint) {
    const auto np = nariai_from_alpha(0.8);
    const auto rs = robinson_shen_residual(np, kPi / (2 * np.omega), 1e-4);
    EXPECT_LE(rs.residual, 1e-6);
    const auto coarse = robinson_shen_residual(np, kPi / (2 * np.omega), 1e-3);
    ASSERT_TRUE(coarse.resolved);
    EXPECT_NEAR(coarse.order, 2.0, 0.4);
}

TEST(RobinsonShen, ConditioningNearHorizon) {
    const auto np = nariai_from_alpha(0.8);
    EXPECT_THROW(robinson_shen_residual(np, 1e-10), NumericError);
}

TEST(AreaCharge, DeSitterEquality) {
    const auto s = area_charge_summary(ModelParams{0.0, 0.0, 1.0});
    ASSERT_EQ(s.components.size(), 1u);
    EXPECT_NEAR(s.components[0].cor_a2_lhs, 12 * kPi, 1e-10);
    EXPECT_NEAR(s.thm_a1_lhs, s.thm_a1_rhs, 1e-10);
    EXPECT_TRUE(s.thm_a1_holds);
    EXPECT_TRUE(s.cor_a2_holds);
}

TEST(AreaCharge, RndsNeckHypothesisFails) {
    const auto rep = verify_einstein_maxwell_static(kNeck);
    EXPECT_NEAR(rep.sup_e2, 1.44, 1e-9);
    EXPECT_FALSE(rep.hypothesis_sup_e2_le_lambda);
    const auto& c = rep.area_charge.components;
    ASSERT_EQ(c.size(), 2u);
    EXPECT_NEAR(c[0].cor_a2_lhs, 5.32 * kPi, 1e-9);
    EXPECT_NEAR(c[0].k, 0.39, 1e-9);
    for (const auto& comp : c) EXPECT_EQ(comp.euler_characteristic, 2);
    EXPECT_TRUE(rep.area_charge.cor_a2_holds);
    EXPECT_TRUE(rep.area_charge.thm_a1_holds);
}

TEST(AreaCharge, NariaiDegenerateAndPotentialGravity) {
    const auto rep = verify_einstein_maxwell_static(nariai_from_alpha(0.8));
    EXPECT_TRUE(rep.hypothesis_sup_e2_le_lambda);
    EXPECT_NEAR(rep.sup_e2, 0.5625, 1e-12);
    EXPECT_EQ(rep.area_charge.thm_a1_lhs, 0.0);
    EXPECT_EQ(rep.area_charge.thm_a1_rhs, 0.0);
    ASSERT_TRUE(rep.area_charge_potential);
    EXPECT_TRUE(rep.area_charge_potential->thm_a1_holds);
    EXPECT_NEAR(rep.area_charge_potential->components[0].cor_a2_lhs, 6.88 * kPi, 1e-10);
}

TEST(AreaCharge, MarginSweepMatchesQuarticForm) {
    // Per-component margin 12 pi - lhs equals (24 pi / r^2)(m r - Q^2) at a horizon.
    int checked = 0;
    for (int i = 1; i <= 9; ++i) {
        const double q = 0.05 * i;
        const auto w = admissible_window(q, 1.0);
        for (int j = 1; j <= 9; ++j) {
            const ModelParams p{w.m_min + (w.m_max - w.m_min) * j / 10.0, q, 1.0};
            const auto s = area_charge_summary(p);
            EXPECT_TRUE(s.cor_a2_holds);
            EXPECT_TRUE(s.thm_a1_holds);
            for (const auto& c : s.components) {
                const double margin = 12 * kPi - c.cor_a2_lhs;
                EXPECT_NEAR(margin, 24 * kPi / (c.radius * c.radius) * (p.m * c.radius - q * q), 1e-8);
                EXPECT_GT(margin, 0.0);
            }
            ++checked;
        }
    }
    EXPECT_EQ(checked, 81);
}
