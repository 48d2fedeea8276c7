#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "chmlab/variation_lab.hpp"

using namespace chmlab;
constexpr double kPi = std::numbers::pi;

namespace {

GridPtr grid32() {
    static const GridPtr g = build_grid(32, 64);
    return g;
}

ProfilePtr neck_profile() {
    static const ProfilePtr prof = share_profile(integrate_profile(0.5, 0.3, 1.0, 2.0, 1e-12));
    return prof;
}

ScalarField unit_harmonic(int l, double a = 0.5) { return (1.0 / a) * harmonic_field(grid32(), l, 0); }

}  // namespace

TEST(ZFunctional, VanishesOnSlices) {
    for (double s : {0.0, 0.2, -0.35, 0.7}) {
        const auto g = induced_geometry(make_slice(neck_profile(), s, grid32()));
        EXPECT_LE(z_functional(g).max_abs(), 1e-10) << "s=" << s;
        const auto gq = induced_geometry(make_slice(neck_profile(), s, grid32()), {true});
        EXPECT_LE(z_functional(gq).max_abs(), 1e-8) << "s=" << s;
    }
    const auto np = nariai_from_alpha(0.8);
    const auto nprof = share_profile(integrate_profile(np.alpha, np.q(), np.lambda, 1.0, 1e-12));
    EXPECT_LE(z_functional(induced_geometry(make_slice(nprof, 0.4, grid32()))).max_abs(), 1e-10);
}

TEST(ZFunctional, IntegralNonNegativeOnSeededGraphs) {
    for (std::uint64_t seed = 1; seed <= 12; ++seed) {
        const auto phi = random_c2_field(grid32(), seed, 4, 0.1);
        for (double s0 : {0.0, 0.3}) {
            const auto g = induced_geometry(make_graph(neck_profile(), s0, phi));
            EXPECT_GE(g.integrate_area(z_functional(g)), -1e-10) << "seed=" << seed << " s0=" << s0;
        }
    }
}

TEST(FirstVariation, SlicesAreCritical) {
    for (double s : {0.0, 0.3}) {
        const auto g = induced_geometry(make_slice(neck_profile(), s, grid32()));
        EXPECT_NEAR(first_variation(g, ScalarField(grid32(), 1.0)), 0.0, 1e-10);
        EXPECT_NEAR(first_variation(g, unit_harmonic(1)), 0.0, 1e-10);
        const auto e = first_variation_fd(make_slice(neck_profile(), s, grid32()), unit_harmonic(1), 1e-2);
        EXPECT_NEAR(e.fd_fine, 0.0, 1e-10);
        EXPECT_FALSE(e.resolved);
    }
}

TEST(FirstVariation, MinimalGraphIsTrivial) {
    // Every term carries H, so a zero-H surface has zero first variation for any direction.
    const auto g = induced_geometry(make_slice(neck_profile(), 0.0, grid32()), {true});
    const auto psi = random_c2_field(grid32(), 5, 6, 0.2);
    EXPECT_NEAR(first_variation(g, psi), 0.0, 1e-12);
    EXPECT_NEAR(first_variation(g, psi, std::nullopt, FirstVariationForm::as_printed), 0.0, 1e-12);
}

TEST(FirstVariation, MatchesCentralDifferencesWithOrderTwo) {
    for (int seed = 1; seed <= 10; ++seed) {
        const auto phi = random_c2_field(grid32(), 100 + seed, 4, 0.05);
        const auto psi = random_c2_field(grid32(), 200 + seed, 4, 0.15);
        const auto e = first_variation_fd(make_graph(neck_profile(), 0.3, phi), psi, 0.05);
        ASSERT_TRUE(e.resolved) << "seed=" << seed;
        EXPECT_NEAR(e.order, 2.0, 0.4) << "seed=" << seed;
        EXPECT_LE(e.err_coarse, 1e-4 * 0.05 * 0.05) << "seed=" << seed;
    }
}

TEST(FirstVariation, PrintedFormDiffersOffSlices) {
    const auto phi = random_c2_field(grid32(), 3, 4, 0.05);
    const auto g = induced_geometry(make_graph(neck_profile(), 0.3, phi), {true});
    const auto eta = coordinate_normal_speed(g, random_c2_field(grid32(), 4, 4, 0.15));
    const double z = first_variation(g, eta);
    const double printed = first_variation(g, eta, std::nullopt, FirstVariationForm::as_printed);
    // Z gains (zeta - Lambda)/2; the gap is prefactor * (Lambda/2) int H eta dA.
    const double pre = -2.0 * std::sqrt(g.area) / std::pow(16.0 * kPi, 1.5);
    EXPECT_NEAR(printed - z, pre * 0.5 * (2.0 - 1.0) * g.integrate_area(g.mean_curvature * eta), 1e-12);
    EXPECT_GT(std::abs(printed - z), 1e-6);
}

TEST(SecondVariation, HarmonicValues) {
    EXPECT_NEAR(second_variation_minimal(0.5, 0.3, unit_harmonic(1)), (1.0 / (32 * kPi)) * (-1.56 * 8 - 64), 1e-10);
    EXPECT_NEAR(second_variation_minimal(0.5, 0.3, unit_harmonic(1)), -0.76076062797925974, 1e-10);
    EXPECT_NEAR(second_variation_minimal(0.5, 0.3, unit_harmonic(2)), -6.1020005181432677, 1e-10);
    EXPECT_NEAR(second_variation_minimal(0.5, 0.3, ScalarField(grid32(), 1.0)), 0.0, 1e-14);
}

TEST(SecondVariation, MatchesFivePointDifferences) {
    const auto base = make_slice(neck_profile(), 0.0, grid32());
    for (int l : {1, 2}) {
        const auto phi = unit_harmonic(l);
        const double sv = second_variation_minimal(0.5, 0.3, phi);
        for (double dt : {1e-2, 5e-3}) {
            const auto e = second_variation_fd(base, phi, dt, sv);
            EXPECT_LE(e.err_coarse, std::max(1e-4, 5 * dt * dt)) << "l=" << l << " dt=" << dt;
        }
    }
    const auto phi = random_c2_field(grid32(), 9, 5, 0.2);
    const auto e = second_variation_fd(base, phi, 1e-2, second_variation_minimal(0.5, 0.3, phi));
    EXPECT_LE(e.err_fine, 1e-6);
}

TEST(SecondVariation, PrintedDiscrepancy) {
    const ScalarField one(grid32(), 1.0);
    EXPECT_NEAR(second_variation_as_printed(0.5, 0.3, one), 0.024375, 1e-10);
    EXPECT_NEAR(second_variation_as_printed(0.5, 0.3, one) - second_variation_minimal(0.5, 0.3, one),
                second_variation_discrepancy(0.5, 0.3, one), 1e-14);
    for (int seed = 1; seed <= 5; ++seed) {
        const auto phi = random_c2_field(grid32(), seed, 6, 0.3);
        EXPECT_NEAR(second_variation_as_printed(0.5, 0.3, phi) - second_variation_minimal(0.5, 0.3, phi),
                    second_variation_discrepancy(0.5, 0.3, phi), 1e-12);
    }
    // Marginal cylinder: L 1 = 0, so the printed form also vanishes on constants.
    EXPECT_NEAR(second_variation_as_printed(1.0, 0.0, ScalarField(grid32(), 1.0)), 0.0, 1e-14);
}

TEST(StrictInstability, ConstantAndBound) {
    const auto c = strict_instability_constant(0.5, 0.3);
    EXPECT_NEAR(c.value, 0.76076062797925974, 1e-10);
    EXPECT_EQ(c.l_min, 1);
    for (int seed = 1; seed <= 30; ++seed) {
        const auto phi = nonconstant_part(random_c2_field(grid32(), seed, 8, 0.2));
        const double l2 = 0.25 * integrate(phi * phi);
        EXPECT_LE(second_variation_minimal(0.5, 0.3, phi), -c.value * l2 + 1e-9) << "seed=" << seed;
    }
    EXPECT_THROW(strict_instability_constant(0.97, 0.3), DomainError);
    EXPECT_THROW(strict_instability_constant(0.5, 0.6), DomainError);
}

TEST(StrictInstability, MinimumAtFirstModeOnWindowGrid) {
    for (int i = 1; i < 20; ++i) {
        const double q = 0.02 * i;
        const auto w = stability_window(q);
        if (!w) continue;
        for (int j = 1; j < 10; ++j) {
            const double a2 = w->first + (w->second - w->first) * j / 10.0;
            const auto c = strict_instability_constant(std::sqrt(a2), q);
            EXPECT_EQ(c.l_min, 1);
            EXPECT_GT(c.value, 0.0);
        }
    }
}

TEST(Foliation, NeckFoliation) {
    const auto fol = cmc_foliation(*neck_profile(), 0.5, 20);
    ASSERT_EQ(fol.size(), 21u);
    for (std::size_t i = 1; i < fol.size(); ++i) EXPECT_GT(fol[i].t, fol[i - 1].t);
    for (const auto& st : fol) {
        EXPECT_LE(std::abs(st.lemma43_residual), 1e-8) << "t=" << st.t;
        EXPECT_LE(std::abs(st.dmch_dt), 1e-7);
        EXPECT_LE(std::abs(st.dmch_dt_fd), 1e-7);
        EXPECT_EQ(st.rho, 1.0);
        if (st.t != 0.0) EXPECT_LT(st.mean_curvature * st.t, 0.0) << "t=" << st.t;
    }
    const auto& mid = fol[10];
    ASSERT_EQ(mid.t, 0.0);
    EXPECT_NEAR(mid.dh_dt, -1.56, 1e-8);
    EXPECT_LE(std::abs(mid.dh_dt + lambda1_analytic(0.5, 0.3)), 1e-8);
    EXPECT_THROW(cmc_foliation(*neck_profile(), 5.0, 10), DomainError);
}

TEST(Foliation, MonotonicityDecomposition) {
    const auto fol = cmc_foliation(*neck_profile(), 0.5, 20);
    const auto rep = monotonicity_report(fol, *neck_profile());
    for (const auto& m : rep) {
        const double P = 4 * kPi * std::pow(neck_profile()->evaluate(m.t).u, 2);
        EXPECT_NEAR(m.scalar_term_printed, P, 1e-8);
        EXPECT_NEAR(m.scalar_term_consistent, 0.0, 1e-8);
        EXPECT_NEAR(m.umbilic_term, 0.0, 1e-10);
        EXPECT_NEAR(m.charge_term, 0.0, 1e-10);
        EXPECT_EQ(m.lapse_inequality_lhs, 0.0);
        EXPECT_EQ(m.lapse_inequality_rhs, 0.0);
        EXPECT_NEAR(m.decomposition_consistent, m.dmch_dt, 1e-10);
        EXPECT_EQ(m.printed_mismatch, m.t != 0.0);
    }
}

TEST(LocalMax, SeededExperiment) {
    const auto r = local_max_experiment(0.5, 0.3, 200, 0.02, 1);
    EXPECT_EQ(r.samples, 200);
    EXPECT_LE(r.max_excess, 1e-9);
    EXPECT_TRUE(r.rigidity_consistent);
    EXPECT_THROW(local_max_experiment(0.5, 0.3, 10, 0.1, 1), DomainError);
    EXPECT_THROW(local_max_experiment(0.97, 0.3, 10, 0.02, 1), DomainError);
}

TEST(LocalMax, ConstantShiftAndTaylor) {
    const auto prof = share_profile(integrate_profile(0.5, 0.3, 1.0, 0.2, 1e-12));
    const double m = charged_hawking_mass(make_graph(prof, 0.0, ScalarField(grid32(), 0.03)), std::nullopt, {true});
    EXPECT_NEAR(m - prof->m(), 0.0, 1e-10);
    const auto t = taylor_check(0.5, 0.3, 0.01 * unit_harmonic(1));
    EXPECT_LT(t.excess, 0.0);
    EXPECT_NEAR(t.ratio, 1.0, 0.1);
}

TEST(VariationReport, NeckAndShiftedSlice) {
    const auto r = variation_report(0.5, 0.3, 0.0, unit_harmonic(1), 1e-2);
    EXPECT_NEAR(r.second_analytic, -0.76076062797925974, 1e-10);
    EXPECT_NEAR(r.second_fd, r.second_analytic, 1e-4);
    EXPECT_LE(r.z_max, 1e-8);
    EXPECT_NEAR(r.first_analytic, 0.0, 1e-12);
    const auto r2 = variation_report(0.5, 0.3, 0.3, unit_harmonic(1), 1e-2);
    EXPECT_NEAR(r2.first_fd, 0.0, 1e-10);
    EXPECT_TRUE(std::isfinite(r2.second_as_printed));
}

TEST(NariaiFlow, EqualityAndStrictNeck) {
    const auto r = nariai_flow_diagnostic(nariai_from_alpha(0.8));
    EXPECT_LE(std::abs(r.equality_residual), 1e-12);
    EXPECT_NEAR(r.area_charge, 4 * kPi, 1e-12);
    EXPECT_NEAR(r.mean_curvature, 0.0, 1e-12);
    EXPECT_EQ(r.hprime.lhs, 0.0);
    EXPECT_EQ(r.hprime.rhs, 0.0);
    EXPECT_NEAR(area_charge_sum(0.5, 0.3), 2.44 * kPi, 1e-12);
    EXPECT_LT(area_charge_sum(0.5, 0.3), 4 * kPi);
}
