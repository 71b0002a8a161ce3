#include <wmecs/measurement.hpp>
#include <wmecs/observables.hpp>

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace wmecs;
using std::numbers::pi;

namespace {

const Complex I{0.0, 1.0};

TwoModeState coherent_pair(Complex alpha, Complex beta, int n_max) {
    return product_state(coherent_column(alpha, n_max).amplitudes, coherent_column(beta, n_max).amplitudes);
}

} // namespace

TEST(SumSqueezing, VacuumAndEcsVanish) {
    const auto vac = vacuum(FockCutoff::uniform(10));
    for (double t : {0.0, 0.7, pi / 2}) {
        EXPECT_NEAR(sum_squeezing_direct(vac, t), 0.0, 1e-14);
        EXPECT_NEAR(sum_squeezing_normal_ordered(vac, t), 0.0, 1e-14);
    }
    const auto ecs = build_ecs(EcsParams{}, FockCutoff::uniform(40));
    EXPECT_NEAR(sum_squeezing_direct(ecs, pi / 2), 0.0, 1e-9);
    EXPECT_NEAR(sum_squeezing_normal_ordered(ecs, pi / 2), 0.0, 1e-9);
}

TEST(SumSqueezing, ProductCoherentFormsAgree) {
    const auto s = coherent_pair(0.2, 0.2, 40);
    EXPECT_NEAR(sum_squeezing_direct(s, 0.0), sum_squeezing_normal_ordered(s, 0.0), 1e-10);
}

TEST(SumSqueezing, FormsAgreeOnRandomStates) {
    std::mt19937_64 rng{99};
    std::uniform_real_distribution<double> angle(0.0, 2 * pi);
    for (int k = 0; k < 50; ++k) {
        const auto psi = oracle::random_interior_state(FockCutoff::uniform(12), rng);
        const double t = angle(rng);
        const auto rep = sum_squeezing(psi, t);
        EXPECT_NEAR(rep.s2s_direct, rep.s2s_normal_ordered, 1e-9);
        EXPECT_GE(rep.s2s_direct, -1.0 - 1e-12);
    }
}

TEST(SumSqueezing, NegativeAtWeakCouplingPositiveAtStrong) {
    WeakMeasurementConfig c;
    c.coupling = CouplingParams{0.3, 0.3};
    EXPECT_LT(sum_squeezing_direct(build_pointer_state(c).state, c.theta_big), 0.0);
    c.coupling = CouplingParams{1.0, 1.0};
    EXPECT_GT(sum_squeezing_direct(build_pointer_state(c).state, c.theta_big), 0.0);
}

TEST(Wigner, PointAnchors) {
    const int n = 40;
    EXPECT_NEAR(joint_wigner_point(vacuum(FockCutoff::uniform(n)), 0.0, 0.0), 1.0, 1e-12);
    const auto s = coherent_pair(0.1 * I, 0.0, n);
    EXPECT_NEAR(joint_wigner_point(s, 0.1 * I, 0.0), 1.0, 1e-9);
    const Complex g{0.3, -0.2}, b{-0.4, 0.1};
    EXPECT_NEAR(joint_wigner_point(s, g, b), std::exp(-2 * std::norm(g - 0.1 * I) - 2 * std::norm(b)), 1e-9);

    const double expected[] = {0.990049833749168054, 0.913931185271228, 0.778800783071405};
    const double rs[] = {0.1, 0.3, 0.5};
    for (int k = 0; k < 3; ++k) {
        const auto ecs = build_ecs(EcsParams{rs[k], pi / 2, pi / 2}, FockCutoff::uniform(n));
        EXPECT_NEAR(joint_wigner_point(ecs, 0.0, 0.0), expected[k], 1e-9);
    }
}

TEST(Wigner, GridMatchesPointsAndIsSymmetricOnVacuum) {
    const auto vac = vacuum(FockCutoff::uniform(20));
    const auto g = joint_wigner_grid(vac, RangeSpec{-1, 1, 3}, RangeSpec{-1, 1, 3});
    EXPECT_NEAR(g.values(1, 1), 1.0, 1e-12);
    EXPECT_NEAR(g.maximum(), 1.0, 1e-12);
    EXPECT_NEAR(g.values(0, 0), g.values(2, 2), 1e-12);
    EXPECT_NEAR(g.values(0, 2), g.values(2, 0), 1e-12);

    WeakMeasurementConfig c;
    c.coupling = CouplingParams{1, 1};
    const auto psi = build_pointer_state(c).state;
    const auto grid = joint_wigner_grid(psi, RangeSpec{-2, 2, 5}, RangeSpec{-1, 1, 4}, {}, 2);
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 4; ++j)
            EXPECT_NEAR(grid.values(i, j), joint_wigner_point(psi, grid.re_gamma_axis[i], grid.re_beta_axis[j]), 1e-12);
    EXPECT_THROW(joint_wigner_grid(psi, RangeSpec{0, 0, 1}, RangeSpec{-1, 1, 3}), ConfigError);
}

TEST(Wigner, NegativityGrowsWithCoupling) {
    WeakMeasurementConfig c;
    const RangeSpec axis{-2.5, 2.5, 26};
    c.coupling = CouplingParams{0, 0};
    const double m0 = joint_wigner_grid(build_pointer_state(c).state, axis, axis).minimum();
    c.coupling = CouplingParams{1, 1};
    const double m1 = joint_wigner_grid(build_pointer_state(c).state, axis, axis).minimum();
    EXPECT_LT(m1, m0);
    EXPECT_GE(m1, -1.0 - 1e-9);
}

TEST(HillZub, Anchors) {
    EXPECT_NEAR(hz_correlation(vacuum(FockCutoff::uniform(10))), 0.0, 1e-15);
    EXPECT_NEAR(hz_correlation(coherent_pair(std::polar(0.4, 1.0), std::polar(0.7, -0.3), 40)), 0.0, 1e-12);
    const double expected[] = {6.31265572656774517e-6, 0.000552805544078879097, 0.00493816278356562119};
    const double rs[] = {0.1, 0.3, 0.5};
    for (int k = 0; k < 3; ++k) {
        const auto ecs = build_ecs(EcsParams{rs[k], pi / 2, pi / 2}, FockCutoff::uniform(40));
        EXPECT_NEAR(hz_correlation(ecs), expected[k], 1e-10);
    }
    EXPECT_TRUE(hz_entangled(-1e-3));
    EXPECT_FALSE(hz_entangled(0.0));
}

TEST(HillZub, LowerBoundOnRandomStates) {
    std::mt19937_64 rng{41};
    for (int k = 0; k < 30; ++k) {
        const auto psi = oracle::random_interior_state(FockCutoff{9, 11}, rng);
        const double na = expectation(psi, number_operator(9), Mode::a).real();
        EXPECT_GE(hz_correlation(psi), -na - 1e-9);
    }
}

TEST(Qfi, NonNegativeOverDefaultSweep) {
    WeakMeasurementConfig c;
    for (double r : {0.05, 0.5, 1.0})
        for (double s : {0.0, 1.5, 3.0}) {
            c.ecs = EcsParams{r, pi / 2, pi / 2};
            c.coupling = CouplingParams{s, s};
            EXPECT_GE(qfi_analytic(c), -1e-9);
            EXPECT_GE(qfi_finite_difference(c), -1e-9);
        }
}

TEST(Qfi, CoherentPhaseFamily) {
    const int n = 40;
    const StateFamily family = [&](double phi) { return coherent_pair(0.0, std::polar(0.5, phi), n); };
    EXPECT_NEAR(qfi_central_difference(family, 0.3), 1.0, 1e-6);
}

TEST(Qfi, FockStatePhaseFamilyHasNoInformation) {
    const FockCutoff cut = FockCutoff::uniform(8);
    const StateFamily family = [&](double phi) {
        Matrix c = Matrix::Zero(9, 9);
        c(0, 3) = std::polar(1.0, 3 * phi);
        return TwoModeState(cut, c);
    };
    EXPECT_NEAR(qfi_central_difference(family, 1.0), 0.0, 1e-9);
}

TEST(Qfi, StepValidation) {
    const StateFamily family = [](double) { return vacuum(FockCutoff::uniform(3)); };
    EXPECT_THROW(qfi_central_difference(family, 0.0, 1e-8), ConfigError);
    EXPECT_THROW(qfi_central_difference(family, 0.0, 1e-2), ConfigError);
}

TEST(Qfi, AnalyticMatchesFiniteDifference) {
    WeakMeasurementConfig c;
    for (double r : {0.1, 0.3, 0.5}) {
        for (double s : {0.0, 1.0, 2.0}) {
            c.ecs = EcsParams{r, pi / 2, pi / 2};
            c.coupling = CouplingParams{s, s};
            const double a = qfi_analytic(c);
            const double f = qfi_finite_difference(c);
            EXPECT_NEAR(f, a, 1e-4 * a) << r << " " << s;
        }
    }
}

TEST(Qfi, BareEcsAndPhotonless) {
    WeakMeasurementConfig c;
    c.wv = WeakValueParams{0, 0, 0, 0};
    c.ecs = EcsParams{0.3, pi / 2, pi / 2};
    // Bare ECS phase family: only the mode-b branch carries varphi.
    const auto ecs_at = [&](double phi) { return build_ecs(EcsParams{0.3, pi / 2, phi}, c.cutoff); };
    EXPECT_NEAR(qfi_analytic(c), qfi_central_difference(ecs_at, pi / 2), 1e-7);

    c.ecs = EcsParams{0.0, 0.0, 0.0};
    EXPECT_NEAR(qfi_analytic(c), 0.0, 1e-15);
}

TEST(Qfi, GaugesAgreeAtDefaultPhase) {
    WeakMeasurementConfig c;
    c.ecs = EcsParams{0.3, pi / 2, pi / 2};
    c.coupling = CouplingParams{1, 1};
    const double fixed = qfi(c);
    c.qfi_gauge = QfiGauge::renormalized;
    EXPECT_NEAR(qfi(c), fixed, 1e-4 * fixed);
}

TEST(Qcrb, Values) {
    EXPECT_DOUBLE_EQ(qcrb(4.0, 1), 0.5);
    EXPECT_DOUBLE_EQ(qcrb(1.0, 100), 0.1);
    EXPECT_THROW(qcrb(0.0), ConfigError);
    EXPECT_THROW(qcrb(-1.0), ConfigError);
    EXPECT_THROW(qcrb(1.0, 0), ConfigError);

    const StateFamily family = [](double phi) { return coherent_pair(0.0, std::polar(0.5, phi), 40); };
    EXPECT_NEAR(metrology_report(qfi_central_difference(family, 0.0)).qcrb, 1.0, 1e-6);
}
