#include "homctl/error.hpp"
#include "homctl/homogenize.hpp"
#include "homctl/scenarios.hpp"
#include "homctl/sim.hpp"
#include "homctl/verify.hpp"

#include <gtest/gtest.h>

using namespace homctl;

namespace {

struct Setup {
    SwitchedPlant plant;
    Controller controller;
};

const Setup& ft() {
    static const Setup s = [] {
        auto plant = scenarios::ft_plant_variant();
        const auto h = solve_homogenization(plant, scenarios::kFtMu);
        auto c = synthesize_common(plant, h, scenarios::kFtRho);
        return Setup{std::move(plant), std::move(c)};
    }();
    return s;
}

const CheckResult* find(const Report& r, const std::string& suite) {
    for (const auto& c : r.checks) {
        if (c.suite == suite && !c.pass) return &c;
    }
    return nullptr;
}

}  // namespace

TEST(Suites, ParseNames) {
    EXPECT_EQ(suites_from_string("all").size(), 6u);
    EXPECT_EQ(suites_from_string("homog").front(), Suite::kHomog);
    EXPECT_THROW(suites_from_string("bogus"), ParseError);
}

TEST(RunSuite, EmptySelectionPasses) {
    const auto& s = ft();
    const Report r = run_suite(s.plant, s.controller, {}, 0);
    EXPECT_TRUE(r.checks.empty());
    EXPECT_TRUE(r.pass());
}

TEST(RunSuite, SynthesizedControllerPassesStaticSuites) {
    const auto& s = ft();
    const Report r = run_suite(s.plant, s.controller, {Suite::kHomog, Suite::kLmi, Suite::kNorm, Suite::kDecay}, 3);
    EXPECT_FALSE(r.checks.empty());
    for (const auto& c : r.checks) {
        EXPECT_TRUE(c.pass) << c.suite << "/" << c.name << ": " << c.detail;
        EXPECT_FALSE(c.anchor.empty());
    }
    EXPECT_EQ(r.seed, 3u);
}

TEST(RunSuite, ZeroedGainsFailDecay) {
    const auto& s = ft();
    Controller broken = s.controller;
    for (auto& g : broken.modes) {
        g.K.setZero();
        g.Y.setZero();
    }
    const Report r = run_suite(s.plant, broken, {Suite::kDecay}, 0);
    EXPECT_FALSE(r.pass());
    EXPECT_NE(find(r, "decay"), nullptr);
}

TEST(RunSuite, RobustNeedsDisturbanceAndTrajectory) {
    const auto& s = ft();
    EXPECT_THROW(run_suite(s.plant, s.controller, {Suite::kRobust}, 0), PreconditionError);
}

TEST(SwitchSequence, SharedLyapunovHasUnitRatios) {
    const auto& s = ft();
    const auto& g = s.controller.modes;
    Controller twin = controller_from_gains(s.controller.mu, s.controller.Gd, {g[0].P, g[0].P}, {g[0].K, g[1].K},
                                            {g[0].K0, g[1].K0}, {g[0].rho, g[1].rho});
    twin.gamma = estimate_gamma(twin, 500);
    EXPECT_NEAR(*twin.gamma, 1.05, 1e-9);
    EXPECT_THROW(lyapunov_switch_sequence(Trajectory{}, s.controller), PreconditionError);
    const Trajectory t = integrate(s.plant, twin, SwitchingPolicy::periodic(0.5), scenarios::ft_x0(), 3.0, 1e-3);
    const auto rep = lyapunov_switch_sequence(t, twin, 1e-6);
    ASSERT_FALSE(rep.ratios.empty());
    for (double q : rep.ratios) EXPECT_LE(q, 1.05);
    EXPECT_TRUE(rep.ratios_pass);
    EXPECT_TRUE(rep.entry_decreasing);
    EXPECT_EQ(rep.entry_values.size(), rep.switch_times.size() + 1);
}

TEST(EmpiricalKappa, ZeroWithoutDisturbance) {
    const auto& s = ft();
    const Trajectory t = integrate(s.plant, s.controller, scenarios::demo_switching(), scenarios::ft_x0(), 1.0, 1e-3);
    EXPECT_EQ(empirical_kappa(t, s.controller, s.plant, DisturbanceSpec::none()), 0.0);
}
