#include "homctl/error.hpp"
#include "homctl/homogenize.hpp"
#include "homctl/scenarios.hpp"
#include "homctl/sim.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <map>

using namespace homctl;

namespace {

struct Setup {
    SwitchedPlant plant;
    Controller controller;
};

const Setup& chain(double mu) {
    static std::map<double, Setup> cache;
    auto it = cache.find(mu);
    if (it == cache.end()) {
        auto plant = scenarios::chain2();
        const auto h = solve_homogenization(plant, mu);
        auto c = synthesize_common(plant, h, 0.5);
        it = cache.emplace(mu, Setup{std::move(plant), std::move(c)}).first;
    }
    return it->second;
}

const Setup& ft() {
    static const Setup s = [] {
        auto plant = scenarios::ft_plant_variant();
        const auto h = solve_homogenization(plant, scenarios::kFtMu);
        auto c = synthesize_common(plant, h, scenarios::kFtRho);
        return Setup{std::move(plant), std::move(c)};
    }();
    return s;
}

}  // namespace

TEST(Integrate, ZeroStateStaysZero) {
    const auto& s = ft();
    const Trajectory t = integrate(s.plant, s.controller, scenarios::demo_switching(), Vector::Zero(4), 2.0, 1e-3);
    for (const auto& x : t.states) EXPECT_EQ(x, Vector::Zero(4));
    for (double v : t.vnorm) EXPECT_EQ(v, 0.0);
}

TEST(Integrate, GridInvariants) {
    const auto& s = ft();
    const double h = 1e-3;
    const Trajectory t = integrate(s.plant, s.controller, SwitchingPolicy::periodic(0.2505), scenarios::ft_x0(), 1.0, h);
    ASSERT_FALSE(t.empty());
    EXPECT_EQ(t.times.front(), 0.0);
    EXPECT_NEAR(t.times.back(), 1.0, 1e-12);
    EXPECT_EQ(t.states.size(), t.size());
    EXPECT_EQ(t.inputs.size(), t.size());
    EXPECT_EQ(t.modes.size(), t.size());
    EXPECT_EQ(t.vnorm.size(), t.size());
    for (std::size_t k = 1; k < t.size(); ++k) {
        EXPECT_GT(t.times[k], t.times[k - 1]);
        EXPECT_LE(t.times[k] - t.times[k - 1], h * (1 + 1e-9));
    }
    ASSERT_EQ(t.switches.size(), 3u);
    for (const auto& ev : t.switches) {
        EXPECT_NE(ev.from, ev.to);
        bool sampled = false;
        for (double tk : t.times) sampled = sampled || std::abs(tk - ev.time) < 1e-12;
        EXPECT_TRUE(sampled) << "switch at " << ev.time;
    }
}

TEST(Integrate, RejectsBadArguments) {
    const auto& s = ft();
    const auto pol = SwitchingPolicy::constant(0);
    EXPECT_THROW(integrate(s.plant, s.controller, pol, scenarios::ft_x0(), 1.0, 0.0), PreconditionError);
    EXPECT_THROW(integrate(s.plant, s.controller, pol, scenarios::ft_x0(), 1.0, 0.1), PreconditionError);
    EXPECT_THROW(integrate(s.plant, s.controller, pol, Vector::Ones(3), 1.0, 1e-3), DimensionError);
    EXPECT_THROW(integrate(s.plant, s.controller, SwitchingPolicy::constant(5), scenarios::ft_x0(), 1.0, 1e-3),
                 PreconditionError);
}

TEST(Integrate, FiniteTimeRunSettlesWithinBound) {
    const auto& s = ft();
    const Trajectory t = integrate(s.plant, s.controller, scenarios::demo_switching(), scenarios::ft_x0(), 10.0, 1e-3);
    const double v0 = t.vnorm.front();
    const double mu = s.controller.mu;
    const double bound = std::pow(v0, -mu) / (-mu * s.controller.rho_min());
    const auto ts = settling_time(t, 1e-6);
    ASSERT_TRUE(ts.has_value());
    EXPECT_LE(*ts, bound);
    for (std::size_t k = 1; k < t.size(); ++k) {
        if (t.vnorm[k - 1] > 1e-6) EXPECT_LE(t.vnorm[k], t.vnorm[k - 1] * (1 + 1e-9));
    }
}

TEST(SettlingTime, Examples) {
    Trajectory t;
    t.times = {0.0, 1.0, 2.0, 3.0};
    t.vnorm = {5.0, 0.5, 2.0, 0.1};
    EXPECT_EQ(settling_time(t, 1.0), 3.0);
    EXPECT_EQ(settling_time(t, 10.0), 0.0);
    EXPECT_FALSE(settling_time(t, 0.01).has_value());
}

TEST(ScalingCheck, ZeroScaleIsExact) {
    const auto& s = chain(-0.5);
    const auto r = trajectory_scaling_check(s.plant, s.controller, SwitchingPolicy::constant(0),
                                            (Vector(2) << 1.0, -0.5).finished(), 0.0, 1.0, 1e-3);
    EXPECT_TRUE(r.pass);
    EXPECT_EQ(r.max_deviation, 0.0);
}

TEST(ScalingCheck, HomogeneousTrajectories) {
    for (double mu : {-0.5, 0.0}) {
        const auto& s = chain(mu);
        for (double sc : {-1.0, 1.0}) {
            const auto r = trajectory_scaling_check(s.plant, s.controller, SwitchingPolicy::constant(0),
                                                    (Vector(2) << 1.0, -0.5).finished(), sc, 2.0, 1e-3);
            EXPECT_TRUE(r.pass) << "mu " << mu << " s " << sc << " deviation " << r.max_deviation;
        }
    }
}

TEST(ScalingCheck, RejectsLargeScale) {
    const auto& s = chain(-0.5);
    EXPECT_THROW(trajectory_scaling_check(s.plant, s.controller, SwitchingPolicy::constant(0), Vector::Ones(2), 3.0, 1.0,
                                          1e-3),
                 PreconditionError);
}

TEST(NearlyFixedTime, RequiresPositiveDegree) {
    const auto& s = chain(-0.5);
    EXPECT_THROW(nearly_fixed_time_check(s.plant, s.controller, SwitchingPolicy::constant(0), {1.0}, {10.0}, 5.0, 1e-3,
                                         Vector::Ones(2)),
                 PreconditionError);
}

TEST(NearlyFixedTime, LargeStatesArriveByTheBound) {
    const auto& s = chain(0.5);
    const double bound = 1.0 / (0.5 * s.controller.rho_min()) + 0.05;
    const auto rep = nearly_fixed_time_check(s.plant, s.controller, SwitchingPolicy::constant(0), {1.0}, {1e2, 1e4},
                                             bound + 0.5, 1e-3, (Vector(2) << 1.0, 1.0).finished());
    EXPECT_NEAR(rep.bound_time, bound, 1e-12);
    ASSERT_EQ(rep.entries.size(), 2u);
    EXPECT_TRUE(rep.pass);
    for (const auto& e : rep.entries) {
        ASSERT_TRUE(e.reached.has_value());
        EXPECT_LE(*e.reached, rep.bound_time);
    }
}
