#include "homctl/error.hpp"
#include "homctl/switching.hpp"
#include "homctl/synthesis.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace homctl;

TEST(ModeAt, FixedSequence) {
    const auto p = SwitchingPolicy::fixed(0, {{1.0, 1}, {2.5, 0}});
    EXPECT_EQ(mode_at(p, 0.0), 0u);
    EXPECT_EQ(mode_at(p, 0.999), 0u);
    EXPECT_EQ(mode_at(p, 1.0), 1u);
    EXPECT_EQ(mode_at(p, 2.0), 1u);
    EXPECT_EQ(mode_at(p, 2.5), 0u);
    EXPECT_EQ(mode_at(p, 100.0), 0u);
    EXPECT_THROW(mode_at(p, -1.0), PreconditionError);
}

TEST(ModeAt, Periodic) {
    const auto p = SwitchingPolicy::periodic(0.5, {1, 0});
    EXPECT_EQ(mode_at(p, 0.0), 1u);
    EXPECT_EQ(mode_at(p, 0.49), 1u);
    EXPECT_EQ(mode_at(p, 0.5), 0u);
    EXPECT_EQ(mode_at(p, 1.2), 1u);
    const auto q = p.scaled(2.0);
    EXPECT_EQ(mode_at(q, 0.3), 0u);
    EXPECT_EQ(mode_at(q, 0.5), 1u);
}

TEST(ModeAt, AgreesWithSwitchTimes) {
    for (const auto& p : {SwitchingPolicy::min_dwell(0.3, 0.5, 4), SwitchingPolicy::average_dwell(0.7, 3, 0.05),
                          SwitchingPolicy::periodic(0.25, {0, 1, 1})}) {
        const auto pts = switch_times(p, 5.0);
        ASSERT_FALSE(pts.empty());
        for (const auto& sp : pts) {
            EXPECT_EQ(mode_at(p, sp.time), sp.mode);
        }
    }
}

TEST(SwitchTimes, MinDwellGapsRespectTau) {
    const auto p = SwitchingPolicy::min_dwell(0.4, 0.2, 1);
    const auto pts = switch_times(p, 50.0);
    ASSERT_GT(pts.size(), 50u);
    double prev = 0.0;
    for (const auto& sp : pts) {
        EXPECT_GE(sp.time - prev, 0.4 - 1e-12);
        EXPECT_LE(sp.time - prev, 0.4 * 1.2 + 1e-12);
        prev = sp.time;
    }
    const auto again = switch_times(SwitchingPolicy::min_dwell(0.4, 0.2, 1), 50.0);
    ASSERT_EQ(again.size(), pts.size());
    EXPECT_EQ(again.back().time, pts.back().time);
}

TEST(AdtCount, Examples) {
    const auto p = SwitchingPolicy::periodic(1.0);
    EXPECT_EQ(adt_count(p, 0.0, 0.5), 0u);
    EXPECT_EQ(adt_count(p, 0.0, 1.0), 1u);
    EXPECT_EQ(adt_count(p, 1.0, 3.0), 2u);
    EXPECT_EQ(adt_count(p, 0.5, 10.0), 10u);
    EXPECT_THROW(adt_count(p, 2.0, 1.0), PreconditionError);
}

TEST(AdtCheck, BurstThenSpacedPasses) {
    const auto p = SwitchingPolicy::average_dwell(1.0, 3, 0.01);
    EXPECT_EQ(adt_count(p, 0.0, 0.05), 3u);
    EXPECT_TRUE(check_adt(p, 3, 1.0, 20.0).pass);
    EXPECT_FALSE(check_adt(p, 2, 1.0, 20.0).pass);
    EXPECT_FALSE(check_adt(p, 3, 2.0, 20.0).pass);
}

TEST(Validate, RejectsMalformedPolicies) {
    EXPECT_THROW(validate_policy(SwitchingPolicy::periodic(0.0), 2), PreconditionError);
    EXPECT_THROW(validate_policy(SwitchingPolicy::periodic(1.0, {0, 2}), 2), PreconditionError);
    EXPECT_THROW(validate_policy(SwitchingPolicy::min_dwell(-1.0, 0.0, 0), 2), PreconditionError);
    EXPECT_THROW(validate_policy(SwitchingPolicy::fixed(0, {{2.0, 1}, {1.0, 0}}), 2), PreconditionError);
    EXPECT_THROW(validate_policy(SwitchingPolicy::state_dependent(0.0), 2), PreconditionError);
    EXPECT_NO_THROW(validate_policy(SwitchingPolicy::constant(1), 2));
}

TEST(KindNames, RoundTrip) {
    for (auto k : {SwitchingKind::kFixedSequence, SwitchingKind::kPeriodic, SwitchingKind::kMinDwell,
                   SwitchingKind::kAverageDwell, SwitchingKind::kStateDependent}) {
        EXPECT_EQ(switching_kind_from_string(to_string(k)), k);
    }
    EXPECT_THROW(switching_kind_from_string("sometimes"), ParseError);
}

namespace {

Controller pair(double mu) {
    const Matrix k = Matrix::Zero(1, 2);
    Controller c = controller_from_gains(mu, Matrix::Identity(2, 2), {Matrix::Identity(2, 2), 4.0 * Matrix::Identity(2, 2)},
                                         {k, k}, {k, k}, {1.0, 1.0});
    c.gamma = 2.0;
    c.c1 = 1.0;
    c.c2 = 1.0;
    return c;
}

}  // namespace

TEST(StateDependentDwell, NextSwitchExamples) {
    const Controller c = pair(-0.5);
    const Vector unit = (Vector(2) << 1.0, 0.0).finished();
    EXPECT_NEAR(sddt_next_switch(c, unit, 2.0, 2.1), 3.0, 1e-9);
    EXPECT_NEAR(sddt_next_switch(c, unit, 2.0, 5.0), 5.0, 0.0);
    EXPECT_NEAR(sddt_next_switch(c, Vector::Zero(2), 2.0, 2.1), 2.1, 0.0);
    // Larger states need longer dwell for mu < 0.
    EXPECT_GT(sddt_next_switch(c, 4.0 * unit, 0.0, 0.0), sddt_next_switch(c, unit, 0.0, 0.0));
}

TEST(StateDependentDwell, Supervisor) {
    const Controller c = pair(-0.5);
    DwellSupervisor sup(c, SwitchingPolicy::state_dependent(0.2));
    EXPECT_EQ(sup.current_mode(), 0u);
    EXPECT_EQ(sup.next_mode(), 1u);
    EXPECT_NEAR(sup.on_switch(0.0, (Vector(2) << 1.0, 0.0).finished()), 1.0, 1e-9);
    EXPECT_NEAR(sup.on_switch(0.0, Vector::Zero(2)), 0.2, 1e-15);
    sup.advance();
    EXPECT_EQ(sup.current_mode(), 1u);
    EXPECT_THROW(DwellSupervisor(c, SwitchingPolicy::periodic(1.0)), PreconditionError);
}
