#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "relaypower/mixed_envelope.hpp"

using namespace relaypower;

namespace {

const ChannelGains kRef{1.0, 10.0, 3.0};
const CircuitModel kCm = CircuitModel::from_aggregates(0.2, 0.24, 0.18);

ChannelGains gains_of(const oracle::Params& p) { return {p.h_sd, p.h_sr, p.h_rd}; }
CircuitModel circuit_of(const oracle::Params& p) {
  return CircuitModel::from_aggregates(p.alpha_d, p.alpha_r, p.alpha_e);
}

void expect_tangency(const MixedModel& m, const TangentPair& t) {
  const DltModel& d = m.dlt();
  const RatDlModel& r = *m.rat();
  EXPECT_NEAR(d.slope(t.a), r.slope(t.b), 1e-6);
  EXPECT_NEAR(d.slope(t.a), (d.throughput(t.a) - r.throughput(t.b)) / (t.a - t.b), 1e-6);
}

// Found by random search over h_sd in [0.5,2], h_sr in [2h_sd,20], h_rd in
// [0.5,10] and alpha in [0.05,0.5]: RAT-DL wins only in a middle band.
const ChannelGains kTwoTangentGains{1.70485, 11.2834, 3.06443};
const CircuitModel kTwoTangentCm = CircuitModel::from_aggregates(0.178719, 0.387046, 0.3);

}  // namespace

TEST(Tangents, DirectLinkDominatesGivesCase1) {
  const ChannelGains g{1.0, 2.0, 0.5};
  const CircuitModel cm = CircuitModel::from_aggregates(0.2, 1.5, 1.4);
  const MixedModel m(g, cm);
  for (int i = 0; i <= 2000; ++i) {
    const double x = 0.01 * i;
    ASSERT_GE(m.dlt().throughput(x), m.rat()->throughput(x));
  }
  EXPECT_EQ(m.structure().case_label, MixedCase::Case1);
  EXPECT_TRUE(m.structure().tangents.empty());
  EXPECT_EQ(m.solve(1.0).theta_star, 1.0);
}

TEST(Tangents, ReferenceHasOneTangent) {
  const MixedModel m(kRef, kCm);
  const TangentStructure& ts = m.structure();
  ASSERT_EQ(ts.case_label, MixedCase::Case2);
  ASSERT_EQ(ts.tangents.size(), 1u);
  EXPECT_LT(ts.tangents[0].b, ts.tangents[0].a);
  expect_tangency(m, ts.tangents[0]);
}

TEST(Tangents, TwoTangentConfiguration) {
  const MixedModel m(kTwoTangentGains, kTwoTangentCm);
  const TangentStructure& ts = m.structure();
  ASSERT_EQ(ts.case_label, MixedCase::Case3);
  ASSERT_EQ(ts.tangents.size(), 2u);
  const double t3 = ts.tangents[0].a, t4 = ts.tangents[0].b;
  const double t6 = ts.tangents[1].a, t5 = ts.tangents[1].b;
  EXPECT_LT(t3, t4);
  EXPECT_LT(t4, t5);
  EXPECT_LT(t5, t6);
  for (const auto& t : ts.tangents) expect_tangency(m, t);

  EXPECT_EQ(m.solve(0.5 * t3).winner(), "DLT");
  EXPECT_EQ(m.solve(0.5 * (t3 + t4)).winner(), "MT");
  EXPECT_EQ(m.solve(0.5 * (t4 + t5)).winner(), "RAT_DL");
  EXPECT_EQ(m.solve(0.5 * (t5 + t6)).winner(), "MT");
  EXPECT_EQ(m.solve(2 * t6).winner(), "DLT");
}

TEST(Tangents, RandomSetsSatisfyTangencyEquations) {
  for (const auto& p : oracle::random_params(20, 61)) {
    const MixedModel m(gains_of(p), circuit_of(p));
    for (const auto& t : m.structure().tangents) expect_tangency(m, t);
  }
}

TEST(Tangents, PowerRelabelingKeepsCase) {
  // P' = k P with gains h / k and circuit powers k alpha describes the same system.
  for (const auto& p : oracle::random_params(10, 62)) {
    const MixedCase base = MixedModel(gains_of(p), circuit_of(p)).structure().case_label;
    for (double k : {0.5, 3.0}) {
      const ChannelGains g{p.h_sd / k, p.h_sr / k, p.h_rd / k};
      const CircuitModel cm =
          CircuitModel::from_aggregates(k * p.alpha_d, k * p.alpha_r, k * p.alpha_e);
      EXPECT_EQ(MixedModel(g, cm).structure().case_label, base);
    }
  }
}

TEST(Tangents, InadmissibleRelayIsRejected) {
  EXPECT_THROW(classify_and_tangents({1, 1, 3}, kCm), InadmissibleModeError);
}

TEST(SolveMixed, ZeroBudget) {
  const MixedSolution s = solve_mixed(0.0, kRef, kCm);
  EXPECT_EQ(s.throughput, 0.0);
  EXPECT_EQ(s.theta_star, 1.0);
}

TEST(SolveMixed, ReferenceLowBudgetIsPureRelay) {
  const MixedSolution s = solve_mixed(0.5, kRef, kCm);
  EXPECT_EQ(s.theta_star, 0.0);
  EXPECT_EQ(s.winner(), "RAT_DL");
  EXPECT_NEAR(s.throughput, c_r(0.5, kRef, kCm), 1e-12);
  const double gap = s.throughput - c_d(0.5, kRef, kCm);
  EXPECT_GE(gap, 0.2);
  EXPECT_LE(gap, 0.4);
  EXPECT_EQ(s.rat_alloc.mode, Mode::RAT_DL);
  EXPECT_EQ(s.dlt_alloc.mode, Mode::SILENT);
}

TEST(SolveMixed, ReferenceHighBudgetIsPureDirect) {
  const MixedSolution s = solve_mixed(std::ldexp(1.0, 10), kRef, kCm);
  EXPECT_EQ(s.theta_star, 1.0);
  EXPECT_EQ(s.winner(), "DLT");
}

TEST(SolveMixed, InadmissibleRelayFallsBackToDirect) {
  const ChannelGains g{1, 1, 3};
  const MixedModel m(g, kCm);
  EXPECT_FALSE(m.relay_admissible());
  const MixedSolution s = m.solve(0.7);
  EXPECT_FALSE(s.relay_admissible);
  EXPECT_EQ(s.theta_star, 1.0);
  EXPECT_NEAR(s.throughput, c_d(0.7, g, kCm), 1e-15);
}

TEST(SolveMixed, BudgetAndValueIdentities) {
  for (const auto& p : oracle::random_params(20, 63)) {
    const MixedModel m(gains_of(p), circuit_of(p));
    for (int i = 0; i <= 100; ++i) {
      const double p0 = 0.03 * i;
      const MixedSolution s = m.solve(p0);
      EXPECT_GE(s.theta_star, 0.0);
      EXPECT_LE(s.theta_star, 1.0);
      EXPECT_NEAR(s.theta_star * s.p_a_star + (1 - s.theta_star) * s.p_b_star, p0, 1e-9);
      const double cd = s.theta_star > 0 ? m.dlt().throughput(s.p_a_star) : 0.0;
      const double cr = s.theta_star < 1 ? m.rat()->throughput(s.p_b_star) : 0.0;
      EXPECT_NEAR(s.throughput, s.theta_star * cd + (1 - s.theta_star) * cr, 1e-12);
    }
  }
}

TEST(SolveMixed, DominatesBothModes) {
  for (const auto& p : oracle::random_params(20, 64)) {
    const MixedModel m(gains_of(p), circuit_of(p));
    for (int i = 0; i <= 300; ++i) {
      const double p0 = 0.01 * i;
      const double best = std::max(m.dlt().throughput(p0), m.rat()->throughput(p0));
      EXPECT_GE(m.throughput(p0), best - 1e-9);
    }
  }
}

TEST(SolveMixed, MatchesUniformHullOracle) {
  for (const auto& p : oracle::random_params(20, 65)) {
    const MixedModel m(gains_of(p), circuit_of(p));
    const double hi = m.structure().p_max;
    oracle::UniformHull hull(
        [&](double x) { return std::max(m.dlt().throughput(x), m.rat()->throughput(x)); }, 2 * hi,
        200000);
    for (int i = 0; i <= 400; ++i) {
      const double p0 = hi * i / 400;
      EXPECT_NEAR(m.throughput(p0), hull(p0), 1e-3) << p0;
    }
  }
}

TEST(SolveMixed, LinearOnTangentSegments) {
  for (const auto& [g, cm] : {std::pair{kRef, kCm}, std::pair{kTwoTangentGains, kTwoTangentCm}}) {
    const MixedModel m(g, cm);
    for (const auto& t : m.structure().tangents) {
      const double lo = std::min(t.a, t.b);
      const double hi = std::max(t.a, t.b);
      const double h = (hi - lo) / 100;
      for (int i = 1; i < 99; ++i) {
        const double x = lo + h * i;
        EXPECT_LE(std::abs(m.throughput(x + h) - 2 * m.throughput(x) + m.throughput(x - h)), 1e-9);
      }
    }
  }
}

TEST(SolveMixed, LowBudgetPicksHigherEfficiency) {
  for (const auto& p : oracle::random_params(20, 66)) {
    const MixedModel m(gains_of(p), circuit_of(p));
    const double best = std::max(m.dlt().ee_max(), m.rat()->low_snr_slope());
    EXPECT_NEAR(m.throughput(1e-6) / 1e-6, best, 1e-9);
  }
}

TEST(SolveMixed, ConcaveOnGrid) {
  for (const auto& p : oracle::random_params(10, 67)) {
    const MixedModel m(gains_of(p), circuit_of(p));
    const double h = 3.0 / 199;
    for (int i = 1; i < 199; ++i) {
      const double x = h * i;
      EXPECT_LE(m.throughput(x + h) - 2 * m.throughput(x) + m.throughput(x - h), 1e-8);
    }
  }
}
