#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "relaypower/dlt.hpp"

using namespace relaypower;

namespace {
const ChannelGains kRef{1.0, 10.0, 3.0};
const CircuitModel kCm = CircuitModel::from_aggregates(0.2, 0.24, 0.18);
}  // namespace

TEST(PEe1, MatchesStationarityOracle) {
  const double p = p_ee1(kRef, kCm);
  EXPECT_NEAR(p, 0.70, 0.01);
  EXPECT_NEAR(p, oracle::ee_argmax(1.0, 0.2), 1e-7);
}

TEST(PEe1, ScalesWithGain) {
  const double base = p_ee1({1.0, 0, 0}, CircuitModel::from_aggregates(0.2, 0, 0));
  const double scaled = p_ee1({2.0, 0, 0}, CircuitModel::from_aggregates(0.1, 0, 0));
  EXPECT_NEAR(scaled, 0.5 * base, 1e-8);
}

TEST(PEe1, Errors) {
  EXPECT_THROW(p_ee1({0.0, 1, 1}, kCm), DegenerateChannelError);
  EXPECT_THROW(p_ee1(kRef, CircuitModel::from_aggregates(0.0, 0.2, 0.2)), DomainError);
}

TEST(PEe1, StationarityIdentity) {
  for (const auto& p : oracle::random_params(20, 101)) {
    const ChannelGains g{p.h_sd, p.h_sr, p.h_rd};
    const CircuitModel cm = CircuitModel::from_aggregates(p.alpha_d, p.alpha_r, p.alpha_e);
    const double x = p_ee1(g, cm);
    const double lhs = g.h_sd / (std::log(2.0) * (1 + x * g.h_sd));
    const double rhs = capacity(x * g.h_sd) / (x + cm.alpha_d());
    EXPECT_LE(std::abs(lhs - rhs), 1e-6);
  }
}

TEST(SolveDlt, ZeroBudgetIsSilent) {
  const DltSolution s = solve_dlt(0.0, kRef, kCm);
  EXPECT_EQ(s.alloc.mode, Mode::SILENT);
  EXPECT_EQ(s.alloc.throughput, 0.0);
}

TEST(SolveDlt, OnOffBranch) {
  const DltSolution s = solve_dlt(0.45, kRef, kCm);
  const double pe = oracle::ee_argmax(1.0, 0.2);
  EXPECT_NEAR(s.alloc.p_s, pe, 1e-7);
  EXPECT_NEAR(s.alloc.prob, 0.45 / (pe + 0.2), 1e-7);
  EXPECT_NEAR(s.alloc.prob, 0.5, 0.01);
  EXPECT_NEAR(s.alloc.throughput, 0.45 / (pe + 0.2) * std::log2(1 + pe), 1e-9);
  EXPECT_NEAR(s.alloc.throughput, 0.383, 0.005);
  EXPECT_NEAR(s.alloc.avg_power, 0.45, 1e-12);
  EXPECT_EQ(s.alloc.p_r, 0.0);
}

TEST(SolveDlt, ConstantBranch) {
  const DltSolution s = solve_dlt(5.2, kRef, kCm);
  EXPECT_NEAR(s.alloc.p_s, 5.0, 1e-12);
  EXPECT_EQ(s.alloc.prob, 1.0);
  EXPECT_NEAR(s.alloc.throughput, std::log2(6.0), 1e-12);
  EXPECT_NEAR(s.alloc.avg_power, 5.2, 1e-12);
}

TEST(SolveDlt, RejectsNegativeBudget) { EXPECT_THROW(solve_dlt(-0.1, kRef, kCm), ValidationError); }

TEST(CD, ContinuousAndSmoothAtBreakpoint) {
  const DltModel m(kRef, kCm);
  const double b = m.breakpoint();
  EXPECT_NEAR(m.ee_max() * b, capacity((b - kCm.alpha_d()) * kRef.h_sd), 1e-9);
  const double right = kRef.h_sd * capacity_slope((b - kCm.alpha_d()) * kRef.h_sd);
  EXPECT_NEAR(m.slope(b), right, 1e-6);
  EXPECT_EQ(c_d(0.0, kRef, kCm), 0.0);
}

TEST(CD, OnOffBranchHasConstantEfficiency) {
  const DltModel m(kRef, kCm);
  for (int i = 1; i <= 50; ++i) {
    const double pa = m.breakpoint() * i / 50.0;
    EXPECT_NEAR(m.throughput(pa) / pa, m.ee_max(), 1e-12);
  }
}

TEST(CD, NondecreasingAndConcave) {
  for (const auto& p : oracle::random_params(10, 7)) {
    const DltModel m({p.h_sd, p.h_sr, p.h_rd}, CircuitModel::from_aggregates(p.alpha_d, 0, 0));
    const double h = 0.015;
    double prev = m.throughput(0);
    for (int i = 1; i < 400; ++i) {
      const double x = h * i;
      const double y = m.throughput(x);
      EXPECT_GE(y, prev);
      EXPECT_LE(m.throughput(x + h) - 2 * y + prev, 1e-9);
      prev = y;
    }
  }
}

TEST(CD, AnalyticSlopeMatchesDifference) {
  const DltModel m(kRef, kCm);
  for (double x : {0.3, 1.5, 4.0, 30.0}) {
    const double h = 1e-6;
    EXPECT_NEAR(m.slope(x), (m.throughput(x + h) - m.throughput(x - h)) / (2 * h), 1e-6);
  }
}

TEST(CD, MatchesGridOracle) {
  for (const auto& p : oracle::random_params(20, 2024)) {
    const ChannelGains g{p.h_sd, p.h_sr, p.h_rd};
    const CircuitModel cm = CircuitModel::from_aggregates(p.alpha_d, p.alpha_r, p.alpha_e);
    EXPECT_NEAR(c_d(p.budget, g, cm), oracle::dlt_value(p.budget, p.h_sd, p.alpha_d), 1e-4);
  }
}
