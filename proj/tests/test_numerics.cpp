#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "relaypower/numerics.hpp"

using namespace relaypower;

namespace {
double ee_d(double x) { return std::log2(1.0 + x) / (x + 0.2); }
}  // namespace

TEST(MaximizeUnimodal, QuadraticVertex) {
  const Maximum m = maximize_unimodal([](double x) { return -(x - 2) * (x - 2); }, 0.0, 10.0);
  EXPECT_NEAR(m.x, 2.0, 1e-8);
  EXPECT_NEAR(m.value, 0.0, 1e-14);
}

TEST(MaximizeUnimodal, EnergyEfficiencyMatchesStationarityOracle) {
  const double ref = oracle::ee_argmax(1.0, 0.2);
  EXPECT_NEAR(ref, 0.70, 0.01);
  const Maximum m = maximize_unimodal(ee_d, 1e-9, 100.0);
  EXPECT_NEAR(m.x, ref, 1e-7);
}

TEST(MaximizeUnimodal, BoundaryMaximum) {
  const Maximum m = maximize_unimodal([](double x) { return x; }, 0.0, 1.0);
  EXPECT_EQ(m.x, 1.0);
  EXPECT_EQ(m.value, 1.0);
}

TEST(MaximizeUnimodal, NeverWorseThanEndpoints) {
  const Maximum m = maximize_unimodal([](double x) { return -x; }, 0.0, 3.0);
  EXPECT_EQ(m.x, 0.0);
}

TEST(MaximizeUnimodal, ResultIsLocalMax) {
  SearchConfig cfg;
  const Maximum m = maximize_unimodal(ee_d, 0.0, 50.0, cfg);
  const double d = 10 * cfg.abs_tol;
  EXPECT_LE(ee_d(m.x + d), m.value + 1e-12);
  EXPECT_LE(ee_d(m.x - d), m.value + 1e-12);
}

TEST(MaximizeUnimodal, NonFiniteValueReportsAbscissa) {
  try {
    maximize_unimodal([](double x) { return x > 3 ? NAN : x; }, 0.0, 10.0);
    FAIL() << "expected NumericalError";
  } catch (const NumericalError& e) {
    EXPECT_NE(std::string(e.what()).find("x ="), std::string::npos);
  }
}

TEST(MaximizeUnimodal, RejectsInvertedInterval) {
  EXPECT_THROW(maximize_unimodal(ee_d, 2.0, 1.0), ValidationError);
}

TEST(BracketAbove, ContainsEeMaximizer) {
  const Bracket b = bracket_above(ee_d);
  const double ref = oracle::ee_argmax(1.0, 0.2);
  EXPECT_LT(b.lo, ref);
  EXPECT_GT(b.hi, ref);
}

TEST(BracketAbove, ContainsVertexOfXExpMinusX) {
  auto f = [](double x) { return x * std::exp(-x); };
  const Bracket b = bracket_above(f);
  EXPECT_LT(b.lo, 1.0);
  EXPECT_GT(b.hi, 1.0);
}

TEST(BracketAbove, SmallMaximizerBelowSeed) {
  auto f = [](double x) { return x * std::exp(-1000 * x); };
  const Maximum m = maximize_on_half_line(f);
  EXPECT_NEAR(m.x, 1e-3, 1e-9);
}

TEST(BracketAbove, DecreasingFunctionFails) {
  EXPECT_THROW(bracket_above([](double x) { return -x; }), BracketError);
}

TEST(BracketAbove, IncreasingFunctionFails) {
  SearchConfig cfg;
  cfg.max_iter = 30;
  EXPECT_THROW(bracket_above([](double x) { return x; }, cfg), BracketError);
}

TEST(SearchConfig, Validation) {
  SearchConfig c;
  c.bracket_growth = 1.0;
  EXPECT_THROW(c.validate(), ValidationError);
  c = {};
  c.max_iter = 0;
  EXPECT_THROW(c.validate(), ValidationError);
  c = {};
  c.rel_tol = 0;
  EXPECT_THROW(c.validate(), ValidationError);
}

TEST(BisectRoot, Linear) {
  EXPECT_NEAR(bisect_root([](double x) { return x - 3; }, 0.0, 10.0), 3.0, 1e-9);
}

TEST(BisectRoot, EeStationarity) {
  auto f = [](double x) { return (x + 0.2) / (1 + x) - std::log(1 + x); };
  const double r = bisect_root(f, 0.1, 5.0);
  EXPECT_NEAR(r, 0.70, 0.01);
  EXPECT_LE(std::abs(f(r)), 1e-8);
  EXPECT_NEAR(r, oracle::ee_argmax(1.0, 0.2), 1e-8);
}

TEST(BisectRoot, SameSignIsPreconditionError) {
  EXPECT_THROW(bisect_root([](double x) { return x * x; }, -1.0, 1.0), PreconditionError);
  EXPECT_THROW(bisect_root([](double x) { return x * x + 1e-3; }, -1.0, 1.0), PreconditionError);
}

TEST(BisectRoot, ResidualSmallOnRandomCubics) {
  for (int k = 1; k <= 50; ++k) {
    const double c = 0.1 * k;
    auto f = [c](double x) { return x * x * x - c; };
    const double r = bisect_root(f, 0.0, 10.0);
    EXPECT_LE(std::abs(f(r)), 1e-8) << c;
  }
}

TEST(Stationary2d, LinearSystem) {
  const std::vector<Point2> seeds{{0, 0}};
  const auto roots = solve_stationary_2d(
      [](const Point2& p) -> Point2 { return {p[0] - 1, p[1] - 2}; }, seeds);
  ASSERT_EQ(roots.size(), 1u);
  EXPECT_NEAR(roots[0][0], 1, 1e-10);
  EXPECT_NEAR(roots[0][1], 2, 1e-10);
}

TEST(Stationary2d, CircleLineDeduplicated) {
  std::vector<Point2> seeds;
  for (int k = 0; k < 16; ++k) {
    const double t = 2 * M_PI * (k + 0.3) / 16;
    seeds.push_back({1.5 * std::cos(t), 1.5 * std::sin(t)});
  }
  auto residual = [](const Point2& p) -> Point2 {
    return {p[0] * p[0] + p[1] * p[1] - 1, p[0] - p[1]};
  };
  auto roots = solve_stationary_2d(residual, seeds);
  ASSERT_EQ(roots.size(), 2u);
  std::sort(roots.begin(), roots.end());
  EXPECT_NEAR(roots[0][0], -std::sqrt(0.5), 1e-9);
  EXPECT_NEAR(roots[0][1], -std::sqrt(0.5), 1e-9);
  EXPECT_NEAR(roots[1][0], std::sqrt(0.5), 1e-9);
  EXPECT_NEAR(roots[1][1], std::sqrt(0.5), 1e-9);
  for (const auto& r : roots) {
    const Point2 res = residual(r);
    EXPECT_LE(std::max(std::abs(res[0]), std::abs(res[1])), 1e-8);
  }
}

TEST(Stationary2d, NoRootGivesEmptyList) {
  const std::vector<Point2> seeds{{0, 0}, {3, -2}};
  const auto roots = solve_stationary_2d(
      [](const Point2& p) -> Point2 { return {p[0] * p[0] + 1, p[1]}; }, seeds);
  EXPECT_TRUE(roots.empty());
}

TEST(Stationary2d, OutOfDomainSeedsAreDropped) {
  const std::vector<Point2> seeds{{-1, -1}, {2, 2}};
  auto residual = [](const Point2& p) -> Point2 {
    if (p[0] <= 0 || p[1] <= 0) return {NAN, NAN};
    return {std::log(p[0]), std::log(p[1]) - 1};
  };
  const auto roots = solve_stationary_2d(residual, seeds);
  ASSERT_EQ(roots.size(), 1u);
  EXPECT_NEAR(roots[0][0], 1.0, 1e-9);
  EXPECT_NEAR(roots[0][1], std::exp(1.0), 1e-9);
}

TEST(MaximizeBySlopeSign, ReachesMachinePrecision) {
  // x e^{-x} peaks at x = 1; its slope has the sign of 1 - x.
  auto f = [](double x) { return x * std::exp(-x); };
  const Maximum m = maximize_by_slope_sign(f, [](double x) { return 1.0 - x; });
  EXPECT_NEAR(m.x, 1.0, 1e-11);
  EXPECT_DOUBLE_EQ(m.value, std::exp(-1.0));
}
