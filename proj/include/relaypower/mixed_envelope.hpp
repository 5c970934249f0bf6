#pragma once

// Mixed transmission (MT): time sharing between DLT and RAT-DL. The optimal
// average throughput C_M is the upper concave envelope of max(C_D, C_R), and
// the bridges of that envelope are common tangent lines of the two curves.
//
//   CASE1  no common tangent: C_D dominates, use DLT alone
//   CASE2  one tangent (a = t2 on C_D, b = t1 on C_R), t1 < t2:
//          RAT-DL below t1, time sharing on (t1, t2), DLT above t2
//   CASE3  two tangents (t3, t4) and (t6, t5), t3 < t4 < t5 < t6:
//          DLT, sharing, RAT-DL, sharing, DLT
//
// The tangents come from Newton on the tangency equations. A log-grid hull
// of max(C_D, C_R) supplies extra seeds and cross-checks the result.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "relaypower/core_model.hpp"
#include "relaypower/dlt.hpp"
#include "relaypower/numerics.hpp"
#include "relaypower/rat_dl.hpp"

namespace relaypower {

enum class MixedCase { Case1, Case2, Case3 };

inline std::string_view to_string(MixedCase c) {
  switch (c) {
    case MixedCase::Case1: return "CASE1";
    case MixedCase::Case2: return "CASE2";
    case MixedCase::Case3: return "CASE3";
  }
  return "?";
}

/// Common tangent touching C_D at a and C_R at b.
struct TangentPair {
  double a = 0.0;
  double b = 0.0;
};

struct TangentStructure {
  MixedCase case_label = MixedCase::Case1;
  /// Empty for CASE1; {(t2, t1)} for CASE2; {(t3, t4), (t6, t5)} for CASE3.
  std::vector<TangentPair> tangents;
  /// Upper end of the seed window actually used.
  double p_max = 0.0;
};

struct EnvelopeOptions {
  /// Seed window for the tangent solver; 0 picks it automatically.
  double p_max = 0.0;
  int seeds_per_axis = 8;
  /// Cross-check against the grid hull and throw InconsistencyError on mismatch.
  bool validate = true;
  double validate_tol = 1e-3;
};

struct MixedSolution {
  double p_a_star = 0.0;
  double p_b_star = 0.0;
  double theta_star = 1.0;
  double throughput = 0.0;
  MixedCase case_label = MixedCase::Case1;
  ModeAllocation dlt_alloc;
  ModeAllocation rat_alloc;
  bool relay_admissible = true;

  /// "DLT" when theta = 1, "RAT_DL" when theta = 0, otherwise "MT".
  std::string_view winner() const {
    if (theta_star >= 1.0) return "DLT";
    if (theta_star <= 0.0) return "RAT_DL";
    return "MT";
  }
};

namespace detail {

struct HullVertex {
  double x = 0.0;
  double y = 0.0;
  int owner = 0;  // 0 origin, 1 C_D, 2 C_R
};

/// Upper concave hull of max(C_D, C_R) sampled at 0 and on a 1% log grid.
/// The grid is extended until C_D is on top at its right end.
template <class D, class R>
std::vector<HullVertex> envelope_hull(const D& c_d, const R& c_r, std::vector<HullVertex>* samples) {
  double hi = std::ldexp(1.0, 20);
  while (c_r(hi) >= c_d(hi) && hi < std::ldexp(1.0, 60)) hi *= 2.0;
  const double lo = 1e-4;
  const int n = static_cast<int>(std::ceil(std::log(hi / lo) / std::log(1.01))) + 1;

  std::vector<HullVertex> pts;
  pts.reserve(n + 1);
  pts.push_back({0.0, 0.0, 0});
  for (int i = 0; i < n; ++i) {
    const double x = i + 1 == n ? hi : lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1));
    const double d = c_d(x);
    const double r = c_r(x);
    pts.push_back(d >= r ? HullVertex{x, d, 1} : HullVertex{x, r, 2});
  }

  std::vector<HullVertex> hull;
  for (const HullVertex& p : pts) {
    while (hull.size() >= 2) {
      const HullVertex& o = hull[hull.size() - 2];
      const HullVertex& a = hull.back();
      const double cross = (a.x - o.x) * (p.y - o.y) - (a.y - o.y) * (p.x - o.x);
      if (cross < 0.0) break;
      hull.pop_back();
    }
    hull.push_back(p);
  }
  if (samples) *samples = std::move(pts);
  return hull;
}

/// Hull value at x by linear interpolation between vertices.
inline double hull_value(const std::vector<HullVertex>& hull, double x) {
  auto it = std::lower_bound(hull.begin(), hull.end(), x,
                             [](const HullVertex& v, double t) { return v.x < t; });
  if (it == hull.end()) return hull.back().y;
  if (it == hull.begin() || it->x == x) return it->y;
  const HullVertex& l = *(it - 1);
  const HullVertex& r = *it;
  return l.y + (r.y - l.y) * (x - l.x) / (r.x - l.x);
}

/// Hull edges whose endpoints belong to different curves.
inline std::vector<TangentPair> hull_bridges(const std::vector<HullVertex>& hull) {
  std::vector<TangentPair> out;
  for (std::size_t i = 0; i + 1 < hull.size(); ++i) {
    const HullVertex& l = hull[i];
    const HullVertex& r = hull[i + 1];
    if (l.owner == 0 || r.owner == 0 || l.owner == r.owner) continue;
    out.push_back(l.owner == 1 ? TangentPair{l.x, r.x} : TangentPair{r.x, l.x});
  }
  return out;
}

}  // namespace detail

class MixedModel {
 public:
  MixedModel(const ChannelGains& g, const CircuitModel& cm, const EnvelopeOptions& opt = {},
             const SearchConfig& cfg = {})
      : dlt_(g, cm, cfg) {
    if (!g.relay_admissible()) return;
    rat_.emplace(g, cm, cfg);
    build_structure(opt, cfg);
  }

  bool relay_admissible() const noexcept { return rat_.has_value(); }
  const TangentStructure& structure() const noexcept { return structure_; }
  const DltModel& dlt() const noexcept { return dlt_; }
  const std::optional<RatDlModel>& rat() const noexcept { return rat_; }

  MixedSolution solve(double p0) const {
    detail::require_nonnegative(p0, "P_0");
    MixedSolution sol;
    sol.case_label = structure_.case_label;
    sol.relay_admissible = relay_admissible();

    double p_a = p0;
    double p_b = 0.0;
    const auto& t = structure_.tangents;
    auto rat_only = [&] { p_a = 0.0; p_b = p0; };
    auto share = [&](const TangentPair& tp) { p_a = tp.a; p_b = tp.b; };
    if (p0 > 0.0) {
      if (structure_.case_label == MixedCase::Case2) {
        if (p0 <= t[0].b) rat_only();
        else if (p0 < t[0].a) share(t[0]);
      } else if (structure_.case_label == MixedCase::Case3) {
        if (p0 > t[0].a && p0 < t[0].b) share(t[0]);
        else if (p0 >= t[0].b && p0 <= t[1].b) rat_only();
        else if (p0 > t[1].b && p0 < t[1].a) share(t[1]);
      }
    }

    double theta = 1.0;
    if (p_a == 0.0 && p_b > 0.0) theta = 0.0;
    else if (p_a != p_b) theta = (p0 - p_b) / (p_a - p_b);
    sol.p_a_star = p_a;
    sol.p_b_star = p_b;
    sol.theta_star = std::clamp(theta, 0.0, 1.0);
    if (sol.theta_star > 0.0) sol.dlt_alloc = dlt_.solve(p_a).alloc;
    if (sol.theta_star < 1.0) sol.rat_alloc = rat_->solve(p_b).allocation();
    const double cd = sol.theta_star > 0.0 ? dlt_.throughput(p_a) : 0.0;
    const double cr = sol.theta_star < 1.0 ? rat_->throughput(p_b) : 0.0;
    sol.throughput = sol.theta_star * cd + (1.0 - sol.theta_star) * cr;
    return sol;
  }

  double throughput(double p0) const { return solve(p0).throughput; }

 private:
  void build_structure(const EnvelopeOptions& opt, const SearchConfig& cfg) {
    const RatDlModel& rat = *rat_;
    auto c_d = [&](double x) { return dlt_.throughput(x); };
    auto c_r = [&](double x) { return rat.throughput(x); };
    std::vector<detail::HullVertex> samples;
    const auto hull = detail::envelope_hull(c_d, c_r, &samples);
    const auto bridges = detail::hull_bridges(hull);

    double p_max = opt.p_max;
    if (!(p_max > 0.0)) {
      const PowerPair ee = rat.ee_point();
      p_max = 4.0 * (dlt_.breakpoint() + ee.sum() + 2.0 * rat.circuit().alpha_r());
      for (const TangentPair& tp : bridges) p_max = std::max(p_max, 4.0 * std::max(tp.a, tp.b));
    }
    structure_.p_max = p_max;

    // Tangency: equal slopes, and the slope equals the chord between the points.
    constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
    auto residual = [&](const Point2& x) -> Point2 {
      const double a = x[0];
      const double b = x[1];
      if (!(a > 0.0) || !(b > 0.0)) return {kNaN, kNaN};
      const double sd = dlt_.slope(a);
      return {sd - rat.slope(b), sd * (a - b) - (dlt_.throughput(a) - rat.throughput(b))};
    };
    std::vector<Point2> seeds;
    for (const TangentPair& tp : bridges) seeds.push_back({tp.a, tp.b});
    const int n = std::max(2, opt.seeds_per_axis);
    const double lo = 1e-3;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        seeds.push_back({lo * std::pow(p_max / lo, static_cast<double>(i) / (n - 1)),
                         lo * std::pow(p_max / lo, static_cast<double>(j) / (n - 1))});
      }
    }
    auto roots = solve_stationary_2d(residual, seeds, cfg);
    std::sort(roots.begin(), roots.end(), [](const Point2& l, const Point2& r) { return l[0] < r[0]; });

    if (roots.size() > 2) {
      throw InconsistencyError("MT: " + std::to_string(roots.size()) + " common tangents found");
    }
    for (const Point2& r : roots) structure_.tangents.push_back({r[0], r[1]});
    if (roots.size() == 1) {
      if (!(roots[0][1] < roots[0][0])) {
        throw InconsistencyError("MT: single tangent touches C_R above C_D (b >= a)");
      }
      structure_.case_label = MixedCase::Case2;
    } else if (roots.size() == 2) {
      const TangentPair& p1 = structure_.tangents[0];
      const TangentPair& p2 = structure_.tangents[1];
      if (!(p1.a < p1.b && p1.b < p2.b && p2.b < p2.a)) {
        throw InconsistencyError("MT: tangent pairs violate a1 < b1 < b2 < a2");
      }
      structure_.case_label = MixedCase::Case3;
    }

    if (!opt.validate) return;
    if (bridges.size() != roots.size()) {
      throw InconsistencyError("MT: " + std::to_string(roots.size()) +
                               " tangents from Newton but the grid hull has " +
                               std::to_string(bridges.size()) + " bridges");
    }
    for (const detail::HullVertex& s : samples) {
      if (s.x > p_max) break;
      const double diff = std::abs(throughput(s.x) - detail::hull_value(hull, s.x));
      if (diff > opt.validate_tol) {
        throw InconsistencyError("MT: envelope differs from grid hull by " + std::to_string(diff) +
                                 " at P_0 = " + std::to_string(s.x));
      }
    }
  }

  DltModel dlt_;
  std::optional<RatDlModel> rat_;
  TangentStructure structure_;
};

inline TangentStructure classify_and_tangents(const ChannelGains& g, const CircuitModel& cm,
                                              double p_max = 0.0) {
  if (!g.relay_admissible()) {
    throw InadmissibleModeError("MT tangents require h_sr >= 2 h_sd");
  }
  EnvelopeOptions opt;
  opt.p_max = p_max;
  return MixedModel(g, cm, opt).structure();
}

inline MixedSolution solve_mixed(double p0, const ChannelGains& g, const CircuitModel& cm) {
  return MixedModel(g, cm).solve(p0);
}

}  // namespace relaypower
