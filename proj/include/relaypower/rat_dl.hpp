#pragma once

// Relay-assisted transmission with direct link (RAT-DL).
//
// After eliminating the transmission probability, the problem is to maximize
// the energy efficiency [C(P_S h_sd) + C(P_R h_rd)] / (P_S + P_R + 2 alpha_R)
// subject to two constraints:
//
//   power line   P_S + P_R >= 2 P_B - 2 alpha_R     (probability <= 1)
//   decode cap   P_R <= P_S (h_sr - h_sd) / (h_rd (1 + P_S h_sd))
//
// The optimum has one of four shapes, depending on which constraints bind:
//
//   EeInterior     neither; burst at the joint EE optimum (P_ee2, P_ee3)
//   DecodeBinding  decode cap only; burst at P_ee4 on the decode curve
//   PowerBinding   power line only; constant transmission, water-filling
//   BothBinding    both; constant transmission at (V, 2P_B - 2alpha_R - V)

#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <string_view>
#include <vector>

#include "relaypower/core_model.hpp"
#include "relaypower/numerics.hpp"

namespace relaypower {

enum class RatDlCase { EeInterior, DecodeBinding, PowerBinding, BothBinding };

inline std::string_view to_string(RatDlCase c) {
  switch (c) {
    case RatDlCase::EeInterior: return "CASE1_EE_INTERIOR";
    case RatDlCase::DecodeBinding: return "CASE2_DECODE_BINDING";
    case RatDlCase::PowerBinding: return "CASE3_POWER_BINDING";
    case RatDlCase::BothBinding: return "CASE4_BOTH_BINDING";
  }
  return "?";
}

/// Source/relay power pair.
struct PowerPair {
  double p_s = 0.0;
  double p_r = 0.0;
  double sum() const noexcept { return p_s + p_r; }
};

struct RatDlSolution {
  RatDlCase case_label = RatDlCase::EeInterior;
  double p_s = 0.0;
  double p_r = 0.0;
  double prob = 0.0;
  double throughput = 0.0;
  double avg_power = 0.0;
  double p_ee2 = 0.0;
  double p_ee3 = 0.0;
  double p_ee4 = 0.0;
  double u = 0.0;
  /// Positive root of the both-binding quadratic; NaN when P_B < alpha_R.
  double v = std::numeric_limits<double>::quiet_NaN();
  /// False when the binding-constraint conditions picked a candidate that
  /// is not the best feasible one (the best one is returned instead).
  bool condition_logic_agreed = true;

  ModeAllocation allocation() const {
    if (prob == 0.0) return ModeAllocation::silent();
    return {Mode::RAT_DL, p_s, p_r, prob, throughput, avg_power};
  }
};

namespace detail {

/// Largest relay power the relay can still decode for, given P_S.
inline double decode_limit(double p_s, const ChannelGains& g) {
  return p_s * (g.h_sr - g.h_sd) / (g.h_rd * (1.0 + p_s * g.h_sd));
}

/// Splits a total transmit power between the source->destination and
/// relay->destination links so that the marginal rates match:
/// P_R - P_S = 1/h_sd - 1/h_rd, with the weaker side clamped at 0.
inline PowerPair water_fill(double total, const ChannelGains& g) {
  const double level = 0.5 * (total + 1.0 / g.h_sd + 1.0 / g.h_rd);
  PowerPair p{level - 1.0 / g.h_sd, level - 1.0 / g.h_rd};
  if (p.p_s < 0.0) p = {0.0, total};
  if (p.p_r < 0.0) p = {total, 0.0};
  return p;
}

inline double sum_rate(const PowerPair& p, const ChannelGains& g) {
  return capacity(p.p_s * g.h_sd) + capacity(p.p_r * g.h_rd);
}

}  // namespace detail

/// U coefficient of the decode-binding subproblem (depends on P_B).
inline double u_coefficient(double p_b, const ChannelGains& g, const CircuitModel& cm) {
  return g.h_sr + g.h_rd - g.h_sd + 2.0 * cm.alpha_r() * g.h_sd * g.h_rd -
         2.0 * g.h_sd * g.h_rd * p_b;
}

/// Joint EE maximizer (P_ee2, P_ee3) over P_S, P_R >= 0, ignoring both
/// constraints. The maximizer lies on the water-filling path, so the search
/// runs over the total power only.
inline PowerPair p_ee2_p_ee3(const ChannelGains& g, const CircuitModel& cm,
                             const SearchConfig& cfg = {}) {
  if (!(g.h_sd > 0.0) || !(g.h_rd > 0.0)) {
    throw DegenerateChannelError("p_ee2_p_ee3: h_sd and h_rd must be > 0");
  }
  if (!(cm.alpha_r() > 0.0)) {
    throw DomainError("p_ee2_p_ee3: alpha_r must be > 0");
  }
  auto ee = [&](double total) {
    return detail::sum_rate(detail::water_fill(total, g), g) / (total + 2.0 * cm.alpha_r());
  };
  // Along the water-filling path the marginal rate is the larger of the two
  // per-link marginals (equal whenever both links are active).
  auto rising = [&](double total) {
    const PowerPair p = detail::water_fill(total, g);
    const double marginal =
        std::max(capacity_slope(p.p_s * g.h_sd) * g.h_sd, capacity_slope(p.p_r * g.h_rd) * g.h_rd);
    return marginal * (total + 2.0 * cm.alpha_r()) - detail::sum_rate(p, g);
  };
  return detail::water_fill(maximize_by_slope_sign(ee, rising, cfg).x, g);
}

/// EE along the decode-binding curve, written in the U form. The P_B terms
/// cancel, so the maximizer does not actually depend on P_B.
inline double decode_curve_ee(double p_s, double p_b, const ChannelGains& g,
                              const CircuitModel& cm) {
  const double u = u_coefficient(p_b, g, cm);
  const double num = (1.0 + p_s * g.h_sd) * g.h_rd * capacity(p_s * g.h_sr);
  const double den = g.h_sd * g.h_rd * p_s * p_s +
                     (u + 2.0 * g.h_sd * g.h_rd * p_b) * p_s + 2.0 * cm.alpha_r() * g.h_rd;
  return num / den;
}

/// Source power maximizing EE when the decode constraint binds.
inline double p_ee4(double p_b, const ChannelGains& g, const CircuitModel& cm,
                    const SearchConfig& cfg = {}) {
  if (!(g.h_rd > 0.0) || !(g.h_sr > 0.0)) {
    throw DegenerateChannelError("p_ee4: h_sr and h_rd must be > 0");
  }
  if (!(cm.alpha_r() > 0.0)) {
    throw DomainError("p_ee4: alpha_r must be > 0");
  }
  auto ee = [&](double p_s) { return decode_curve_ee(p_s, p_b, g, cm); };
  // N'D - N D' for EE = N / D; the P_B terms of D cancel here as well.
  const double lin = u_coefficient(p_b, g, cm) + 2.0 * g.h_sd * g.h_rd * p_b;
  auto rising = [&](double p_s) {
    const double n = (1.0 + p_s * g.h_sd) * g.h_rd * capacity(p_s * g.h_sr);
    const double dn = g.h_sd * g.h_rd * capacity(p_s * g.h_sr) +
                      (1.0 + p_s * g.h_sd) * g.h_rd * g.h_sr * capacity_slope(p_s * g.h_sr);
    const double d = g.h_sd * g.h_rd * p_s * p_s + lin * p_s + 2.0 * cm.alpha_r() * g.h_rd;
    const double dd = 2.0 * g.h_sd * g.h_rd * p_s + lin;
    return dn * d - n * dd;
  };
  return maximize_by_slope_sign(ee, rising, cfg).x;
}

/// Source power where the decode curve meets the power line, i.e. the
/// non-negative root of h_sd h_rd V^2 + U V - 2 (P_B - alpha_R) h_rd = 0.
inline double v_root(double p_b, const ChannelGains& g, const CircuitModel& cm) {
  if (p_b < cm.alpha_r()) {
    throw DomainError("v_root: P_B < alpha_R, the power line lies outside the feasible quadrant");
  }
  const double a = g.h_sd * g.h_rd;
  const double u = u_coefficient(p_b, g, cm);
  const double c = 2.0 * (p_b - cm.alpha_r()) * g.h_rd;
  const double disc = std::sqrt(u * u + 4.0 * a * c);
  // Pick the cancellation-free form of the same root.
  if (u >= 0.0) {
    const double den = u + disc;
    return den > 0.0 ? 2.0 * c / den : 0.0;
  }
  return (-u + disc) / (2.0 * a);
}

/// RAT-DL solver for fixed gains and circuit powers. The EE points
/// P_ee2, P_ee3 and P_ee4 do not depend on the budget and are computed once.
class RatDlModel {
 public:
  RatDlModel(const ChannelGains& g, const CircuitModel& cm, const SearchConfig& cfg = {})
      : g_(g), cm_(cm) {
    if (!g.relay_admissible()) {
      throw InadmissibleModeError("RAT-DL requires h_sr >= 2 h_sd");
    }
    ee_point_ = p_ee2_p_ee3(g, cm, cfg);
    ee_interior_ = detail::sum_rate(ee_point_, g) / (ee_point_.sum() + 2.0 * cm.alpha_r());
    p_ee4_ = relaypower::p_ee4(0.0, g, cm, cfg);
    ee_decode_ = decode_curve_ee(p_ee4_, 0.0, g, cm);
    ee_point_decodable_ = ee_point_.p_r < detail::decode_limit(ee_point_.p_s, g);
  }

  const PowerPair& ee_point() const noexcept { return ee_point_; }
  double p_ee4() const noexcept { return p_ee4_; }
  /// Slope of the on-off branch: C_R(P_B) = low_snr_slope() * P_B near 0.
  double low_snr_slope() const noexcept {
    return ee_point_decodable_ ? ee_interior_ : ee_decode_;
  }
  bool ee_point_decodable() const noexcept { return ee_point_decodable_; }

  RatDlSolution solve(double p_b) const {
    detail::require_nonnegative(p_b, "P_B");
    RatDlSolution sol;
    sol.p_ee2 = ee_point_.p_s;
    sol.p_ee3 = ee_point_.p_r;
    sol.p_ee4 = p_ee4_;
    sol.u = u_coefficient(p_b, g_, cm_);
    if (p_b >= cm_.alpha_r()) sol.v = v_root(p_b, g_, cm_);
    if (p_b == 0.0) {
      sol.case_label = ee_point_decodable_ ? RatDlCase::EeInterior : RatDlCase::DecodeBinding;
      return sol;
    }

    const auto cands = candidates(p_b);
    const RatDlCase chosen = select_by_conditions(p_b);
    const Candidate* picked = cands[index(chosen)] ? &*cands[index(chosen)] : nullptr;
    const Candidate* best = nullptr;
    for (const auto& c : cands) {
      if (c && (!best || c->throughput > best->throughput)) best = &*c;
    }
    if (!best) throw NumericalError("RAT-DL: no feasible candidate");
    if (!picked || best->throughput > picked->throughput + kTolerance) {
      sol.condition_logic_agreed = false;
      picked = best;
    }

    sol.case_label = picked->label;
    sol.p_s = picked->powers.p_s;
    sol.p_r = picked->powers.p_r;
    sol.prob = std::min(1.0, 2.0 * p_b / (picked->powers.sum() + 2.0 * cm_.alpha_r()));
    sol.throughput = picked->throughput;
    sol.avg_power = sol.prob * (0.5 * sol.p_s + 0.5 * sol.p_r + cm_.alpha_r());
    return sol;
  }

  /// Average throughput C_R(P_B).
  double throughput(double p_b) const { return solve(p_b).throughput; }

  /// dC_R/dP_B from the closed form of the active branch; right derivative at 0.
  double slope(double p_b) const {
    const RatDlSolution s = solve(p_b);
    if (p_b == 0.0) return low_snr_slope();
    switch (s.case_label) {
      case RatDlCase::EeInterior: return ee_interior_;
      case RatDlCase::DecodeBinding: return ee_decode_;
      case RatDlCase::PowerBinding: {
        if (s.p_s > 0.0 && s.p_r > 0.0) {
          return 0.5 * (g_.h_sd * capacity_slope(s.p_s * g_.h_sd) +
                        g_.h_rd * capacity_slope(s.p_r * g_.h_rd));
        }
        // One link clamped: the whole 2 (P_B - alpha_R) goes to the other.
        return s.p_r == 0.0 ? g_.h_sd * capacity_slope(s.p_s * g_.h_sd)
                            : g_.h_rd * capacity_slope(s.p_r * g_.h_rd);
      }
      case RatDlCase::BothBinding: {
        const double a = g_.h_sd * g_.h_rd;
        const double dv = (2.0 * a * s.v + 2.0 * g_.h_rd) / (2.0 * a * s.v + s.u);
        return 0.5 * g_.h_sr * capacity_slope(s.v * g_.h_sr) * dv;
      }
    }
    return 0.0;
  }

  /// Value of one branch formula at P_B, feasible or not. Constant-power
  /// branches need P_B >= alpha_R.
  double branch_value(RatDlCase c, double p_b) const {
    switch (c) {
      case RatDlCase::EeInterior: return ee_interior_ * p_b;
      case RatDlCase::DecodeBinding: return ee_decode_ * p_b;
      case RatDlCase::PowerBinding: {
        const PowerPair p = detail::water_fill(power_line_total(p_b), g_);
        return 0.5 * detail::sum_rate(p, g_);
      }
      case RatDlCase::BothBinding: return 0.5 * capacity(v_root(p_b, g_, cm_) * g_.h_sr);
    }
    return 0.0;
  }

  /// Budgets in (0, p_hi] where the returned case changes, located by a
  /// log-spaced scan followed by bisection on the case label.
  std::vector<double> breakpoints(double p_hi, int scan_points = 4000) const {
    std::vector<double> out;
    const double p_lo = 1e-6;
    const double ratio = std::pow(p_hi / p_lo, 1.0 / (scan_points - 1));
    double prev_x = p_lo;
    RatDlCase prev = solve(prev_x).case_label;
    for (int i = 1; i < scan_points; ++i) {
      const double x = p_lo * std::pow(ratio, i);
      const RatDlCase cur = solve(x).case_label;
      if (cur != prev) {
        double lo = prev_x;
        double hi = x;
        for (int it = 0; it < 200 && hi - lo > 1e-14 * hi; ++it) {
          const double mid = 0.5 * (lo + hi);
          (solve(mid).case_label == prev ? lo : hi) = mid;
        }
        out.push_back(0.5 * (lo + hi));
      }
      prev = cur;
      prev_x = x;
    }
    return out;
  }

  const ChannelGains& gains() const noexcept { return g_; }
  const CircuitModel& circuit() const noexcept { return cm_; }

 private:
  struct Candidate {
    RatDlCase label;
    PowerPair powers;
    double throughput;
  };

  static constexpr std::size_t index(RatDlCase c) { return static_cast<std::size_t>(c); }

  double power_line_total(double p_b) const { return 2.0 * p_b - 2.0 * cm_.alpha_r(); }

  /// Water-filling split on the power line.
  PowerPair line_point(double p_b) const {
    return detail::water_fill(power_line_total(p_b), g_);
  }

  /// Case choice from the S1..S4 membership conditions.
  RatDlCase select_by_conditions(double p_b) const {
    const double line = power_line_total(p_b);
    const bool s1 = ee_point_.sum() > line;
    const bool s2 = ee_point_decodable_;
    const bool s3 = p_ee4_ + detail::decode_limit(p_ee4_, g_) > line;
    if (s1 && s2) return RatDlCase::EeInterior;
    if (!s2 && s3) return RatDlCase::DecodeBinding;
    if (!s1 && s2 && line > 0.0) {
      const PowerPair p = line_point(p_b);
      if (p.p_r < detail::decode_limit(p.p_s, g_)) return RatDlCase::PowerBinding;
    }
    return RatDlCase::BothBinding;
  }

  /// Every candidate that satisfies its region's constraints (closed sets).
  std::array<std::optional<Candidate>, 4> candidates(double p_b) const {
    std::array<std::optional<Candidate>, 4> out;
    const double line = power_line_total(p_b);
    const double tol = kTolerance;

    if (ee_point_.sum() >= line - tol &&
        ee_point_.p_r <= detail::decode_limit(ee_point_.p_s, g_) + tol) {
      out[index(RatDlCase::EeInterior)] =
          Candidate{RatDlCase::EeInterior, ee_point_, ee_interior_ * p_b};
    }
    const PowerPair on_curve{p_ee4_, detail::decode_limit(p_ee4_, g_)};
    if (on_curve.sum() >= line - tol) {
      out[index(RatDlCase::DecodeBinding)] =
          Candidate{RatDlCase::DecodeBinding, on_curve, ee_decode_ * p_b};
    }
    if (line > 0.0) {
      const PowerPair p = line_point(p_b);
      if (p.p_r <= detail::decode_limit(p.p_s, g_) + tol) {
        out[index(RatDlCase::PowerBinding)] =
            Candidate{RatDlCase::PowerBinding, p, 0.5 * detail::sum_rate(p, g_)};
      }
    }
    if (line >= 0.0) {
      const double v = v_root(p_b, g_, cm_);
      const PowerPair p{v, std::max(0.0, line - v)};
      out[index(RatDlCase::BothBinding)] =
          Candidate{RatDlCase::BothBinding, p, 0.5 * capacity(v * g_.h_sr)};
    }
    return out;
  }

  ChannelGains g_;
  CircuitModel cm_;
  PowerPair ee_point_;
  double ee_interior_ = 0.0;
  double p_ee4_ = 0.0;
  double ee_decode_ = 0.0;
  bool ee_point_decodable_ = false;
};

inline RatDlSolution solve_rat_dl(double p_b, const ChannelGains& g, const CircuitModel& cm) {
  return RatDlModel(g, cm).solve(p_b);
}

inline double c_r(double p_b, const ChannelGains& g, const CircuitModel& cm) {
  return RatDlModel(g, cm).throughput(p_b);
}

inline double c_r_prime(double p_b, const ChannelGains& g, const CircuitModel& cm) {
  return RatDlModel(g, cm).slope(p_b);
}

}  // namespace relaypower
