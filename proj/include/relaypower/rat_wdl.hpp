#pragma once

// Relay-assisted transmission without direct link (RAT-WDL). The destination
// only listens to the relay, so the two hops must balance:
// P_S h_sr = P_R h_rd. On-off at P_ee5 up to the breakpoint, constant
// transmission beyond it.

#include <algorithm>

#include "relaypower/core_model.hpp"
#include "relaypower/numerics.hpp"

namespace relaypower {

struct RatWdlSolution {
  double p_ee5 = 0.0;
  double p_s = 0.0;
  double p_r = 0.0;
  double prob = 0.0;
  double throughput = 0.0;
  double avg_power = 0.0;

  ModeAllocation allocation() const {
    if (prob == 0.0) return ModeAllocation::silent();
    return {Mode::RAT_WDL, p_s, p_r, prob, throughput, avg_power};
  }
};

/// Argmax over P >= 0 of h_rd C(P h_sr) / ((h_sr + h_rd) P + 2 h_rd alpha_E).
inline double p_ee5(const ChannelGains& g, const CircuitModel& cm, const SearchConfig& cfg = {}) {
  if (!(g.h_sr > 0.0) || !(g.h_rd > 0.0)) {
    throw DegenerateChannelError("p_ee5: h_sr and h_rd must be > 0");
  }
  if (!(cm.alpha_e() > 0.0)) {
    throw DomainError("p_ee5: alpha_e must be > 0");
  }
  auto ee = [&](double p) {
    return g.h_rd * capacity(p * g.h_sr) / ((g.h_sr + g.h_rd) * p + 2.0 * g.h_rd * cm.alpha_e());
  };
  auto rising = [&](double p) {
    const double x = p * g.h_sr;
    const double den = (g.h_sr + g.h_rd) * p + 2.0 * g.h_rd * cm.alpha_e();
    return g.h_sr * den - (g.h_sr + g.h_rd) * (1.0 + x) * std::log1p(x);
  };
  return maximize_by_slope_sign(ee, rising, cfg).x;
}

class RatWdlModel {
 public:
  RatWdlModel(const ChannelGains& g, const CircuitModel& cm, const SearchConfig& cfg = {})
      : g_(g), cm_(cm), p_ee5_(relaypower::p_ee5(g, cm, cfg)) {
    // Source-side coefficient: average power per watt of P_S in an active slot.
    k_ = (g_.h_sr + g_.h_rd) / (2.0 * g_.h_rd);
    ee_max_ = 0.5 * capacity(p_ee5_ * g_.h_sr) / (k_ * p_ee5_ + cm_.alpha_e());
  }

  double p_ee5() const noexcept { return p_ee5_; }
  double ee_max() const noexcept { return ee_max_; }
  double breakpoint() const noexcept { return k_ * p_ee5_ + cm_.alpha_e(); }

  RatWdlSolution solve(double p_c) const {
    detail::require_nonnegative(p_c, "P_C");
    RatWdlSolution sol;
    sol.p_ee5 = p_ee5_;
    if (p_c == 0.0) return sol;
    sol.p_s = std::max(p_ee5_, (p_c - cm_.alpha_e()) / k_);
    sol.p_r = g_.h_sr / g_.h_rd * sol.p_s;
    sol.prob = std::min(1.0, 2.0 * p_c / (sol.p_s + sol.p_r + 2.0 * cm_.alpha_e()));
    sol.throughput = throughput(p_c);
    sol.avg_power = sol.prob * (0.5 * sol.p_s + 0.5 * sol.p_r + cm_.alpha_e());
    return sol;
  }

  /// Average throughput C_E(P_C).
  double throughput(double p_c) const {
    detail::require_nonnegative(p_c, "P_C");
    if (p_c <= breakpoint()) return ee_max_ * p_c;
    return 0.5 * capacity((p_c - cm_.alpha_e()) / k_ * g_.h_sr);
  }

  double slope(double p_c) const {
    detail::require_nonnegative(p_c, "P_C");
    if (p_c <= breakpoint()) return ee_max_;
    return 0.5 * g_.h_sr / k_ * capacity_slope((p_c - cm_.alpha_e()) / k_ * g_.h_sr);
  }

  const ChannelGains& gains() const noexcept { return g_; }
  const CircuitModel& circuit() const noexcept { return cm_; }

 private:
  ChannelGains g_;
  CircuitModel cm_;
  double p_ee5_ = 0.0;
  double k_ = 0.0;
  double ee_max_ = 0.0;
};

inline RatWdlSolution solve_rat_wdl(double p_c, const ChannelGains& g, const CircuitModel& cm) {
  return RatWdlModel(g, cm).solve(p_c);
}

inline double c_e(double p_c, const ChannelGains& g, const CircuitModel& cm) {
  return RatWdlModel(g, cm).throughput(p_c);
}

inline double c_e_prime(double p_c, const ChannelGains& g, const CircuitModel& cm) {
  return RatWdlModel(g, cm).slope(p_c);
}

}  // namespace relaypower
