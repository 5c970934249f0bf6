#pragma once

// Direct-link transmission (DLT): the source talks to the destination alone.
// Below the breakpoint P_ee1 + alpha_D the optimal policy bursts at the
// energy-efficient power P_ee1; above it the source transmits every slot.

#include <algorithm>

#include "relaypower/core_model.hpp"
#include "relaypower/numerics.hpp"

namespace relaypower {

/// Argmax over P > 0 of C(P h_sd) / (P + alpha_D).
inline double p_ee1(const ChannelGains& g, const CircuitModel& cm, const SearchConfig& cfg = {}) {
  if (!(g.h_sd > 0.0)) {
    throw DegenerateChannelError("p_ee1: h_sd must be > 0");
  }
  if (!(cm.alpha_d() > 0.0)) {
    throw DomainError(
        "p_ee1: alpha_d = 0 has no interior maximizer (EE is decreasing in P); "
        "use a small positive alpha_d for the zero-circuit-power case");
  }
  auto ee = [&](double p) { return capacity(p * g.h_sd) / (p + cm.alpha_d()); };
  // Sign of d/dP EE, scaled by ln2 (P + alpha_D)^2 (1 + P h_sd).
  auto rising = [&](double p) {
    const double x = p * g.h_sd;
    return g.h_sd * (p + cm.alpha_d()) - (1.0 + x) * std::log1p(x);
  };
  return maximize_by_slope_sign(ee, rising, cfg).x;
}

struct DltSolution {
  double p_ee1 = 0.0;
  ModeAllocation alloc;
  double ee_max = 0.0;  ///< b/s/Hz/W at P_ee1
};

/// DLT solver for fixed gains and circuit powers; P_ee1 is computed once.
class DltModel {
 public:
  DltModel(const ChannelGains& g, const CircuitModel& cm, const SearchConfig& cfg = {})
      : g_(g), cm_(cm), p_ee1_(relaypower::p_ee1(g, cm, cfg)) {
    ee_max_ = capacity(p_ee1_ * g_.h_sd) / (p_ee1_ + cm_.alpha_d());
  }

  double p_ee1() const noexcept { return p_ee1_; }
  double ee_max() const noexcept { return ee_max_; }
  /// Budget where on-off transmission turns into constant transmission.
  double breakpoint() const noexcept { return p_ee1_ + cm_.alpha_d(); }

  DltSolution solve(double p_a) const {
    detail::require_nonnegative(p_a, "P_A");
    DltSolution sol{p_ee1_, ModeAllocation::silent(), ee_max_};
    if (p_a == 0.0) return sol;
    const double p_s = std::max(p_ee1_, p_a - cm_.alpha_d());
    ModeAllocation& a = sol.alloc;
    a.mode = Mode::DLT;
    a.p_s = p_s;
    a.p_r = 0.0;
    a.prob = std::min(1.0, p_a / (p_s + cm_.alpha_d()));
    a.throughput = throughput(p_a);
    a.avg_power = a.prob * (p_s + cm_.alpha_d());
    return sol;
  }

  /// Average throughput C_D(P_A).
  double throughput(double p_a) const {
    detail::require_nonnegative(p_a, "P_A");
    if (p_a <= breakpoint()) return ee_max_ * p_a;
    return capacity((p_a - cm_.alpha_d()) * g_.h_sd);
  }

  /// dC_D/dP_A; the right derivative at P_A = 0.
  double slope(double p_a) const {
    detail::require_nonnegative(p_a, "P_A");
    if (p_a <= breakpoint()) return ee_max_;
    return g_.h_sd * capacity_slope((p_a - cm_.alpha_d()) * g_.h_sd);
  }

  const ChannelGains& gains() const noexcept { return g_; }
  const CircuitModel& circuit() const noexcept { return cm_; }

 private:
  ChannelGains g_;
  CircuitModel cm_;
  double p_ee1_ = 0.0;
  double ee_max_ = 0.0;
};

inline DltSolution solve_dlt(double p_a, const ChannelGains& g, const CircuitModel& cm) {
  return DltModel(g, cm).solve(p_a);
}

inline double c_d(double p_a, const ChannelGains& g, const CircuitModel& cm) {
  return DltModel(g, cm).throughput(p_a);
}

inline double c_d_prime(double p_a, const ChannelGains& g, const CircuitModel& cm) {
  return DltModel(g, cm).slope(p_a);
}

}  // namespace relaypower
