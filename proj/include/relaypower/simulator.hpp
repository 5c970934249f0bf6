#pragma once

// Slotted Monte-Carlo execution of on-off policies, plus the two constant
// transmission baselines (CDLT and CRAT-DL).

#include <cmath>
#include <cstdint>
#include <random>
#include <string>

#include "relaypower/core_model.hpp"
#include "relaypower/mixed_envelope.hpp"
#include "relaypower/rat_dl.hpp"

namespace relaypower {

inline constexpr const char* kRngAlgorithm = "mt19937_64";

struct SimOptions {
  /// Replace i.i.d. Bernoulli slots by the deterministic pattern
  /// "transmit in slot i iff floor((i+1) p) > floor(i p)".
  bool duty_cycle = false;
};

struct SimReport {
  std::string mode;
  std::uint64_t n_slots = 0;
  std::uint64_t rng_seed = 0;
  std::string rng_algorithm = kRngAlgorithm;
  bool duty_cycle = false;
  double empirical_throughput = 0.0;
  double analytic_throughput = 0.0;
  double se_throughput = 0.0;  ///< standard error of the slot-rate mean
  double empirical_avg_power = 0.0;
  double analytic_avg_power = 0.0;
  double se_power = 0.0;  ///< standard error of the slot-power mean
  double budget = 0.0;
};

namespace detail {

/// Uniform double in [0, 1) from the top 53 bits; identical on every platform.
inline double unit_draw(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline bool duty_slot(std::uint64_t i, double p) {
  return std::floor(static_cast<double>(i + 1) * p) > std::floor(static_cast<double>(i) * p);
}

/// Running mean and variance (Welford).
struct Moments {
  std::uint64_t n = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) {
    ++n;
    const double d = x - mean;
    mean += d / static_cast<double>(n);
    m2 += d * (x - mean);
  }
  double standard_error() const {
    if (n < 2) return 0.0;
    return std::sqrt(m2 / static_cast<double>(n - 1) / static_cast<double>(n));
  }
};

inline void finish(SimReport& rep, const Moments& rate, const Moments& power) {
  rep.empirical_throughput = rate.mean;
  rep.se_throughput = rate.standard_error();
  rep.empirical_avg_power = power.mean;
  rep.se_power = power.standard_error();
}

inline void check_slots(std::uint64_t n_slots) {
  if (n_slots < 1) throw ValidationError("n_slots must be >= 1");
}

}  // namespace detail

/// Runs `alloc` for n_slots slots. Deterministic for a given seed.
inline SimReport simulate(const ModeAllocation& alloc, const ChannelGains& g, const CircuitModel& cm,
                          std::uint64_t n_slots, std::uint64_t seed, const SimOptions& opt = {}) {
  detail::check_slots(n_slots);
  if (!(alloc.prob >= 0.0 && alloc.prob <= 1.0)) {
    throw ValidationError("simulate: prob must lie in [0, 1]");
  }
  SimReport rep;
  rep.mode = std::string(to_string(alloc.mode));
  rep.n_slots = n_slots;
  rep.rng_seed = seed;
  rep.duty_cycle = opt.duty_cycle;
  rep.analytic_throughput = alloc.throughput;
  rep.analytic_avg_power = alloc.avg_power;
  rep.budget = alloc.avg_power;

  const bool silent = alloc.mode == Mode::SILENT || alloc.prob == 0.0;
  const double on_rate = silent ? 0.0 : slot_rate(alloc.mode, alloc.p_s, alloc.p_r, g);
  const double on_power = silent ? 0.0 : active_slot_power(alloc.mode, alloc.p_s, alloc.p_r, cm);

  std::mt19937_64 rng(seed);
  detail::Moments rate;
  detail::Moments power;
  for (std::uint64_t i = 0; i < n_slots; ++i) {
    const bool on = !silent && (opt.duty_cycle ? detail::duty_slot(i, alloc.prob)
                                               : detail::unit_draw(rng) < alloc.prob);
    rate.add(on ? on_rate : 0.0);
    power.add(on ? on_power : 0.0);
  }
  detail::finish(rep, rate, power);
  return rep;
}

/// Runs a mixed policy: each slot is a DLT slot with probability theta,
/// otherwise a RAT-DL slot, and then follows that mode's on-off rule.
inline SimReport simulate_mixed(const MixedSolution& sol, const ChannelGains& g,
                                const CircuitModel& cm, std::uint64_t n_slots, std::uint64_t seed,
                                const SimOptions& opt = {}) {
  detail::check_slots(n_slots);
  SimReport rep;
  rep.mode = "MT";
  rep.n_slots = n_slots;
  rep.rng_seed = seed;
  rep.duty_cycle = opt.duty_cycle;
  rep.analytic_throughput = sol.throughput;
  rep.analytic_avg_power =
      sol.theta_star * sol.dlt_alloc.avg_power + (1.0 - sol.theta_star) * sol.rat_alloc.avg_power;
  rep.budget = sol.theta_star * sol.p_a_star + (1.0 - sol.theta_star) * sol.p_b_star;

  struct Arm {
    const ModeAllocation* alloc;
    double rate;
    double power;
    std::uint64_t count = 0;
  };
  auto make_arm = [&](const ModeAllocation& a) {
    const bool silent = a.mode == Mode::SILENT || a.prob == 0.0;
    return Arm{&a, silent ? 0.0 : slot_rate(a.mode, a.p_s, a.p_r, g),
               silent ? 0.0 : active_slot_power(a.mode, a.p_s, a.p_r, cm)};
  };
  Arm dlt = make_arm(sol.dlt_alloc);
  Arm rat = make_arm(sol.rat_alloc);

  std::mt19937_64 rng(seed);
  detail::Moments rate;
  detail::Moments power;
  for (std::uint64_t i = 0; i < n_slots; ++i) {
    const bool use_dlt = opt.duty_cycle ? detail::duty_slot(i, sol.theta_star)
                                        : detail::unit_draw(rng) < sol.theta_star;
    Arm& arm = use_dlt ? dlt : rat;
    const double p = arm.alloc->prob;
    const bool on = opt.duty_cycle ? detail::duty_slot(arm.count, p) : detail::unit_draw(rng) < p;
    ++arm.count;
    rate.add(on ? arm.rate : 0.0);
    power.add(on ? arm.power : 0.0);
  }
  detail::finish(rep, rate, power);
  return rep;
}

/// Constant direct transmission at P_0 - alpha_D; silent at or below alpha_D.
inline ModeAllocation baseline_cdlt(double p0, const ChannelGains& g, const CircuitModel& cm) {
  detail::require_nonnegative(p0, "P_0");
  if (p0 <= cm.alpha_d()) return ModeAllocation::silent();
  const double p_s = p0 - cm.alpha_d();
  return {Mode::DLT, p_s, 0.0, 1.0, capacity(p_s * g.h_sd), p0};
}

/// Constant relay transmission on the decode curve: (V, 2P_0 - 2alpha_R - V);
/// silent at or below alpha_R.
inline ModeAllocation baseline_crat_dl(double p0, const ChannelGains& g, const CircuitModel& cm) {
  detail::require_nonnegative(p0, "P_0");
  if (!g.relay_admissible()) throw InadmissibleModeError("CRAT-DL requires h_sr >= 2 h_sd");
  if (p0 <= cm.alpha_r()) return ModeAllocation::silent();
  const double v = v_root(p0, g, cm);
  const double p_r = std::max(0.0, 2.0 * p0 - 2.0 * cm.alpha_r() - v);
  return {Mode::RAT_DL, v, p_r, 1.0, df_rate(v, p_r, g), 0.5 * v + 0.5 * p_r + cm.alpha_r()};
}

}  // namespace relaypower
