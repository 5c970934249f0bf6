#pragma once

// Domain types and rate formulas for the three-node half-duplex
// decode-and-forward relay channel. Noise variance is fixed to 1, powers are
// in Watts and channel gains are linear power gains.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace relaypower {

/// Default absolute comparison tolerance for powers and throughputs.
inline constexpr double kTolerance = 1e-9;

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Invalid user-supplied value (negative power, non-finite gain, ...).
struct ValidationError : Error {
  using Error::Error;
};

/// Argument outside the mathematical domain of a function.
struct DomainError : Error {
  using Error::Error;
};

/// A channel gain that makes an optimization problem degenerate.
struct DegenerateChannelError : Error {
  using Error::Error;
};

/// A relay mode was requested for gains where the relay cannot help.
struct InadmissibleModeError : Error {
  using Error::Error;
};

/// Non-finite values or failed convergence inside a numerical kernel.
struct NumericalError : Error {
  using Error::Error;
};

/// Two computations that must agree did not (e.g. tangent count vs envelope).
struct InconsistencyError : Error {
  using Error::Error;
};

namespace detail {
inline void require_nonnegative(double v, std::string_view name) {
  if (!std::isfinite(v) || v < 0.0) {
    throw ValidationError(std::string(name) + " must be finite and >= 0, got " +
                          std::to_string(v));
  }
}
}  // namespace detail

struct ChannelGains {
  double h_sd = 0.0;
  double h_sr = 0.0;
  double h_rd = 0.0;

  /// Validating constructor; all gains must be finite and non-negative.
  static ChannelGains make(double h_sd, double h_sr, double h_rd) {
    detail::require_nonnegative(h_sd, "h_sd");
    detail::require_nonnegative(h_sr, "h_sr");
    detail::require_nonnegative(h_rd, "h_rd");
    return ChannelGains{h_sd, h_sr, h_rd};
  }

  /// Converts gains given in dB (10^(x/10)).
  static ChannelGains from_db(double sd_db, double sr_db, double rd_db) {
    auto lin = [](double db) { return std::pow(10.0, db / 10.0); };
    return make(lin(sd_db), lin(sr_db), lin(rd_db));
  }

  /// DF relaying only beats the direct link when h_sr >= 2 h_sd.
  bool relay_admissible() const noexcept { return h_sr >= 2.0 * h_sd; }

  bool operator==(const ChannelGains&) const = default;
};

/// Per-node transmit/receive circuit powers in the active mode.
struct RawCircuitPowers {
  double p_ct_s = 0.0;  ///< source transmit circuit
  double p_cr_r = 0.0;  ///< relay receive circuit
  double p_ct_r = 0.0;  ///< relay transmit circuit
  double p_cr_d = 0.0;  ///< destination receive circuit

  bool operator==(const RawCircuitPowers&) const = default;
};

/// Active-mode circuit power aggregates for the three transmission modes.
///
/// Built either from raw per-node powers, in which case the aggregates are
/// derived, or directly from the aggregates (the raw powers are then absent).
class CircuitModel {
 public:
  CircuitModel() = default;

  static CircuitModel from_raw(const RawCircuitPowers& raw) {
    detail::require_nonnegative(raw.p_ct_s, "p_ct_s");
    detail::require_nonnegative(raw.p_cr_r, "p_cr_r");
    detail::require_nonnegative(raw.p_ct_r, "p_ct_r");
    detail::require_nonnegative(raw.p_cr_d, "p_cr_d");
    CircuitModel cm;
    cm.raw_ = raw;
    cm.alpha_d_ = raw.p_ct_s + raw.p_cr_d;
    // Half-duplex: each phase's circuits are on for half the slot.
    cm.alpha_r_ = 0.5 * (raw.p_ct_s + raw.p_cr_r + raw.p_cr_d) +
                  0.5 * (raw.p_ct_r + raw.p_cr_d);
    // No destination receiver during the broadcast phase without direct link.
    cm.alpha_e_ = cm.alpha_r_ - 0.5 * raw.p_cr_d;
    return cm;
  }

  static CircuitModel from_aggregates(double alpha_d, double alpha_r, double alpha_e) {
    detail::require_nonnegative(alpha_d, "alpha_d");
    detail::require_nonnegative(alpha_r, "alpha_r");
    detail::require_nonnegative(alpha_e, "alpha_e");
    CircuitModel cm;
    cm.alpha_d_ = alpha_d;
    cm.alpha_r_ = alpha_r;
    cm.alpha_e_ = alpha_e;
    return cm;
  }

  double alpha_d() const noexcept { return alpha_d_; }
  double alpha_r() const noexcept { return alpha_r_; }
  double alpha_e() const noexcept { return alpha_e_; }
  const std::optional<RawCircuitPowers>& raw() const noexcept { return raw_; }

  CircuitModel with_alpha_d(double v) const { return from_aggregates(v, alpha_r_, alpha_e_); }
  CircuitModel with_alpha_r(double v) const { return from_aggregates(alpha_d_, v, alpha_e_); }

  bool operator==(const CircuitModel&) const = default;

 private:
  std::optional<RawCircuitPowers> raw_;
  double alpha_d_ = 0.0;
  double alpha_r_ = 0.0;
  double alpha_e_ = 0.0;
};

inline CircuitModel derive_aggregates(const RawCircuitPowers& raw) {
  return CircuitModel::from_raw(raw);
}

enum class Mode { DLT, RAT_DL, RAT_WDL, SILENT };

inline std::string_view to_string(Mode m) {
  switch (m) {
    case Mode::DLT: return "DLT";
    case Mode::RAT_DL: return "RAT_DL";
    case Mode::RAT_WDL: return "RAT_WDL";
    case Mode::SILENT: return "SILENT";
  }
  return "?";
}

/// A stationary on-off policy: transmit with (p_s, p_r) in a fraction `prob`
/// of the slots and sleep otherwise.
struct ModeAllocation {
  Mode mode = Mode::SILENT;
  double p_s = 0.0;
  double p_r = 0.0;
  double prob = 0.0;
  double throughput = 0.0;
  double avg_power = 0.0;

  static ModeAllocation silent() { return {}; }
};

/// Circuit aggregate charged by `mode` in an active slot.
inline double circuit_power(Mode mode, const CircuitModel& cm) {
  switch (mode) {
    case Mode::DLT: return cm.alpha_d();
    case Mode::RAT_DL: return cm.alpha_r();
    case Mode::RAT_WDL: return cm.alpha_e();
    case Mode::SILENT: return 0.0;
  }
  return 0.0;
}

/// Total power drawn in an active slot (transmit plus circuit).
inline double active_slot_power(Mode mode, double p_s, double p_r, const CircuitModel& cm) {
  switch (mode) {
    case Mode::DLT: return p_s + cm.alpha_d();
    case Mode::RAT_DL:
    case Mode::RAT_WDL: return 0.5 * p_s + 0.5 * p_r + circuit_power(mode, cm);
    case Mode::SILENT: return 0.0;
  }
  return 0.0;
}

/// AWGN capacity log2(1 + x) in b/s/Hz.
inline double capacity(double x) {
  if (!(1.0 + x > 0.0)) {
    throw DomainError("capacity: 1 + x must be positive, got x = " + std::to_string(x));
  }
  return std::log2(1.0 + x);
}

/// d/dx log2(1 + x).
inline double capacity_slope(double x) { return 1.0 / (std::numbers::ln2 * (1.0 + x)); }

/// Half-duplex DF rate: 1/2 min{C(p_s h_sr), C(p_s h_sd) + C(p_r h_rd)}.
inline double df_rate(double p_s, double p_r, const ChannelGains& g) {
  detail::require_nonnegative(p_s, "p_s");
  detail::require_nonnegative(p_r, "p_r");
  const double relay_hop = capacity(p_s * g.h_sr);
  const double combined = capacity(p_s * g.h_sd) + capacity(p_r * g.h_rd);
  return 0.5 * std::min(relay_hop, combined);
}

/// Rate without a direct link: 1/2 min{C(p_s h_sr), C(p_r h_rd)}.
inline double two_hop_rate(double p_s, double p_r, const ChannelGains& g) {
  detail::require_nonnegative(p_s, "p_s");
  detail::require_nonnegative(p_r, "p_r");
  return 0.5 * std::min(capacity(p_s * g.h_sr), capacity(p_r * g.h_rd));
}

/// Per-slot rate of an active slot in `mode`.
inline double slot_rate(Mode mode, double p_s, double p_r, const ChannelGains& g) {
  switch (mode) {
    case Mode::DLT: return capacity(p_s * g.h_sd);
    case Mode::RAT_DL: return df_rate(p_s, p_r, g);
    case Mode::RAT_WDL: return two_hop_rate(p_s, p_r, g);
    case Mode::SILENT: return 0.0;
  }
  return 0.0;
}

}  // namespace relaypower
