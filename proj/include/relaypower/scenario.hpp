#pragma once

// Scenario files, sweeps, region maps and the CSV emitters behind the CLI.
//
// Config format: one `key = value` per line, `#` starts a comment.
//
//   h_sd, h_sr, h_rd            channel gains (linear unless gain_units = db)
//   gain_units                  linear | db
//   p_ct_s, p_cr_r, p_ct_r, p_cr_d   raw circuit powers, or
//   alpha_d, alpha_r, alpha_e        the aggregates directly (not both)
//   p0                          budget for solve/simulate/region and non-P0 sweeps
//   modes                       comma list of DLT,RAT_DL,RAT_WDL,MT,CDLT,CRAT_DL
//   sweep_variable, sweep_from, sweep_to, sweep_steps
//   region_h_sr_from, region_h_sr_to, region_h_sr_steps  (same for region_h_rd_*)
//   sim_mode, seed, slots

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "relaypower/core_model.hpp"
#include "relaypower/dlt.hpp"
#include "relaypower/mixed_envelope.hpp"
#include "relaypower/rat_dl.hpp"
#include "relaypower/rat_wdl.hpp"
#include "relaypower/simulator.hpp"

namespace relaypower {

/// Bad or missing configuration entry; `field` names the key.
struct ConfigError : ValidationError {
  ConfigError(std::string field_name, const std::string& msg)
      : ValidationError(field_name + ": " + msg), field(std::move(field_name)) {}
  std::string field;
};

struct IoError : Error {
  using Error::Error;
};

enum class Scheme { DLT, RAT_DL, RAT_WDL, MT, CDLT, CRAT_DL, SILENT };

inline std::string_view to_string(Scheme s) {
  switch (s) {
    case Scheme::DLT: return "DLT";
    case Scheme::RAT_DL: return "RAT_DL";
    case Scheme::RAT_WDL: return "RAT_WDL";
    case Scheme::MT: return "MT";
    case Scheme::CDLT: return "CDLT";
    case Scheme::CRAT_DL: return "CRAT_DL";
    case Scheme::SILENT: return "SILENT";
  }
  return "?";
}

inline std::optional<Scheme> parse_scheme(std::string_view name) {
  std::string s(name);
  for (char& c : s) c = c == '-' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  for (Scheme x : {Scheme::DLT, Scheme::RAT_DL, Scheme::RAT_WDL, Scheme::MT, Scheme::CDLT,
                   Scheme::CRAT_DL, Scheme::SILENT}) {
    if (s == to_string(x)) return x;
  }
  return std::nullopt;
}

struct AxisSpec {
  double from = 0.0;
  double to = 1.0;
  int steps = 2;

  double at(int i) const { return from + (to - from) * i / (steps - 1); }
  bool operator==(const AxisSpec&) const = default;
};

struct SweepSpec {
  std::string variable = "P0";
  AxisSpec axis{0.1, 2.0, 50};
  bool operator==(const SweepSpec&) const = default;
};

struct RegionSpec {
  AxisSpec h_sr{2.0, 10.0, 30};
  AxisSpec h_rd{0.5, 10.0, 30};
  bool operator==(const RegionSpec&) const = default;
};

struct Scenario {
  ChannelGains gains;
  CircuitModel circuit;
  double p0 = 1.0;
  std::vector<Scheme> modes{Scheme::DLT,    Scheme::RAT_DL, Scheme::RAT_WDL,
                            Scheme::MT,     Scheme::CDLT,   Scheme::CRAT_DL};
  SweepSpec sweep;
  RegionSpec region;
  Scheme sim_mode = Scheme::RAT_DL;
  std::uint64_t seed = 42;
  std::uint64_t slots = 1000000;

  bool operator==(const Scenario&) const = default;
};

using ConfigMap = std::map<std::string, std::string>;

namespace detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

inline double parse_number(const std::string& key, const std::string& text) {
  const char* begin = text.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (text.empty() || end != begin + text.size() || !std::isfinite(v)) {
    throw ConfigError(key, "expected a finite number, got '" + text + "'");
  }
  return v;
}

inline std::uint64_t parse_count(const std::string& key, const std::string& text) {
  const char* begin = text.c_str();
  char* end = nullptr;
  if (text.empty() || text[0] == '-') throw ConfigError(key, "expected a non-negative integer");
  const unsigned long long v = std::strtoull(begin, &end, 10);
  if (end != begin + text.size()) {
    throw ConfigError(key, "expected a non-negative integer, got '" + text + "'");
  }
  return v;
}

/// "%.12g" rendering used in every CSV cell.
inline std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

/// Shortest-safe rendering for config dumps (round-trips exactly).
inline std::string fmt_exact(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string opt_cell(const std::optional<double>& v) { return v ? fmt(*v) : std::string(); }

}  // namespace detail

/// Reads key/value lines. Duplicate keys and lines without '=' are errors.
inline ConfigMap read_config(std::istream& in) {
  ConfigMap map;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string t = detail::trim(line);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(lineno), "expected 'key = value'");
    }
    const std::string key = detail::trim(std::string_view(t).substr(0, eq));
    const std::string value = detail::trim(std::string_view(t).substr(eq + 1));
    if (key.empty()) throw ConfigError("line " + std::to_string(lineno), "empty key");
    if (!map.emplace(key, value).second) throw ConfigError(key, "duplicate key");
  }
  return map;
}

inline ConfigMap read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file " + path);
  return read_config(in);
}

/// Applies a "key=value" override on top of a parsed map.
inline void apply_override(ConfigMap& map, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw ConfigError(assignment, "override must be key=value");
  map[detail::trim(std::string_view(assignment).substr(0, eq))] =
      detail::trim(std::string_view(assignment).substr(eq + 1));
}

/// Builds and validates a Scenario. `force_db` treats gains as dB regardless
/// of gain_units.
inline Scenario build_scenario(const ConfigMap& map, bool force_db = false) {
  static const std::vector<std::string> known = {
      "h_sd", "h_sr", "h_rd", "gain_units", "p_ct_s", "p_cr_r", "p_ct_r", "p_cr_d",
      "alpha_d", "alpha_r", "alpha_e", "p0", "modes", "sweep_variable", "sweep_from",
      "sweep_to", "sweep_steps", "region_h_sr_from", "region_h_sr_to", "region_h_sr_steps",
      "region_h_rd_from", "region_h_rd_to", "region_h_rd_steps", "sim_mode", "seed", "slots"};
  for (const auto& [k, v] : map) {
    if (std::find(known.begin(), known.end(), k) == known.end()) {
      throw ConfigError(k, "unknown key");
    }
  }
  auto has = [&](const std::string& k) { return map.count(k) != 0; };
  auto num = [&](const std::string& k) {
    if (!has(k)) throw ConfigError(k, "missing");
    return detail::parse_number(k, map.at(k));
  };
  auto nonneg = [&](const std::string& k) {
    const double v = num(k);
    if (v < 0.0) throw ConfigError(k, "must be >= 0");
    return v;
  };

  bool db = force_db;
  if (has("gain_units")) {
    const std::string& u = map.at("gain_units");
    if (u == "db") db = true;
    else if (u != "linear") throw ConfigError("gain_units", "must be 'linear' or 'db'");
  }
  auto gain = [&](const std::string& k) {
    const double v = db ? std::pow(10.0, num(k) / 10.0) : nonneg(k);
    if (!std::isfinite(v)) throw ConfigError(k, "gain overflows");
    return v;
  };

  Scenario sc;
  sc.gains = ChannelGains::make(gain("h_sd"), gain("h_sr"), gain("h_rd"));

  const bool raw = has("p_ct_s") || has("p_cr_r") || has("p_ct_r") || has("p_cr_d");
  const bool agg = has("alpha_d") || has("alpha_r") || has("alpha_e");
  if (raw && agg) throw ConfigError("alpha_d", "give either raw circuit powers or aggregates, not both");
  if (raw) {
    sc.circuit = CircuitModel::from_raw(
        {nonneg("p_ct_s"), nonneg("p_cr_r"), nonneg("p_ct_r"), nonneg("p_cr_d")});
  } else if (agg) {
    sc.circuit = CircuitModel::from_aggregates(nonneg("alpha_d"), nonneg("alpha_r"), nonneg("alpha_e"));
  } else {
    throw ConfigError("alpha_d", "missing circuit powers");
  }

  if (has("p0")) sc.p0 = nonneg("p0");
  if (has("modes")) {
    sc.modes.clear();
    std::stringstream ss(map.at("modes"));
    std::string item;
    while (std::getline(ss, item, ',')) {
      const auto s = parse_scheme(detail::trim(item));
      if (!s || *s == Scheme::SILENT) throw ConfigError("modes", "unknown mode '" + item + "'");
      sc.modes.push_back(*s);
    }
    if (sc.modes.empty()) throw ConfigError("modes", "empty list");
  }

  auto axis = [&](const std::string& prefix, AxisSpec& a, bool is_gain) {
    if (has(prefix + "_from")) a.from = is_gain ? gain(prefix + "_from") : nonneg(prefix + "_from");
    if (has(prefix + "_to")) a.to = is_gain ? gain(prefix + "_to") : nonneg(prefix + "_to");
    if (has(prefix + "_steps")) {
      a.steps = static_cast<int>(detail::parse_count(prefix + "_steps", map.at(prefix + "_steps")));
    }
    if (!(a.from < a.to)) throw ConfigError(prefix + "_from", "must be < " + prefix + "_to");
    if (a.steps < 2) throw ConfigError(prefix + "_steps", "must be >= 2");
  };
  if (has("sweep_variable")) sc.sweep.variable = map.at("sweep_variable");
  const std::string& var = sc.sweep.variable;
  if (var != "P0" && var != "h_sr" && var != "h_rd" && var != "alpha_d" && var != "alpha_r") {
    throw ConfigError("sweep_variable", "must be one of P0, h_sr, h_rd, alpha_d, alpha_r");
  }
  axis("sweep", sc.sweep.axis, var == "h_sr" || var == "h_rd");
  axis("region_h_sr", sc.region.h_sr, true);
  axis("region_h_rd", sc.region.h_rd, true);

  if (has("sim_mode")) {
    const auto s = parse_scheme(map.at("sim_mode"));
    if (!s) throw ConfigError("sim_mode", "unknown mode '" + map.at("sim_mode") + "'");
    sc.sim_mode = *s;
  }
  if (has("seed")) sc.seed = detail::parse_count("seed", map.at("seed"));
  if (has("slots")) {
    sc.slots = detail::parse_count("slots", map.at("slots"));
    if (sc.slots < 1) throw ConfigError("slots", "must be >= 1");
  }
  return sc;
}

inline Scenario parse_scenario(std::istream& in, bool force_db = false) {
  return build_scenario(read_config(in), force_db);
}

/// Writes a config that re-parses to an equal Scenario (gains in linear units).
inline std::string dump_config(const Scenario& sc) {
  std::ostringstream o;
  auto kv = [&](const std::string& k, const std::string& v) { o << k << " = " << v << "\n"; };
  using detail::fmt_exact;
  kv("gain_units", "linear");
  kv("h_sd", fmt_exact(sc.gains.h_sd));
  kv("h_sr", fmt_exact(sc.gains.h_sr));
  kv("h_rd", fmt_exact(sc.gains.h_rd));
  if (const auto& raw = sc.circuit.raw()) {
    kv("p_ct_s", fmt_exact(raw->p_ct_s));
    kv("p_cr_r", fmt_exact(raw->p_cr_r));
    kv("p_ct_r", fmt_exact(raw->p_ct_r));
    kv("p_cr_d", fmt_exact(raw->p_cr_d));
  } else {
    kv("alpha_d", fmt_exact(sc.circuit.alpha_d()));
    kv("alpha_r", fmt_exact(sc.circuit.alpha_r()));
    kv("alpha_e", fmt_exact(sc.circuit.alpha_e()));
  }
  kv("p0", fmt_exact(sc.p0));
  std::string modes;
  for (Scheme s : sc.modes) modes += (modes.empty() ? "" : ",") + std::string(to_string(s));
  kv("modes", modes);
  kv("sweep_variable", sc.sweep.variable);
  auto axis = [&](const std::string& prefix, const AxisSpec& a) {
    kv(prefix + "_from", fmt_exact(a.from));
    kv(prefix + "_to", fmt_exact(a.to));
    kv(prefix + "_steps", std::to_string(a.steps));
  };
  axis("sweep", sc.sweep.axis);
  axis("region_h_sr", sc.region.h_sr);
  axis("region_h_rd", sc.region.h_rd);
  kv("sim_mode", std::string(to_string(sc.sim_mode)));
  kv("seed", std::to_string(sc.seed));
  kv("slots", std::to_string(sc.slots));
  return o.str();
}

/// One solved scheme at one operating point. Empty optionals are empty CSV cells.
struct SchemeRow {
  Scheme scheme = Scheme::DLT;
  std::optional<double> p_s, p_r, prob, theta, throughput;
  std::string case_label;
  std::string warning;
};

/// Lazily built mode solvers for one (gains, circuit) pair.
class ModelSet {
 public:
  ModelSet(const ChannelGains& g, const CircuitModel& cm) : g_(g), cm_(cm) {}

  const ChannelGains& gains() const noexcept { return g_; }
  const CircuitModel& circuit() const noexcept { return cm_; }

  const DltModel& dlt() {
    if (!dlt_) dlt_.emplace(g_, cm_);
    return *dlt_;
  }
  const RatDlModel& rat_dl() {
    if (!rat_dl_) rat_dl_.emplace(g_, cm_);
    return *rat_dl_;
  }
  const RatWdlModel& rat_wdl() {
    if (!rat_wdl_) rat_wdl_.emplace(g_, cm_);
    return *rat_wdl_;
  }
  const MixedModel& mixed() {
    if (!mixed_) mixed_.emplace(g_, cm_);
    return *mixed_;
  }

  SchemeRow evaluate(Scheme s, double p0) {
    SchemeRow row;
    row.scheme = s;
    auto fill = [&](const ModeAllocation& a) {
      row.p_s = a.p_s;
      row.p_r = a.p_r;
      row.prob = a.prob;
      row.throughput = a.throughput;
    };
    const bool relay_ok = g_.relay_admissible();
    switch (s) {
      case Scheme::DLT: fill(dlt().solve(p0).alloc); break;
      case Scheme::CDLT: fill(baseline_cdlt(p0, g_, cm_)); break;
      case Scheme::RAT_WDL: fill(rat_wdl().solve(p0).allocation()); break;
      case Scheme::RAT_DL:
      case Scheme::CRAT_DL:
        if (!relay_ok) {
          row.case_label = "INADMISSIBLE";
          row.warning = "relay inadmissible (h_sr < 2 h_sd)";
          break;
        }
        if (s == Scheme::CRAT_DL) {
          fill(baseline_crat_dl(p0, g_, cm_));
        } else {
          const RatDlSolution r = rat_dl().solve(p0);
          fill(r.allocation());
          row.case_label = std::string(to_string(r.case_label));
        }
        break;
      case Scheme::MT: {
        const MixedSolution m = mixed().solve(p0);
        row.theta = m.theta_star;
        row.throughput = m.throughput;
        row.case_label = std::string(to_string(m.case_label));
        if (m.theta_star >= 1.0) fill(m.dlt_alloc);
        if (m.theta_star <= 0.0) fill(m.rat_alloc);
        row.throughput = m.throughput;
        if (!m.relay_admissible) row.warning = "relay inadmissible (h_sr < 2 h_sd); MT reduces to DLT";
        break;
      }
      case Scheme::SILENT: fill(ModeAllocation::silent()); break;
    }
    return row;
  }

 private:
  ChannelGains g_;
  CircuitModel cm_;
  std::optional<DltModel> dlt_;
  std::optional<RatDlModel> rat_dl_;
  std::optional<RatWdlModel> rat_wdl_;
  std::optional<MixedModel> mixed_;
};

inline constexpr std::string_view kSweepHeader =
    "variable,value,mode,p_s,p_r,prob,theta,throughput,case_label";
inline constexpr std::string_view kRegionHeader = "h_sr,h_rd,winner,theta,throughput";
inline constexpr std::string_view kSimulateHeader =
    "mode,n_slots,seed,rng,empirical_throughput,analytic_throughput,se_throughput,"
    "empirical_avg_power,budget,se_power";

inline void write_sweep_row(std::ostream& out, const std::string& variable, double value,
                            const SchemeRow& r) {
  using detail::opt_cell;
  out << variable << ',' << detail::fmt(value) << ',' << to_string(r.scheme) << ','
      << opt_cell(r.p_s) << ',' << opt_cell(r.p_r) << ',' << opt_cell(r.prob) << ','
      << opt_cell(r.theta) << ',' << opt_cell(r.throughput) << ',' << r.case_label << '\n';
}

/// Solves every requested mode at sc.p0. Rows go to `csv`, a readable
/// summary and warnings to `log`.
inline std::vector<SchemeRow> run_solve(const Scenario& sc, std::ostream& csv, std::ostream& log) {
  ModelSet models(sc.gains, sc.circuit);
  std::vector<SchemeRow> rows;
  csv << kSweepHeader << '\n';
  for (Scheme s : sc.modes) {
    SchemeRow r = models.evaluate(s, sc.p0);
    write_sweep_row(csv, "P0", sc.p0, r);
    log << to_string(s) << ": ";
    if (r.throughput) {
      log << "throughput=" << detail::fmt(*r.throughput);
      if (r.p_s) log << " p_s=" << detail::fmt(*r.p_s) << " p_r=" << detail::fmt(*r.p_r)
                     << " prob=" << detail::fmt(*r.prob);
      if (r.theta) log << " theta=" << detail::fmt(*r.theta);
      if (!r.case_label.empty()) log << " case=" << r.case_label;
    } else {
      log << "n/a";
    }
    log << '\n';
    if (!r.warning.empty()) log << "warning: " << to_string(s) << ": " << r.warning << '\n';
    rows.push_back(std::move(r));
  }
  return rows;
}

/// One row per sweep point per requested mode, in sweep order.
inline void run_sweep(const Scenario& sc, std::ostream& csv) {
  csv << kSweepHeader << '\n';
  const std::string& var = sc.sweep.variable;
  std::optional<ModelSet> fixed;
  if (var == "P0") fixed.emplace(sc.gains, sc.circuit);
  for (int i = 0; i < sc.sweep.axis.steps; ++i) {
    const double x = sc.sweep.axis.at(i);
    ChannelGains g = sc.gains;
    CircuitModel cm = sc.circuit;
    double p0 = sc.p0;
    if (var == "P0") p0 = x;
    else if (var == "h_sr") g.h_sr = x;
    else if (var == "h_rd") g.h_rd = x;
    else if (var == "alpha_d") cm = cm.with_alpha_d(x);
    else if (var == "alpha_r") cm = cm.with_alpha_r(x);
    std::optional<ModelSet> local;
    ModelSet& models = fixed ? *fixed : local.emplace(g, cm);
    for (Scheme s : sc.modes) write_sweep_row(csv, var, x, models.evaluate(s, p0));
  }
}

struct RegionCell {
  double h_sr = 0.0;
  double h_rd = 0.0;
  std::string winner;
  double theta = 1.0;
  double throughput = 0.0;
};

/// MT's choice (DLT, RAT_DL or MT) on the (h_sr, h_rd) grid at budget p0.
inline std::vector<RegionCell> region_map(const Scenario& sc, double p0) {
  std::vector<RegionCell> cells;
  for (int i = 0; i < sc.region.h_sr.steps; ++i) {
    for (int j = 0; j < sc.region.h_rd.steps; ++j) {
      ChannelGains g = sc.gains;
      g.h_sr = sc.region.h_sr.at(i);
      g.h_rd = sc.region.h_rd.at(j);
      const MixedSolution m = MixedModel(g, sc.circuit).solve(p0);
      cells.push_back({g.h_sr, g.h_rd, std::string(m.winner()), m.theta_star, m.throughput});
    }
  }
  return cells;
}

inline void run_region(const Scenario& sc, std::ostream& csv) {
  csv << kRegionHeader << '\n';
  for (const RegionCell& c : region_map(sc, sc.p0)) {
    csv << detail::fmt(c.h_sr) << ',' << detail::fmt(c.h_rd) << ',' << c.winner << ','
        << detail::fmt(c.theta) << ',' << detail::fmt(c.throughput) << '\n';
  }
}

/// Simulates sc.sim_mode at sc.p0 for sc.slots slots.
inline SimReport simulate_scenario(const Scenario& sc, const SimOptions& opt = {}) {
  ModelSet models(sc.gains, sc.circuit);
  SimReport rep;
  const double p0 = sc.p0;
  switch (sc.sim_mode) {
    case Scheme::MT:
      rep = simulate_mixed(models.mixed().solve(p0), sc.gains, sc.circuit, sc.slots, sc.seed, opt);
      break;
    case Scheme::DLT:
      rep = simulate(models.dlt().solve(p0).alloc, sc.gains, sc.circuit, sc.slots, sc.seed, opt);
      break;
    case Scheme::RAT_DL:
      rep = simulate(models.rat_dl().solve(p0).allocation(), sc.gains, sc.circuit, sc.slots,
                     sc.seed, opt);
      break;
    case Scheme::RAT_WDL:
      rep = simulate(models.rat_wdl().solve(p0).allocation(), sc.gains, sc.circuit, sc.slots,
                     sc.seed, opt);
      break;
    case Scheme::CDLT:
      rep = simulate(baseline_cdlt(p0, sc.gains, sc.circuit), sc.gains, sc.circuit, sc.slots,
                     sc.seed, opt);
      break;
    case Scheme::CRAT_DL:
      rep = simulate(baseline_crat_dl(p0, sc.gains, sc.circuit), sc.gains, sc.circuit, sc.slots,
                     sc.seed, opt);
      break;
    case Scheme::SILENT:
      rep = simulate(ModeAllocation::silent(), sc.gains, sc.circuit, sc.slots, sc.seed, opt);
      break;
  }
  rep.mode = std::string(to_string(sc.sim_mode));
  rep.budget = sc.sim_mode == Scheme::SILENT ? 0.0 : p0;
  return rep;
}

inline void run_simulate(const Scenario& sc, const SimOptions& opt, std::ostream& csv) {
  const SimReport r = simulate_scenario(sc, opt);
  using detail::fmt;
  csv << kSimulateHeader << '\n'
      << r.mode << ',' << r.n_slots << ',' << r.rng_seed << ',' << r.rng_algorithm << ','
      << fmt(r.empirical_throughput) << ',' << fmt(r.analytic_throughput) << ','
      << fmt(r.se_throughput) << ',' << fmt(r.empirical_avg_power) << ',' << fmt(r.budget) << ','
      << fmt(r.se_power) << '\n';
}

}  // namespace relaypower
