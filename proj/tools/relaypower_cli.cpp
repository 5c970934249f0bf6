// relaypower: solve, sweep, region and simulate subcommands over a scenario file.
//
// Exit codes: 0 ok, 2 configuration error, 3 numerical inconsistency, 4 I/O.

#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "relaypower/relaypower.hpp"

namespace rp = relaypower;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitIo = 4;

struct Options {
  std::string config;
  std::string out;
  std::string modes;
  std::vector<std::string> overrides;
  std::string mode;
  double p0 = -1.0;
  long long seed = -1;
  long long slots = -1;
  bool db = false;
  bool duty_cycle = false;
  bool dump_config = false;
};

rp::Scenario load(const Options& o) {
  rp::ConfigMap map;
  if (!o.config.empty()) map = rp::read_config_file(o.config);
  for (const auto& s : o.overrides) rp::apply_override(map, s);
  if (!o.modes.empty()) map["modes"] = o.modes;
  if (!o.mode.empty()) map["sim_mode"] = o.mode;
  if (o.p0 >= 0.0) map["p0"] = rp::detail::fmt_exact(o.p0);
  if (o.seed >= 0) map["seed"] = std::to_string(o.seed);
  if (o.slots >= 0) map["slots"] = std::to_string(o.slots);
  return rp::build_scenario(map, o.db);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Throughput-optimal power allocation for a half-duplex DF relay channel"};
  app.require_subcommand(0, 1);
  Options o;
  app.add_option("--config", o.config, "scenario file (key = value lines)");
  app.add_option("--out", o.out, "output path (default stdout)");
  app.add_option("--modes", o.modes, "comma list of DLT,RAT_DL,RAT_WDL,MT,CDLT,CRAT_DL");
  app.add_option("--set", o.overrides, "override a config key, key=value (repeatable)");
  app.add_option("--p0", o.p0, "average power budget in W");
  app.add_option("--mode", o.mode, "scheme to simulate");
  app.add_option("--seed", o.seed, "RNG seed");
  app.add_option("--slots", o.slots, "number of simulated slots");
  app.add_flag("--db", o.db, "gains in the config are in dB");
  app.add_flag("--duty-cycle", o.duty_cycle, "deterministic on-off pattern instead of Bernoulli slots");
  app.add_flag("--dump-config", o.dump_config, "print the effective scenario and exit");
  auto* solve = app.add_subcommand("solve", "solve every requested mode at p0");
  auto* sweep = app.add_subcommand("sweep", "CSV sweep over P0, h_sr, h_rd, alpha_d or alpha_r");
  auto* region = app.add_subcommand("region", "CSV map of MT's choice over (h_sr, h_rd)");
  auto* simulate = app.add_subcommand("simulate", "Monte-Carlo run of sim_mode at p0");
  for (auto* sub : {solve, sweep, region, simulate}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    const rp::Scenario sc = load(o);

    std::ofstream file;
    if (!o.out.empty()) {
      file.open(o.out);
      if (!file) throw rp::IoError("cannot open output file " + o.out);
    }
    std::ostream& out = o.out.empty() ? std::cout : file;

    if (o.dump_config) {
      out << rp::dump_config(sc);
    } else if (solve->parsed()) {
      rp::run_solve(sc, out, std::cerr);
    } else if (sweep->parsed()) {
      rp::run_sweep(sc, out);
    } else if (region->parsed()) {
      rp::run_region(sc, out);
    } else if (simulate->parsed()) {
      rp::run_simulate(sc, rp::SimOptions{o.duty_cycle}, out);
    } else {
      std::cerr << "error: no subcommand given\n" << app.help();
      return kExitConfig;
    }
    out.flush();
    if (!out) throw rp::IoError("write failed");
  } catch (const rp::IoError& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return kExitIo;
  } catch (const rp::ValidationError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const rp::Error& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kExitNumerical;
  }
  return 0;
}
