// Minimal library use: solve each mode at one budget and print the results.

#include <cstdio>

#include "relaypower/relaypower.hpp"

int main() {
  using namespace relaypower;
  const ChannelGains g = ChannelGains::make(1.0, 10.0, 3.0);
  const CircuitModel cm = CircuitModel::from_aggregates(0.2, 0.24, 0.18);

  const double p0 = 0.5;
  const DltSolution d = solve_dlt(p0, g, cm);
  const RatDlSolution r = solve_rat_dl(p0, g, cm);
  const RatWdlSolution e = solve_rat_wdl(p0, g, cm);
  const MixedSolution m = solve_mixed(p0, g, cm);

  std::printf("DLT     p_s=%.4f prob=%.4f C=%.4f\n", d.alloc.p_s, d.alloc.prob, d.alloc.throughput);
  std::printf("RAT-DL  p_s=%.4f p_r=%.4f prob=%.4f C=%.4f (%s)\n", r.p_s, r.p_r, r.prob,
              r.throughput, std::string(to_string(r.case_label)).c_str());
  std::printf("RAT-WDL p_s=%.4f p_r=%.4f prob=%.4f C=%.4f\n", e.p_s, e.p_r, e.prob, e.throughput);
  std::printf("MT      theta=%.4f C=%.4f (%s)\n", m.theta_star, m.throughput,
              std::string(to_string(m.case_label)).c_str());

  const SimReport rep = simulate(r.allocation(), g, cm, 100000, 7);
  std::printf("simulated RAT-DL: %.4f +- %.4f (analytic %.4f)\n", rep.empirical_throughput,
              rep.se_throughput, rep.analytic_throughput);
}
