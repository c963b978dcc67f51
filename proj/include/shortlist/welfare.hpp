// Social welfare of a match outcome and the two reference designs it is
// compared against.
//
// Welfare counts both sides: a high-high match is worth 2v, a mixed-tier match
// v+1, a low-low match 2. Values are per unit doctor mass.

#ifndef SHORTLIST_WELFARE_HPP_
#define SHORTLIST_WELFARE_HPP_

#include "shortlist/equilibrium.hpp"
#include "shortlist/market.hpp"

namespace shortlist {

double welfare(const MatchMasses& masses, double high_value);
double welfare_of_profile(const EquilibriumProfile& profile);

// Every doctor sends one application within his own tier. Equals
// 2(v d_high + d_low)(1 - 1/e) for balanced tiers.
double simple_benchmark(const MarketConfig& config);

// Same-tier applications only, but with the config's full list length.
double simple_benchmark_with_lists(const MarketConfig& config);

// Max-weight assignment of the tier masses (full preference lists).
double optimum_benchmark(const MarketConfig& config);
MatchMasses optimum_masses(const MarketConfig& config);

struct WelfareReport {
  double w_nash = 0.0;
  double w_simple = 0.0;        // one same-tier application per doctor
  double w_simple_lists = 0.0;  // K same-tier applications per doctor
  double w_opt = 0.0;
  double ratio_nash_simple = 0.0;
  double ratio_nash_opt = 0.0;
  bool balanced = true;  // the simple benchmarks presume balanced tiers
};

WelfareReport efficiency_report(const EquilibriumProfile& profile);
WelfareReport efficiency_report(const MarketConfig& config);

}  // namespace shortlist

#endif  // SHORTLIST_WELFARE_HPP_
