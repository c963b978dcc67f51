#include "shortlist/welfare.hpp"

#include <algorithm>

#include "shortlist/fixed_point.hpp"

namespace shortlist {

double welfare(const MatchMasses& m, double high_value) {
  return 2.0 * high_value * m.hh + (high_value + 1.0) * (m.hl + m.lh) +
         2.0 * m.ll;
}

double welfare_of_profile(const EquilibriumProfile& profile) {
  return welfare(profile.masses(), profile.config.high_value);
}

double simple_benchmark_with_lists(const MarketConfig& config) {
  const int K = config.list_length;
  const MarketOutcome out =
      evaluate_profile(config, Strategy(K), Strategy(0.0));
  return welfare(out.masses(), config.high_value);
}

double simple_benchmark(const MarketConfig& config) {
  return simple_benchmark_with_lists(config.with_list_length(1));
}

MatchMasses optimum_masses(const MarketConfig& c) {
  // Weights 2v >= v+1 >= 2 form a Monge array, so filling greedily from the
  // high-high corner is optimal.
  MatchMasses m;
  double dh = c.doctors_high, dl = c.doctors_low;
  double hh = c.hospitals_high, hl = c.hospitals_low;
  m.hh = std::min(dh, hh);
  dh -= m.hh;
  hh -= m.hh;
  m.hl = std::min(dh, hl);
  hl -= m.hl;
  m.lh = std::min(dl, hh);
  dl -= m.lh;
  m.ll = std::min(dl, hl);
  return m;
}

double optimum_benchmark(const MarketConfig& config) {
  return welfare(optimum_masses(config), config.high_value);
}

WelfareReport efficiency_report(const EquilibriumProfile& profile) {
  const MarketConfig& c = profile.config;
  WelfareReport r;
  r.w_nash = welfare_of_profile(profile);
  r.w_simple = simple_benchmark(c);
  r.w_simple_lists = simple_benchmark_with_lists(c);
  r.w_opt = optimum_benchmark(c);
  r.ratio_nash_simple = r.w_simple > 0.0 ? r.w_nash / r.w_simple : 0.0;
  r.ratio_nash_opt = r.w_opt > 0.0 ? r.w_nash / r.w_opt : 0.0;
  r.balanced = c.is_balanced();
  return r;
}

WelfareReport efficiency_report(const MarketConfig& config) {
  return efficiency_report(solve_market(config));
}

}  // namespace shortlist
