#include "shortlist/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace shortlist {

namespace {

constexpr int kRootIterations = 80;
constexpr double kRootWidth = 1e-13;
constexpr double kBestResponseTolerance = 1e-8;

// Bisection on [lo, hi] where g(lo) and g(hi) have opposite "positive" status.
double bisect(const IndifferenceFn& g, int k, double lo, double hi) {
  const bool lo_positive = g(lo, k) > 0.0;
  for (int it = 0; it < kRootIterations && hi - lo > kRootWidth; ++it) {
    const double mid = 0.5 * (lo + hi);
    if ((g(mid, k) > 0.0) == lo_positive) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

EquilibriumCandidate classify(double root, int k, bool stable, double tol) {
  if (root - k < tol) return {static_cast<double>(k), StrategyKind::Pure, stable};
  if (k + 1 - root < tol) {
    return {static_cast<double>(k + 1), StrategyKind::Pure, stable};
  }
  return {root, StrategyKind::Mixed, stable};
}

void add_candidate(std::vector<EquilibriumCandidate>& out,
                   const EquilibriumCandidate& c, double tol) {
  for (auto& existing : out) {
    if (std::abs(existing.high_slots - c.high_slots) < tol) {
      existing.stable = existing.stable || c.stable;
      return;
    }
  }
  out.push_back(c);
}

}  // namespace

const char* to_string(StrategyKind kind) {
  return kind == StrategyKind::Pure ? "pure" : "mixed";
}

double indifference(double p_high, double p_low, double high_value,
                    int list_length, int k) {
  if (k < 0 || k >= list_length) {
    throw std::domain_error("indifference slot index must lie in [0, K)");
  }
  const double miss_low = 1.0 - p_low;
  const double rest = 1.0 - std::pow(miss_low, list_length - k - 1);
  const double all = 1.0 - std::pow(miss_low, list_length - k);
  return p_high * high_value + (1.0 - p_high) * rest - all;
}

IndifferenceFn high_indifference(const MarketConfig& config) {
  return [config](double high_slots, int k) {
    const StageOutcome st = high_stage(config, Strategy(high_slots));
    return indifference(st.p_high, st.p_low, config.high_value,
                        config.list_length, k);
  };
}

IndifferenceFn low_indifference(const MarketConfig& config,
                                const StageOutcome& availability) {
  return [config, availability](double high_slots, int k) {
    const StageOutcome st = low_stage(config, Strategy(high_slots), availability);
    return indifference(st.p_high, st.p_low, config.high_value,
                        config.list_length, k);
  };
}

namespace {

double right_continuous(const IndifferenceFn& g, double high_slots,
                        int list_length) {
  if (!(high_slots >= 0.0 && high_slots <= list_length)) {
    throw std::domain_error("strategy must lie in [0, K]");
  }
  const int k = std::min(static_cast<int>(std::floor(high_slots)), list_length - 1);
  return g(high_slots, k);
}

}  // namespace

double g_high(double high_slots, const MarketConfig& config) {
  return right_continuous(high_indifference(config), high_slots,
                          config.list_length);
}

double g_low(double high_slots, const MarketConfig& config,
             const StageOutcome& availability) {
  return right_continuous(low_indifference(config, availability), high_slots,
                          config.list_length);
}

int TierEquilibrium::stable_count() const {
  return static_cast<int>(std::count_if(
      candidates.begin(), candidates.end(),
      [](const EquilibriumCandidate& c) { return c.stable; }));
}

TierEquilibrium solve_tier(const IndifferenceFn& g, int list_length,
                           const TierSolveOptions& options) {
  if (list_length < 1) throw std::domain_error("K must be at least 1");
  const int m = std::max(options.samples_per_interval, 1);
  const double tol = options.strategy_tolerance;

  TierEquilibrium out;
  std::vector<double> values(m + 1);
  double left_limit = 0.0;
  for (int k = 0; k < list_length; ++k) {
    for (int i = 0; i <= m; ++i) {
      values[i] = g(k + static_cast<double>(i) / m, k);
    }
    if (values[0] <= 0.0 && (k == 0 || left_limit > 0.0)) {
      add_candidate(out.candidates, {double(k), StrategyKind::Pure, true}, tol);
    }
    for (int i = 0; i < m; ++i) {
      const double a = k + static_cast<double>(i) / m;
      const double b = k + static_cast<double>(i + 1) / m;
      if (values[i + 1] > values[i] + 1e-15) out.decreasing_within_intervals = false;
      const bool pos_a = values[i] > 0.0;
      const bool pos_b = values[i + 1] > 0.0;
      if (pos_a == pos_b) continue;
      const double root = bisect(g, k, a, b);
      add_candidate(out.candidates, classify(root, k, pos_a, tol), tol);
    }
    left_limit = values[m];
  }
  if (left_limit >= 0.0) {
    add_candidate(out.candidates,
                  {double(list_length), StrategyKind::Pure, true}, tol);
  }
  if (out.candidates.empty()) {
    throw SolverError("no equilibrium found for tier");
  }
  std::sort(out.candidates.begin(), out.candidates.end(),
            [](const auto& a, const auto& b) { return a.high_slots < b.high_slots; });

  std::vector<EquilibriumCandidate> pool;
  for (const auto& c : out.candidates) {
    if (c.stable) pool.push_back(c);
  }
  if (pool.empty()) pool = out.candidates;
  const EquilibriumCandidate& chosen =
      options.selection == Selection::Highest ? pool.back() : pool.front();
  out.strategy = Strategy(chosen.high_slots);
  out.kind = chosen.kind;
  return out;
}

double best_response_gap(const Strategy& played, const StageOutcome& stage,
                         double high_value, int list_length) {
  double best = -1.0;
  for (int j = 0; j <= list_length; ++j) {
    best = std::max(best, utility(j, stage.p_high, stage.p_low, high_value,
                                  list_length));
  }
  const int k = played.base();
  double gap = best - utility(k, stage.p_high, stage.p_low, high_value, list_length);
  if (!played.is_pure()) {
    gap = std::max(gap, best - utility(k + 1, stage.p_high, stage.p_low,
                                       high_value, list_length));
  }
  return gap;
}

EquilibriumProfile solve_market(const MarketConfig& config,
                                const TierSolveOptions& options) {
  config.validate();
  EquilibriumProfile prof;
  prof.config = config;
  const int K = config.list_length;

  prof.high = solve_tier(high_indifference(config), K, options);
  prof.stage_high = high_stage(config, prof.high.strategy);
  prof.low = solve_tier(low_indifference(config, prof.stage_high), K, options);
  prof.stage_low = low_stage(config, prof.low.strategy, prof.stage_high);

  prof.best_response_gap_high =
      best_response_gap(prof.high.strategy, prof.stage_high, config.high_value, K);
  prof.best_response_gap_low =
      best_response_gap(prof.low.strategy, prof.stage_low, config.high_value, K);
  if (prof.best_response_gap_high > kBestResponseTolerance ||
      prof.best_response_gap_low > kBestResponseTolerance) {
    throw SolverError("solved strategies are not best responses");
  }
  return prof;
}

double critical_value(double mix, double ratio) {
  if (!(mix > 0.0 && mix < 1.0)) {
    throw std::domain_error("mixing fraction must lie strictly inside (0, 1)");
  }
  if (!(ratio > 0.0)) throw std::domain_error("ratio must be positive");
  const double e = std::numbers::e;
  const double low_gain = -std::expm1(-(1.0 - mix)) / (1.0 - mix);
  const double high_gain = -std::expm1(-mix * ratio) / (e * mix * ratio);
  return low_gain / high_gain;
}

}  // namespace shortlist
