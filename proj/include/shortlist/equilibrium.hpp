// Symmetric equilibrium of the short-list application game, tier by tier.
//
// For a tier playing X = k + x, g(X) is the gain of using slot k+1 on a high
// hospital instead of leaving it (and everything after) on low hospitals:
//
//   g = p v + (1-p)(1-(1-p')^(K-k-1)) - (1-(1-p')^(K-k))
//
// with p, p' the tier's acceptance probabilities when the whole tier plays X.
// Zeros of g inside an interval are mixed equilibria; an integer k where g
// jumps from positive (left limit) to non-positive is a pure equilibrium.

#ifndef SHORTLIST_EQUILIBRIUM_HPP_
#define SHORTLIST_EQUILIBRIUM_HPP_

#include <functional>
#include <vector>

#include "shortlist/fixed_point.hpp"
#include "shortlist/market.hpp"

namespace shortlist {

enum class StrategyKind { Pure, Mixed };

const char* to_string(StrategyKind kind);

// Which equilibrium to report when the scan finds more than one.
enum class Selection { Highest, Lowest };

// g on the closed interval [k, k+1]: the population plays X, the deviating
// slot is number k+1. Evaluating at X = k+1 gives the left limit of g there.
using IndifferenceFn = std::function<double(double high_slots, int k)>;

double indifference(double p_high, double p_low, double high_value,
                    int list_length, int k);

IndifferenceFn high_indifference(const MarketConfig& config);
IndifferenceFn low_indifference(const MarketConfig& config,
                                const StageOutcome& availability);

// Right-continuous g for X in [0, K); at X = K returns the left limit
// v p(K) - p'(K), whose sign decides whether all-high is an equilibrium.
double g_high(double high_slots, const MarketConfig& config);
double g_low(double high_slots, const MarketConfig& config,
             const StageOutcome& availability);

struct TierSolveOptions {
  int samples_per_interval = 32;
  double strategy_tolerance = 1e-9;
  Selection selection = Selection::Highest;
};

struct EquilibriumCandidate {
  double high_slots = 0.0;
  StrategyKind kind = StrategyKind::Pure;
  // False for indifference points where g crosses zero upwards; these are
  // equilibria but not stable under small perturbations of X.
  bool stable = true;
};

struct TierEquilibrium {
  Strategy strategy;
  StrategyKind kind = StrategyKind::Pure;
  std::vector<EquilibriumCandidate> candidates;  // ascending in high_slots
  // Whether g was non-increasing between all sampled points of each interval.
  bool decreasing_within_intervals = true;

  int stable_count() const;
};

// Throws SolverError when no equilibrium is found (cannot happen for a
// well-formed g).
TierEquilibrium solve_tier(const IndifferenceFn& g, int list_length,
                           const TierSolveOptions& options = {});

struct EquilibriumProfile {
  MarketConfig config;
  TierEquilibrium high;
  TierEquilibrium low;
  StageOutcome stage_high;
  StageOutcome stage_low;
  // max_j f(j) minus the utility of the strategies actually played; zero up
  // to rounding at a true equilibrium.
  double best_response_gap_high = 0.0;
  double best_response_gap_low = 0.0;

  const Strategy& x_high() const { return high.strategy; }
  const Strategy& x_low() const { return low.strategy; }
  StrategyKind kind_high() const { return high.kind; }
  StrategyKind kind_low() const { return low.kind; }
  MatchMasses masses() const {
    return {stage_high.m_high, stage_high.m_low, stage_low.m_high,
            stage_low.m_low};
  }
};

// Solves the high tier, fixes its outcome, then solves the low tier. Throws
// SolverError if the result fails the best-response check by more than 1e-8.
EquilibriumProfile solve_market(const MarketConfig& config,
                                const TierSolveOptions& options = {});

// Largest utility shortfall of the played pure strategies (floor(X), plus
// floor(X)+1 when mixed) against the best pure response.
double best_response_gap(const Strategy& played, const StageOutcome& stage,
                         double high_value, int list_length);

// K = 1, every high doctor applying high, balanced tiers with ratio r: the
// high-tier value that makes low doctors indifferent at mixing fraction x.
double critical_value(double mix, double ratio);

}  // namespace shortlist

#endif  // SHORTLIST_EQUILIBRIUM_HPP_
