// Large-market balance equations.
//
// A pool is one tier of hospitals receiving applications from a population of
// doctors with a known slot distribution. Applications land uniformly over all
// hospitals of the tier; a hospital already taken (by a doctor the hospital
// ranks higher) rejects automatically, so the per-application acceptance
// probability p already includes availability. p is the root of
//
//   h(p) = sum_i m_i (1 - (1-p)^s_i) - F H (1 - exp(-sum_i m_i A(p, s_i) / H))
//
// i.e. matched doctor mass equals matched hospital mass.

#ifndef SHORTLIST_FIXED_POINT_HPP_
#define SHORTLIST_FIXED_POINT_HPP_

#include <stdexcept>
#include <vector>

#include "shortlist/market.hpp"

namespace shortlist {

class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct TierPool {
  std::vector<SlotShare> applicants;
  double hospital_mass = 1.0;
  double free_fraction = 1.0;

  // Pool for `doctor_mass` doctors all playing strategy `s` on this tier.
  static TierPool uniform(double doctor_mass, const Strategy& s,
                          double hospital_mass, double free_fraction = 1.0);

  double doctor_mass() const;
  double total_slots() const;
};

struct PoolSolution {
  double acceptance = 1.0;        // p
  double residual = 0.0;          // h(p) re-evaluated at the returned p
  double matched_doctors = 0.0;   // doctor-side count of matches
  double matched_hospitals = 0.0; // hospital-side count of matches
  double arrival_rate = 0.0;      // applications per hospital of the tier
  double free_after = 1.0;        // fraction of the tier still free afterwards
  bool multiple_roots = false;    // h changed sign more than once; largest root kept
};

double pool_residual(const TierPool& pool, double p);

// Throws SolverError if no sign change of h can be bracketed.
PoolSolution solve_pool(const TierPool& pool);

// High doctors are placed first: their pool on high hospitals, then the
// doctors rejected everywhere on top spill into the low pool with their
// remaining slots.
StageOutcome high_stage(const MarketConfig& config, const Strategy& high);

// Low doctors face the hospitals left free by the high stage.
StageOutcome low_stage(const MarketConfig& config, const Strategy& low,
                       const StageOutcome& availability);

struct MarketOutcome {
  StageOutcome high;
  StageOutcome low;

  MatchMasses masses() const {
    return {high.m_high, high.m_low, low.m_high, low.m_low};
  }
};

// Both stages for an arbitrary (not necessarily equilibrium) strategy pair.
MarketOutcome evaluate_profile(const MarketConfig& config, const Strategy& high,
                               const Strategy& low);

}  // namespace shortlist

#endif  // SHORTLIST_FIXED_POINT_HPP_
