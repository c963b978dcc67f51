#include "shortlist/fixed_point.hpp"

#include <cmath>
#include <string>

namespace shortlist {

namespace {

constexpr double kLowestProbability = 1e-15;
constexpr int kMaxBisection = 200;
constexpr int kScanPoints = 52;  // p = 2^-j, j = 0..51
constexpr double kResidualLimit = 1e-12;

PoolSolution trivial_solution(const TierPool& pool, double p) {
  PoolSolution s;
  s.acceptance = p;
  s.free_after = pool.hospital_mass > 0.0 ? pool.free_fraction : 0.0;
  return s;
}

StageOutcome run_stage(double doctor_mass, const Strategy& s, int list_length,
                       double hospitals_high, double hospitals_low,
                       double free_high, double free_low) {
  if (s.value() > list_length) {
    throw std::domain_error("strategy exceeds list length");
  }
  const TierPool top =
      TierPool::uniform(doctor_mass, s, hospitals_high, free_high);
  const PoolSolution up = solve_pool(top);

  TierPool bottom;
  bottom.hospital_mass = hospitals_low;
  bottom.free_fraction = free_low;
  for (const auto& sh : top.applicants) {
    const double rejected = sh.mass * (1.0 - match_prob(up.acceptance, sh.slots));
    bottom.applicants.push_back({rejected, list_length - sh.slots});
  }
  const PoolSolution down = solve_pool(bottom);

  StageOutcome out;
  out.p_high = up.acceptance;
  out.p_low = down.acceptance;
  out.m_high = up.matched_doctors;
  out.m_low = down.matched_doctors;
  out.free_high = up.free_after;
  out.free_low = down.free_after;
  return out;
}

}  // namespace

TierPool TierPool::uniform(double doctor_mass, const Strategy& s,
                           double hospital_mass, double free_fraction) {
  TierPool pool;
  pool.hospital_mass = hospital_mass;
  pool.free_fraction = free_fraction;
  for (const auto& sh : high_slot_shares(doctor_mass, s)) {
    if (sh.mass > 0.0) pool.applicants.push_back(sh);
  }
  return pool;
}

double TierPool::doctor_mass() const {
  double d = 0.0;
  for (const auto& sh : applicants) d += sh.mass;
  return d;
}

double TierPool::total_slots() const {
  double s = 0.0;
  for (const auto& sh : applicants) s += sh.mass * sh.slots;
  return s;
}

double pool_residual(const TierPool& pool, double p) {
  const double matched = matched_mass(p, pool.applicants);
  const double rate = applications_sent(p, pool.applicants) / pool.hospital_mass;
  return matched + pool.free_fraction * pool.hospital_mass * std::expm1(-rate);
}

PoolSolution solve_pool(const TierPool& pool) {
  if (!(pool.free_fraction >= 0.0 && pool.free_fraction <= 1.0)) {
    throw std::domain_error("free fraction must lie in [0, 1]");
  }
  for (const auto& sh : pool.applicants) {
    if (!(sh.mass >= 0.0) || sh.slots < 0) {
      throw std::domain_error("pool applicants must have nonnegative mass and slots");
    }
  }
  if (pool.hospital_mass <= 0.0) return trivial_solution(pool, 0.0);
  // An isolated application succeeds iff the hospital is free.
  if (pool.total_slots() <= 0.0) return trivial_solution(pool, pool.free_fraction);
  if (pool.free_fraction == 0.0) return trivial_solution(pool, 0.0);

  // Coarse geometric scan from p = 1 downwards; keep the bracket of the
  // largest root and count sign changes.
  double hi = 1.0;
  double h_hi = pool_residual(pool, hi);
  if (h_hi < 0.0) {
    throw SolverError("pool residual negative at p = 1; cannot bracket root");
  }
  double lo = -1.0;
  int sign_changes = 0;
  double prev_p = hi;
  double prev_h = h_hi;
  for (int j = 1; j < kScanPoints; ++j) {
    const double p = std::ldexp(1.0, -j);
    const double h = pool_residual(pool, p);
    if ((h < 0.0) != (prev_h < 0.0)) {
      ++sign_changes;
      if (lo < 0.0 && h < 0.0) {
        lo = p;
        hi = prev_p;
      }
    }
    prev_p = p;
    prev_h = h;
  }
  if (lo < 0.0) {
    const double h = pool_residual(pool, kLowestProbability);
    if (h >= 0.0) {
      throw SolverError("pool residual has no sign change on (0, 1]");
    }
    lo = kLowestProbability;
    hi = prev_p;
    ++sign_changes;
  }

  for (int it = 0; it < kMaxBisection; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (pool_residual(pool, mid) < 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double r_lo = pool_residual(pool, lo);
  const double r_hi = pool_residual(pool, hi);
  const double p = std::abs(r_lo) < std::abs(r_hi) ? lo : hi;

  PoolSolution s;
  s.acceptance = p;
  s.residual = std::abs(r_lo) < std::abs(r_hi) ? r_lo : r_hi;
  if (std::abs(s.residual) >= kResidualLimit) {
    throw SolverError("pool balance did not converge (residual " +
                      std::to_string(s.residual) + ")");
  }
  s.matched_doctors = matched_mass(p, pool.applicants);
  s.arrival_rate = applications_sent(p, pool.applicants) / pool.hospital_mass;
  s.matched_hospitals =
      -pool.free_fraction * pool.hospital_mass * std::expm1(-s.arrival_rate);
  s.free_after = pool.free_fraction * std::exp(-s.arrival_rate);
  s.multiple_roots = sign_changes > 1;
  return s;
}

StageOutcome high_stage(const MarketConfig& config, const Strategy& high) {
  return run_stage(config.doctors_high, high, config.list_length,
                   config.hospitals_high, config.hospitals_low, 1.0, 1.0);
}

StageOutcome low_stage(const MarketConfig& config, const Strategy& low,
                       const StageOutcome& availability) {
  return run_stage(config.doctors_low, low, config.list_length,
                   config.hospitals_high, config.hospitals_low,
                   availability.free_high, availability.free_low);
}

MarketOutcome evaluate_profile(const MarketConfig& config, const Strategy& high,
                               const Strategy& low) {
  MarketOutcome out;
  out.high = high_stage(config, high);
  out.low = low_stage(config, low, out.high);
  return out;
}

}  // namespace shortlist
