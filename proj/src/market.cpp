#include "shortlist/market.hpp"

#include <cmath>
#include <limits>

namespace shortlist {

namespace {

constexpr double kSeriesThreshold = 1e-8;

void check_probability(double p, const char* what) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw std::domain_error(std::string(what) + " must lie in [0, 1]");
  }
}

// 1 - (1-p)^k without cancellation for small p.
double accept_any(double p, int k) {
  if (k <= 0) return 0.0;
  if (p >= 1.0) return 1.0;
  return -std::expm1(k * std::log1p(-p));
}

}  // namespace

MarketConfig MarketConfig::balanced(double high_value, int list_length,
                                    double share_high) {
  MarketConfig c;
  c.high_value = high_value;
  c.list_length = list_length;
  c.doctors_high = share_high;
  c.doctors_low = 1.0 - share_high;
  c.hospitals_high = c.doctors_high;
  c.hospitals_low = c.doctors_low;
  return c;
}

void MarketConfig::validate() const {
  if (!(high_value > 1.0) || !std::isfinite(high_value)) {
    throw InvalidConfig("v must exceed 1");
  }
  if (list_length < 1) throw InvalidConfig("K must be at least 1");
  for (double m : {doctors_high, doctors_low, hospitals_high, hospitals_low}) {
    if (!(m >= 0.0) || !std::isfinite(m)) {
      throw InvalidConfig("tier masses must be finite and nonnegative");
    }
  }
  if (std::abs(doctors_high + doctors_low - 1.0) > 1e-12) {
    throw InvalidConfig("doctor masses must sum to 1");
  }
  if (hospitals_high + hospitals_low <= 0.0) {
    throw InvalidConfig("hospital mass must be positive");
  }
}

double MarketConfig::ratio() const {
  if (doctors_high == 0.0) return std::numeric_limits<double>::infinity();
  return doctors_low / doctors_high;
}

bool MarketConfig::is_balanced(double tol) const {
  return std::abs(hospitals_high - doctors_high) <= tol &&
         std::abs(hospitals_low - doctors_low) <= tol;
}

Strategy::Strategy(double high_slots) : high_slots_(high_slots) {
  if (!(high_slots >= 0.0) || !std::isfinite(high_slots)) {
    throw std::domain_error("strategy must be a finite nonnegative slot count");
  }
  const double k = std::floor(high_slots);
  base_ = static_cast<int>(k);
  mix_ = high_slots - k;
}

std::array<SlotShare, 2> high_slot_shares(double doctor_mass,
                                          const Strategy& s) {
  return {SlotShare{doctor_mass * (1.0 - s.mix()), s.base()},
          SlotShare{doctor_mass * s.mix(), s.base() + 1}};
}

double match_prob(double p, int slots) {
  check_probability(p, "acceptance probability");
  if (slots < 0) throw std::domain_error("slot count must be nonnegative");
  return accept_any(p, slots);
}

double match_prob(double p, double high_slots) {
  check_probability(p, "acceptance probability");
  const Strategy s(high_slots);
  const double lo = accept_any(p, s.base());
  if (s.is_pure()) return lo;
  return s.mix() * accept_any(p, s.base() + 1) + (1.0 - s.mix()) * lo;
}

double expected_apps(double p, int slots) {
  check_probability(p, "acceptance probability");
  if (slots < 0) throw std::domain_error("slot count must be nonnegative");
  if (p < kSeriesThreshold) {
    const double k = slots;
    return k - 0.5 * k * (k - 1.0) * p;
  }
  return accept_any(p, slots) / p;
}

double expected_apps(double p, double high_slots) {
  const Strategy s(high_slots);
  const double lo = expected_apps(p, s.base());
  if (s.is_pure()) return lo;
  return s.mix() * expected_apps(p, s.base() + 1) + (1.0 - s.mix()) * lo;
}

double matched_mass(double p, std::span<const SlotShare> shares) {
  double total = 0.0;
  for (const auto& sh : shares) {
    if (sh.mass > 0.0) total += sh.mass * match_prob(p, sh.slots);
  }
  return total;
}

double applications_sent(double p, std::span<const SlotShare> shares) {
  double total = 0.0;
  for (const auto& sh : shares) {
    if (sh.mass > 0.0) total += sh.mass * expected_apps(p, sh.slots);
  }
  return total;
}

double utility(int high_apps, double p_high, double p_low, double high_value,
               int list_length) {
  check_probability(p_high, "high acceptance probability");
  check_probability(p_low, "low acceptance probability");
  if (high_apps < 0 || high_apps > list_length) {
    throw std::domain_error("high application count must lie in [0, K]");
  }
  const double top = accept_any(p_high, high_apps);
  if (high_apps == list_length) return high_value * top;
  return high_value * top +
         (1.0 - top) * accept_any(p_low, list_length - high_apps);
}

}  // namespace shortlist
