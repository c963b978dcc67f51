// Domain types and elementary probability / utility kernels for the two-tier
// short-list matching market.
//
// Conventions: the low-tier match value is 1 and the high-tier value is
// `high_value` > 1. Doctor masses are normalized so that the two doctor tiers
// sum to one; every welfare figure is therefore "per unit doctor mass".

#ifndef SHORTLIST_MARKET_HPP_
#define SHORTLIST_MARKET_HPP_

#include <array>
#include <span>
#include <stdexcept>
#include <string>

namespace shortlist {

class InvalidConfig : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct MarketConfig {
  double high_value = 2.0;  // value of a high-tier match; low tier is 1
  int list_length = 1;      // K
  double doctors_high = 0.5;
  double doctors_low = 0.5;
  double hospitals_high = 0.5;
  double hospitals_low = 0.5;

  // Hospital masses equal to doctor masses in each tier.
  static MarketConfig balanced(double high_value, int list_length,
                               double share_high);

  // Throws InvalidConfig when an invariant does not hold.
  void validate() const;

  // Low-to-high doctor ratio (infinite when there are no high doctors).
  double ratio() const;
  bool is_balanced(double tol = 1e-12) const;

  MarketConfig with_list_length(int k) const {
    MarketConfig c = *this;
    c.list_length = k;
    return c;
  }
};

// Expected number of high-tier applications per doctor. A value X = k + x with
// k = floor(X) means a fraction x of the tier lists (k+1, K-k-1) and the rest
// lists (k, K-k).
class Strategy {
 public:
  Strategy() = default;
  explicit Strategy(double high_slots);

  double value() const { return high_slots_; }
  int base() const { return base_; }
  double mix() const { return mix_; }
  bool is_pure() const { return mix_ == 0.0; }

 private:
  double high_slots_ = 0.0;
  int base_ = 0;
  double mix_ = 0.0;
};

// A mass of doctors all holding the same number of application slots for one
// tier of hospitals.
struct SlotShare {
  double mass = 0.0;
  int slots = 0;
};

// The two-point slot distribution a tier's strategy induces on the high pool.
std::array<SlotShare, 2> high_slot_shares(double doctor_mass, const Strategy& s);

struct StageOutcome {
  double p_high = 1.0;  // acceptance probability of one application to a high hospital
  double p_low = 1.0;   // same, to a low hospital
  double m_high = 0.0;  // mass of this doctor tier matched to high hospitals
  double m_low = 0.0;   // mass matched to low hospitals
  double free_high = 1.0;  // fraction of high hospitals still unmatched afterwards
  double free_low = 1.0;
};

struct MatchMasses {
  double hh = 0.0;  // high doctor - high hospital
  double hl = 0.0;  // high doctor - low hospital
  double lh = 0.0;
  double ll = 0.0;

  double total() const { return hh + hl + lh + ll; }
};

// Probability that a doctor holding `high_slots` (possibly mixed) applications
// is accepted somewhere when each application succeeds independently with p.
double match_prob(double p, double high_slots);
double match_prob(double p, int slots);

// Expected number of applications actually sent: the doctor stops at the
// first acceptance. Tends to the slot count as p -> 0.
double expected_apps(double p, double high_slots);
double expected_apps(double p, int slots);

// Mass-weighted versions over a slot distribution.
double matched_mass(double p, std::span<const SlotShare> shares);
double applications_sent(double p, std::span<const SlotShare> shares);

// Expected utility of one doctor listing `high_apps` high hospitals and the
// remaining K - high_apps low ones, given per-application acceptance
// probabilities at each tier.
double utility(int high_apps, double p_high, double p_low, double high_value,
               int list_length);

}  // namespace shortlist

#endif  // SHORTLIST_MARKET_HPP_
