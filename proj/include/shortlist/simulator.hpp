// Finite-market Monte-Carlo check of the large-market model.
//
// A finite instance has integer doctor and hospital counts per tier. Each
// doctor submits a list of distinct hospitals (his high-tier picks first),
// then doctor-proposing deferred acceptance runs on those lists. Hospitals rank
// high doctors above low doctors and break ties within a tier by an iid score
// per (hospital, doctor) pair. Scores come from a keyed hash of the trial seed
// and the pair, so they are reproducible without being stored.

#ifndef SHORTLIST_SIMULATOR_HPP_
#define SHORTLIST_SIMULATOR_HPP_

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "shortlist/equilibrium.hpp"
#include "shortlist/market.hpp"

namespace shortlist {

struct FiniteInstance {
  int doctors_high = 0;
  int doctors_low = 0;
  int hospitals_high = 0;
  int hospitals_low = 0;
  int list_length = 1;
  double high_value = 2.0;
  Strategy play_high;
  Strategy play_low;
  std::uint64_t seed = 0;

  // Counts are round(mass * size) with halves rounded up.
  static FiniteInstance scaled(const MarketConfig& config, const Strategy& high,
                               const Strategy& low, int size,
                               std::uint64_t seed);

  int doctors() const { return doctors_high + doctors_low; }
  int hospitals() const { return hospitals_high + hospitals_low; }
  bool doctor_is_high(int d) const { return d < doctors_high; }
  bool hospital_is_high(int h) const { return h < hospitals_high; }

  // Doctors are numbered high tier first, hospitals likewise.
  int first_low_doctor() const { return doctors_high; }
  int first_low_hospital() const { return hospitals_high; }
};

// Submitted preference lists in compressed-row form.
class ListSet {
 public:
  explicit ListSet(int doctors);

  std::span<const int> of(int doctor) const;
  int doctors() const { return static_cast<int>(offsets_.size()) - 1; }

  // Replaces an already pushed list. O(1) when the length is unchanged,
  // otherwise linear in the storage size.
  void assign(int doctor, std::span<const int> hospitals);

  // Appends a list for the next doctor during construction.
  void push(std::span<const int> hospitals);

 private:
  std::vector<int> entries_;
  std::vector<std::size_t> offsets_;
  int filled_ = 0;
};

// Each doctor independently picks k+1 high hospitals with probability x
// (X = k + x) and k otherwise, then fills the rest of his K slots with low
// hospitals. Throws InvalidConfig when a tier has fewer hospitals than a list
// asks for.
ListSet sample_lists(const FiniteInstance& instance);

// Every doctor lists every hospital, high tier first, each tier in random order.
ListSet full_lists(const FiniteInstance& instance);

// Tier-first hospital ranking with hashed within-tier scores.
class HospitalRanking {
 public:
  HospitalRanking(std::uint64_t seed, int doctors_high)
      : seed_(seed), doctors_high_(doctors_high) {}

  std::uint64_t score(int hospital, int doctor) const;
  // True if `hospital` ranks doctor a above doctor b.
  bool prefers(int hospital, int a, int b) const;

 private:
  std::uint64_t seed_;
  int doctors_high_;
};

inline constexpr int kUnmatched = -1;

struct Matching {
  std::vector<int> hospital_of;  // per doctor, kUnmatched if none
  std::vector<int> doctor_of;    // per hospital, kUnmatched if none
};

enum class ProposalOrder { Forward, Reverse };

Matching run_da(const FiniteInstance& instance, const ListSet& lists,
                ProposalOrder order = ProposalOrder::Forward);

// A (doctor, hospital) pair where the hospital is on the doctor's list ahead
// of his assignment and the hospital would take him over its current match.
std::optional<std::pair<int, int>> find_blocking_pair(
    const FiniteInstance& instance, const ListSet& lists,
    const Matching& matching);

struct MatchCounts {
  int hh = 0;
  int hl = 0;
  int lh = 0;
  int ll = 0;
};

MatchCounts count_matches(const FiniteInstance& instance, const Matching& m);

struct Estimate {
  double mean = 0.0;
  double std_error = 0.0;
};

// Mean and standard error of the mean; std_error is 0 for fewer than 2 samples.
Estimate summarize(std::span<const double> samples);

struct SimOptions {
  int size = 2000;  // n: tier counts are mass * n
  int trials = 200;
  std::uint64_t seed = 1;
};

struct SimReport {
  int trials = 0;
  int doctors = 0;
  // Match-type counts divided by the total number of doctors, so they compare
  // directly with the analytic masses.
  Estimate hh, hl, lh, ll;
  Estimate welfare;  // per doctor
  Estimate match_rate_high;  // matched fraction of high doctors
  Estimate match_rate_low;
};

// Seed of trial `index` under a master seed.
std::uint64_t trial_seed(std::uint64_t master, std::uint64_t index);

// Trials run concurrently; per-trial results are reduced in trial order, so
// the report does not depend on scheduling.
SimReport estimate(const MarketConfig& config, const Strategy& high,
                   const Strategy& low, const SimOptions& options);
SimReport estimate_serial(const MarketConfig& config, const Strategy& high,
                          const Strategy& low, const SimOptions& options);

struct ProbeTier {
  std::vector<Estimate> payoff;     // indexed by high applications j = 0..K
  int argmax = 0;
  int reference = 0;                // better of floor(X) and floor(X)+1
  std::vector<Estimate> advantage;  // payoff_j - payoff_reference, paired
  // No pure strategy beats the reference by more than two standard errors.
  bool consistent = true;
};

struct ProbeReport {
  ProbeTier high;
  ProbeTier low;
};

// A single doctor of each tier deviates to every pure strategy j while the
// rest of the market plays the profile. All deviations within a trial share
// the same market draw.
ProbeReport best_response_probe(const MarketConfig& config, const Strategy& high,
                                const Strategy& low, const SimOptions& options);

}  // namespace shortlist

#endif  // SHORTLIST_SIMULATOR_HPP_
