#include "shortlist/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <random>

namespace shortlist {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

int scaled_count(double mass, int size) {
  return static_cast<int>(std::floor(mass * size + 0.5));
}

// Draws `count` distinct integers from [first, first + range) into `out`.
void draw_distinct(std::mt19937_64& rng, int first, int range, int count,
                   std::vector<int>& out) {
  std::uniform_int_distribution<int> pick(first, first + range - 1);
  const std::size_t start = out.size();
  while (static_cast<int>(out.size() - start) < count) {
    const int h = pick(rng);
    if (std::find(out.begin() + start, out.end(), h) == out.end()) out.push_back(h);
  }
}

int high_count(std::mt19937_64& rng, const Strategy& s) {
  if (s.is_pure()) return s.base();
  std::bernoulli_distribution upper(s.mix());
  return s.base() + (upper(rng) ? 1 : 0);
}

void require_room(const FiniteInstance& inst, int highs, int lows) {
  if (highs > inst.hospitals_high || lows > inst.hospitals_low) {
    throw InvalidConfig("list asks for more hospitals than a tier has");
  }
}

// Largest list demands either doctor tier can make.
void require_lists_fit(const FiniteInstance& inst) {
  const int K = inst.list_length;
  for (const Strategy* s : {&inst.play_high, &inst.play_low}) {
    const int most_high = s->is_pure() ? s->base() : s->base() + 1;
    require_room(inst, most_high, K - s->base());
  }
}

}  // namespace

FiniteInstance FiniteInstance::scaled(const MarketConfig& config,
                                      const Strategy& high, const Strategy& low,
                                      int size, std::uint64_t seed) {
  config.validate();
  if (size < 1) throw InvalidConfig("market size must be positive");
  const double K = config.list_length;
  if (high.value() > K || low.value() > K) {
    throw InvalidConfig("strategy exceeds the list length");
  }
  FiniteInstance inst;
  inst.doctors_high = scaled_count(config.doctors_high, size);
  inst.doctors_low = scaled_count(config.doctors_low, size);
  inst.hospitals_high = scaled_count(config.hospitals_high, size);
  inst.hospitals_low = scaled_count(config.hospitals_low, size);
  inst.list_length = config.list_length;
  inst.high_value = config.high_value;
  inst.play_high = high;
  inst.play_low = low;
  inst.seed = seed;
  return inst;
}

ListSet::ListSet(int doctors) {
  offsets_.assign(static_cast<std::size_t>(doctors) + 1, 0);
}

std::span<const int> ListSet::of(int doctor) const {
  if (doctor >= filled_) return {};
  const auto b = offsets_.at(doctor);
  const auto e = offsets_.at(doctor + 1);
  return {entries_.data() + b, e - b};
}

void ListSet::push(std::span<const int> hospitals) {
  if (filled_ >= doctors()) throw std::out_of_range("list set is full");
  entries_.insert(entries_.end(), hospitals.begin(), hospitals.end());
  ++filled_;
  offsets_[filled_] = entries_.size();
}

void ListSet::assign(int doctor, std::span<const int> hospitals) {
  if (doctor < 0 || doctor >= filled_) throw std::out_of_range("no list to replace");
  const auto b = offsets_.at(doctor);
  const auto e = offsets_.at(doctor + 1);
  if (e - b == hospitals.size()) {
    std::copy(hospitals.begin(), hospitals.end(), entries_.begin() + b);
    return;
  }
  entries_.erase(entries_.begin() + b, entries_.begin() + e);
  entries_.insert(entries_.begin() + b, hospitals.begin(), hospitals.end());
  const auto shift = static_cast<std::ptrdiff_t>(hospitals.size()) -
                     static_cast<std::ptrdiff_t>(e - b);
  for (auto i = static_cast<std::size_t>(doctor) + 1;
       i <= static_cast<std::size_t>(filled_); ++i) {
    offsets_[i] = static_cast<std::size_t>(static_cast<std::ptrdiff_t>(offsets_[i]) + shift);
  }
}

ListSet sample_lists(const FiniteInstance& inst) {
  std::mt19937_64 rng(splitmix64(inst.seed ^ 0x5A17C0DEULL));
  ListSet lists(inst.doctors());
  std::vector<int> row;
  row.reserve(inst.list_length);
  for (int d = 0; d < inst.doctors(); ++d) {
    const Strategy& s = inst.doctor_is_high(d) ? inst.play_high : inst.play_low;
    const int highs = high_count(rng, s);
    const int lows = inst.list_length - highs;
    require_room(inst, highs, lows);
    row.clear();
    draw_distinct(rng, 0, inst.hospitals_high, highs, row);
    draw_distinct(rng, inst.first_low_hospital(), inst.hospitals_low, lows, row);
    lists.push(row);
  }
  return lists;
}

ListSet full_lists(const FiniteInstance& inst) {
  std::mt19937_64 rng(splitmix64(inst.seed ^ 0xF0111157ULL));
  ListSet lists(inst.doctors());
  std::vector<int> high(inst.hospitals_high), low(inst.hospitals_low);
  std::iota(high.begin(), high.end(), 0);
  std::iota(low.begin(), low.end(), inst.first_low_hospital());
  std::vector<int> row;
  for (int d = 0; d < inst.doctors(); ++d) {
    std::shuffle(high.begin(), high.end(), rng);
    std::shuffle(low.begin(), low.end(), rng);
    row.assign(high.begin(), high.end());
    row.insert(row.end(), low.begin(), low.end());
    lists.push(row);
  }
  return lists;
}

std::uint64_t HospitalRanking::score(int hospital, int doctor) const {
  const auto h = static_cast<std::uint64_t>(static_cast<std::uint32_t>(hospital));
  const auto d = static_cast<std::uint64_t>(static_cast<std::uint32_t>(doctor));
  return splitmix64(seed_ ^ splitmix64((h << 32) | d));
}

bool HospitalRanking::prefers(int hospital, int a, int b) const {
  const bool a_high = a < doctors_high_;
  const bool b_high = b < doctors_high_;
  if (a_high != b_high) return a_high;
  const auto sa = score(hospital, a);
  const auto sb = score(hospital, b);
  if (sa != sb) return sa > sb;
  return a < b;
}

namespace {

struct DaState {
  Matching matching;
  std::vector<int> next;  // index of each doctor's next proposal
};

DaState empty_state(const FiniteInstance& inst) {
  DaState st;
  st.matching.hospital_of.assign(inst.doctors(), kUnmatched);
  st.matching.doctor_of.assign(inst.hospitals(), kUnmatched);
  st.next.assign(inst.doctors(), 0);
  return st;
}

// Runs proposals until every doctor in `free_doctors` (and everyone they
// displace) is matched or out of list entries. The doctor-optimal stable
// matching does not depend on proposal order, so a settled state can be
// resumed after adding a doctor.
void settle(const ListSet& lists, const HospitalRanking& rank, DaState& st,
            std::deque<int>& free_doctors) {
  Matching& m = st.matching;
  while (!free_doctors.empty()) {
    const int d = free_doctors.front();
    free_doctors.pop_front();
    const auto list = lists.of(d);
    while (st.next[d] < static_cast<int>(list.size())) {
      const int h = list[st.next[d]++];
      const int holder = m.doctor_of[h];
      if (holder != kUnmatched && !rank.prefers(h, d, holder)) continue;
      m.doctor_of[h] = d;
      m.hospital_of[d] = h;
      if (holder != kUnmatched) {
        m.hospital_of[holder] = kUnmatched;
        free_doctors.push_back(holder);
      }
      break;
    }
  }
}

}  // namespace

Matching run_da(const FiniteInstance& inst, const ListSet& lists,
                ProposalOrder order) {
  const HospitalRanking rank(inst.seed, inst.doctors_high);
  DaState st = empty_state(inst);
  std::deque<int> free_doctors(inst.doctors());
  std::iota(free_doctors.begin(), free_doctors.end(), 0);
  if (order == ProposalOrder::Reverse) {
    std::reverse(free_doctors.begin(), free_doctors.end());
  }
  settle(lists, rank, st, free_doctors);
  return std::move(st.matching);
}

std::optional<std::pair<int, int>> find_blocking_pair(const FiniteInstance& inst,
                                                      const ListSet& lists,
                                                      const Matching& m) {
  const HospitalRanking rank(inst.seed, inst.doctors_high);
  for (int d = 0; d < inst.doctors(); ++d) {
    for (int h : lists.of(d)) {
      if (h == m.hospital_of[d]) break;
      const int holder = m.doctor_of[h];
      if (holder == kUnmatched || rank.prefers(h, d, holder)) {
        return std::pair{d, h};
      }
    }
  }
  return std::nullopt;
}

MatchCounts count_matches(const FiniteInstance& inst, const Matching& m) {
  MatchCounts c;
  for (int d = 0; d < inst.doctors(); ++d) {
    const int h = m.hospital_of[d];
    if (h == kUnmatched) continue;
    const bool dh = inst.doctor_is_high(d);
    const bool hh = inst.hospital_is_high(h);
    if (dh && hh) ++c.hh;
    else if (dh) ++c.hl;
    else if (hh) ++c.lh;
    else ++c.ll;
  }
  return c;
}

Estimate summarize(std::span<const double> xs) {
  Estimate e;
  if (xs.empty()) return e;
  const double n = static_cast<double>(xs.size());
  e.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  if (xs.size() < 2) return e;
  double ss = 0.0;
  for (double x : xs) ss += (x - e.mean) * (x - e.mean);
  e.std_error = std::sqrt(ss / (n - 1.0) / n);
  return e;
}

std::uint64_t trial_seed(std::uint64_t master, std::uint64_t index) {
  return splitmix64(master ^ splitmix64(index + 1));
}

namespace {

struct TrialResult {
  MatchCounts counts;
};

TrialResult run_trial(const FiniteInstance& base, std::uint64_t seed) {
  FiniteInstance inst = base;
  inst.seed = seed;
  const ListSet lists = sample_lists(inst);
  return {count_matches(inst, run_da(inst, lists))};
}

SimReport reduce(const FiniteInstance& inst, std::span<const TrialResult> results) {
  const double nd = inst.doctors();
  const std::size_t t = results.size();
  std::vector<double> hh(t), hl(t), lh(t), ll(t), w(t), rate_h(t), rate_l(t);
  for (std::size_t i = 0; i < t; ++i) {
    const MatchCounts& c = results[i].counts;
    hh[i] = c.hh / nd;
    hl[i] = c.hl / nd;
    lh[i] = c.lh / nd;
    ll[i] = c.ll / nd;
    const MatchMasses masses{hh[i], hl[i], lh[i], ll[i]};
    const double v = inst.high_value;
    w[i] = 2.0 * v * masses.hh + (v + 1.0) * (masses.hl + masses.lh) + 2.0 * masses.ll;
    rate_h[i] = inst.doctors_high > 0 ? double(c.hh + c.hl) / inst.doctors_high : 0.0;
    rate_l[i] = inst.doctors_low > 0 ? double(c.lh + c.ll) / inst.doctors_low : 0.0;
  }
  SimReport r;
  r.trials = static_cast<int>(t);
  r.doctors = inst.doctors();
  r.hh = summarize(hh);
  r.hl = summarize(hl);
  r.lh = summarize(lh);
  r.ll = summarize(ll);
  r.welfare = summarize(w);
  r.match_rate_high = summarize(rate_h);
  r.match_rate_low = summarize(rate_l);
  return r;
}

void check_options(const SimOptions& o) {
  if (o.size < 1) throw InvalidConfig("market size must be positive");
  if (o.trials < 1) throw InvalidConfig("trial count must be positive");
}

}  // namespace

SimReport estimate_serial(const MarketConfig& config, const Strategy& high,
                          const Strategy& low, const SimOptions& options) {
  check_options(options);
  const FiniteInstance inst =
      FiniteInstance::scaled(config, high, low, options.size, options.seed);
  std::vector<TrialResult> results(options.trials);
  for (int t = 0; t < options.trials; ++t) {
    results[t] = run_trial(inst, trial_seed(options.seed, t));
  }
  return reduce(inst, results);
}

SimReport estimate(const MarketConfig& config, const Strategy& high,
                   const Strategy& low, const SimOptions& options) {
  check_options(options);
  const FiniteInstance inst =
      FiniteInstance::scaled(config, high, low, options.size, options.seed);
  require_lists_fit(inst);
  std::vector<TrialResult> results(options.trials);
#pragma omp parallel for schedule(dynamic, 4)
  for (int t = 0; t < options.trials; ++t) {
    results[t] = run_trial(inst, trial_seed(options.seed, t));
  }
  return reduce(inst, results);
}

namespace {

// Payoffs of the probe doctor for j = 0..K high applications in one trial.
std::vector<double> probe_trial(const FiniteInstance& base, std::uint64_t seed,
                                int probe) {
  FiniteInstance inst = base;
  inst.seed = seed;
  ListSet lists = sample_lists(inst);
  const int K = inst.list_length;

  std::mt19937_64 rng(splitmix64(seed ^ 0x9B0BEULL ^ static_cast<std::uint64_t>(probe)));
  std::vector<int> highs, lows;
  draw_distinct(rng, 0, inst.hospitals_high, K, highs);
  draw_distinct(rng, inst.first_low_hospital(), inst.hospitals_low, K, lows);

  // Settle the market without the probe, then let each variant of the probe
  // list resolve its own chain of rejections from that state.
  const HospitalRanking rank(inst.seed, inst.doctors_high);
  lists.assign(probe, {});
  DaState without = empty_state(inst);
  std::deque<int> queue(inst.doctors());
  std::iota(queue.begin(), queue.end(), 0);
  settle(lists, rank, without, queue);

  std::vector<double> payoff(K + 1);
  std::vector<int> row;
  for (int j = 0; j <= K; ++j) {
    row.assign(highs.begin(), highs.begin() + j);
    row.insert(row.end(), lows.begin(), lows.begin() + (K - j));
    lists.assign(probe, row);
    DaState st = without;
    st.next[probe] = 0;
    queue.assign(1, probe);
    settle(lists, rank, st, queue);
    const int h = st.matching.hospital_of[probe];
    payoff[j] = h == kUnmatched ? 0.0 : inst.hospital_is_high(h) ? inst.high_value : 1.0;
  }
  return payoff;
}

ProbeTier summarize_probe(const std::vector<std::vector<double>>& samples,
                          const Strategy& played, int K) {
  ProbeTier tier;
  const std::size_t t = samples.size();
  std::vector<double> column(t);
  for (int j = 0; j <= K; ++j) {
    for (std::size_t i = 0; i < t; ++i) column[i] = samples[i][j];
    tier.payoff.push_back(summarize(column));
  }
  for (int j = 1; j <= K; ++j) {
    if (tier.payoff[j].mean > tier.payoff[tier.argmax].mean) tier.argmax = j;
  }
  const int lo = played.base();
  const int hi = std::min(lo + 1, K);
  tier.reference = tier.payoff[hi].mean > tier.payoff[lo].mean ? hi : lo;
  for (int j = 0; j <= K; ++j) {
    for (std::size_t i = 0; i < t; ++i) {
      column[i] = samples[i][j] - samples[i][tier.reference];
    }
    const Estimate adv = summarize(column);
    tier.advantage.push_back(adv);
    if (adv.mean > 2.0 * adv.std_error && adv.mean > 0.0) tier.consistent = false;
  }
  return tier;
}

}  // namespace

ProbeReport best_response_probe(const MarketConfig& config, const Strategy& high,
                                const Strategy& low, const SimOptions& options) {
  check_options(options);
  const FiniteInstance inst =
      FiniteInstance::scaled(config, high, low, options.size, options.seed);
  const int K = inst.list_length;
  require_room(inst, K, K);
  require_lists_fit(inst);

  ProbeReport report;
  const std::pair<int, const Strategy*> tiers[2] = {{0, &high},
                                                    {inst.first_low_doctor(), &low}};
  for (int tier = 0; tier < 2; ++tier) {
    const int probe = tiers[tier].first;
    ProbeTier& out = tier == 0 ? report.high : report.low;
    if (probe >= inst.doctors() || inst.doctor_is_high(probe) != (tier == 0)) {
      continue;  // empty doctor tier
    }
    std::vector<std::vector<double>> samples(options.trials);
    const std::uint64_t tier_seed = trial_seed(options.seed, 1000003ULL * (tier + 1));
#pragma omp parallel for schedule(dynamic, 8)
    for (int t = 0; t < options.trials; ++t) {
      samples[t] = probe_trial(inst, trial_seed(tier_seed, t), probe);
    }
    out = summarize_probe(samples, *tiers[tier].second, K);
  }
  return report;
}

}  // namespace shortlist
