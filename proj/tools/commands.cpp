#include "commands.hpp"

#include <omp.h>

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <json.hpp>
#include <limits>
#include <memory>
#include <ostream>
#include <string>
#include <vector>

#include "shortlist/equilibrium.hpp"
#include "shortlist/simulator.hpp"
#include "shortlist/sweep.hpp"
#include "shortlist/welfare.hpp"

namespace shortlist::cli {

namespace {

using json = nlohmann::ordered_json;

class BadInput : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

constexpr double kUnset = std::numeric_limits<double>::quiet_NaN();

struct MarketFlags {
  double v = kUnset;
  int k = 0;
  double rho_high = kUnset;
  double hospital_high = kUnset;
  double hospital_low = kUnset;
};

struct SimFlags {
  int n = 2000;
  int trials = 200;
  std::uint64_t seed = 1;
  std::string profile = "equilibrium";
  double x_high = kUnset;
  double x_low = kUnset;
};

void add_market_options(CLI::App* cmd, MarketFlags& f) {
  cmd->add_option("--v", f.v, "Value of a high-tier match (low tier is 1)")->required();
  cmd->add_option("--k", f.k, "List length K")->required();
  cmd->add_option("--rho-high", f.rho_high, "Share of doctors in the high tier")
      ->required();
  cmd->add_option("--hospital-high", f.hospital_high,
                  "High hospital mass (default: high doctor share)");
  cmd->add_option("--hospital-low", f.hospital_low,
                  "Low hospital mass (default: low doctor share)");
}

void add_sim_options(CLI::App* cmd, SimFlags& f) {
  cmd->add_option("--n", f.n, "Market size; tier counts are mass times n");
  cmd->add_option("--trials", f.trials, "Number of independent trials");
  cmd->add_option("--seed", f.seed, "Master seed");
  cmd->add_option("--profile", f.profile, "Strategy profile to simulate")
      ->check(CLI::IsMember({"equilibrium", "simple"}));
  cmd->add_option("--x-high", f.x_high, "Override the high-tier strategy");
  cmd->add_option("--x-low", f.x_low, "Override the low-tier strategy");
}

// Reads key=value files whose bare keys belong to whichever subcommand was
// invoked, so `solve --config f` can hold `v=10` rather than `solve.v=10`.
// Keys under an explicit [section] keep their section.
class SubcommandConfig : public CLI::ConfigINI {
 public:
  explicit SubcommandConfig(const CLI::App& root) : root_(root) {}

  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    std::vector<CLI::ConfigItem> items = CLI::ConfigINI::from_config(input);
    const auto active = root_.get_subcommands();
    if (active.empty()) return items;
    for (CLI::ConfigItem& item : items) {
      if (item.parents.empty()) item.parents.push_back(active.front()->get_name());
    }
    return items;
  }

 private:
  const CLI::App& root_;
};

MarketConfig to_config(const MarketFlags& f) {
  if (!(f.rho_high >= 0.0 && f.rho_high <= 1.0)) {
    throw BadInput("rho-high must lie in [0, 1]");
  }
  MarketConfig c = MarketConfig::balanced(f.v, f.k, f.rho_high);
  if (!std::isnan(f.hospital_high)) c.hospitals_high = f.hospital_high;
  if (!std::isnan(f.hospital_low)) c.hospitals_low = f.hospital_low;
  c.validate();
  return c;
}

void emit(const std::string& path, std::ostream& out,
          const std::function<void(std::ostream&)>& write) {
  if (path.empty() || path == "-") {
    write(out);
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw BadInput("cannot open output file: " + path);
  write(file);
}

std::string fmt(const char* spec, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, x);
  return buf;
}

json config_json(const MarketConfig& c) {
  return {{"v", c.high_value},           {"K", c.list_length},
          {"d_high", c.doctors_high},    {"d_low", c.doctors_low},
          {"h_high", c.hospitals_high},  {"h_low", c.hospitals_low}};
}

json candidates_json(const TierEquilibrium& t) {
  json out = json::array();
  for (const auto& c : t.candidates) {
    if (c.stable) out.push_back(c.high_slots);
  }
  return out;
}

void warn_unbalanced(const MarketConfig& c, std::ostream& err) {
  if (!c.is_balanced()) {
    err << "warning: tiers are unbalanced; the simple benchmark assumes equal "
           "doctor and hospital masses per tier\n";
  }
}

// --- solve -----------------------------------------------------------------

int cmd_solve(const MarketFlags& flags, const std::string& out_path,
              std::ostream& out, std::ostream& err) {
  const MarketConfig c = to_config(flags);
  const EquilibriumProfile prof = solve_market(c);
  const WelfareReport w = efficiency_report(prof);
  const MatchMasses m = prof.masses();
  warn_unbalanced(c, err);

  json doc;
  doc["config"] = config_json(c);
  doc["x_high"] = prof.x_high().value();
  doc["x_low"] = prof.x_low().value();
  doc["kind_high"] = to_string(prof.kind_high());
  doc["kind_low"] = to_string(prof.kind_low());
  doc["p_high"] = prof.stage_high.p_high;
  doc["p_low"] = prof.stage_high.p_low;
  doc["q_high"] = prof.stage_low.p_high;
  doc["q_low"] = prof.stage_low.p_low;
  doc["alpha_high"] = prof.stage_high.free_high;
  doc["alpha_low"] = prof.stage_high.free_low;
  doc["masses"] = {{"hh", m.hh}, {"hl", m.hl}, {"lh", m.lh}, {"ll", m.ll}};
  doc["w_nash"] = w.w_nash;
  doc["w_simple"] = w.w_simple;
  doc["w_opt"] = w.w_opt;
  doc["w_simple_lists"] = w.w_simple_lists;
  doc["ratios"] = {{"nash_simple", w.ratio_nash_simple},
                   {"nash_opt", w.ratio_nash_opt}};
  doc["equilibria_high"] = candidates_json(prof.high);
  doc["equilibria_low"] = candidates_json(prof.low);

  emit(out_path, out, [&](std::ostream& os) { os << doc.dump(2) << '\n'; });
  err << "solve: x_high=" << fmt("%.6f", prof.x_high().value())
      << " x_low=" << fmt("%.6f", prof.x_low().value())
      << " w_nash=" << fmt("%.6f", w.w_nash) << '\n';
  return kExitOk;
}

// --- sweep -----------------------------------------------------------------

std::vector<int> parse_k_range(std::string s) {
  s.erase(std::remove_if(s.begin(), s.end(), [](unsigned char ch) { return std::isspace(ch); }),
          s.end());
  if (s.empty()) throw BadInput("empty k-range");
  auto to_int = [](const std::string& t) {
    std::size_t used = 0;
    int value = 0;
    try {
      value = std::stoi(t, &used);
    } catch (const std::exception&) {
      throw BadInput("malformed k-range: " + t);
    }
    if (used != t.size()) throw BadInput("malformed k-range: " + t);
    return value;
  };
  std::vector<int> out;
  for (const std::string sep : {"..", ":", "-"}) {
    const auto at = s.find(sep, 1);
    if (at == std::string::npos || s.find(',') != std::string::npos) continue;
    const int lo = to_int(s.substr(0, at));
    const int hi = to_int(s.substr(at + sep.size()));
    for (int k = lo; k <= hi; ++k) out.push_back(k);
    if (out.empty()) throw BadInput("empty k-range");
    return out;
  }
  std::size_t start = 0;
  while (start <= s.size()) {
    const auto comma = s.find(',', start);
    const std::string item = s.substr(start, comma == std::string::npos ? std::string::npos
                                                                        : comma - start);
    if (!item.empty()) out.push_back(to_int(item));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  if (out.empty()) throw BadInput("empty k-range");
  return out;
}

int cmd_sweep(const std::vector<double>& values, const std::string& k_range,
              const std::vector<double>& shares, const std::string& out_path,
              std::ostream& out, std::ostream& err) {
  const std::vector<int> ks = parse_k_range(k_range);
  if (values.empty()) throw BadInput("empty v-list");
  if (shares.empty()) throw BadInput("empty rho-list");
  for (double v : values) {
    if (!(v > 1.0)) throw BadInput("v must exceed 1");
  }
  for (int k : ks) {
    if (k < 1) throw BadInput("K must be at least 1");
  }
  for (double d : shares) {
    if (!(d >= 0.0 && d <= 1.0)) throw BadInput("rho-high must lie in [0, 1]");
  }
  const auto grid = make_grid(values, ks, shares);
  const auto rows = sweep(grid);
  const auto failed = std::count_if(rows.begin(), rows.end(),
                                    [](const SweepRow& r) { return !r.ok; });
  emit(out_path, out, [&](std::ostream& os) { write_sweep_csv(os, rows); });
  err << "sweep: " << rows.size() << " points, " << failed << " failed\n";
  return failed == static_cast<long>(rows.size()) ? kExitSolver : kExitOk;
}

// --- table2 / figure1 --------------------------------------------------------

struct CriticalPoint {
  double x_low;
  double ratio;
};

std::vector<CriticalPoint> critical_points() {
  std::vector<CriticalPoint> pts{{0.095, 1.0}};
  for (int i = 3; i <= 9; ++i) pts.push_back({i / 10.0, 10.0});
  for (int i = 1; i <= 9; ++i) pts.push_back({i / 10.0, 1000.0});
  return pts;
}

int cmd_table2(const std::string& out_path, std::ostream& out, std::ostream& err) {
  std::string csv = "x_low,r,v_critical,ratio_simple_nash\n";
  const auto pts = critical_points();
  for (const auto& pt : pts) {
    const double v = critical_value(pt.x_low, pt.ratio);
    const MarketConfig c = MarketConfig::balanced(v, 1, 1.0 / (1.0 + pt.ratio));
    const WelfareReport w = efficiency_report(c);
    csv += fmt("%.6g", pt.x_low) + "," + fmt("%.6g", pt.ratio) + "," +
           fmt("%.10g", v) + "," + fmt("%.10g", w.w_simple / w.w_nash) + "\n";
  }
  emit(out_path, out, [&](std::ostream& os) { os << csv; });
  err << "table2: " << pts.size() << " rows\n";
  return kExitOk;
}

int cmd_figure1(const std::string& out_path, std::ostream& out, std::ostream& err) {
  const double ratios[] = {9.0, 7.0 / 3.0, 1.0};
  std::string csv = "K,x_low_r9,x_low_r7_3,x_low_r1\n";
  for (int K = 1; K <= 7; ++K) {
    csv += std::to_string(K);
    for (double r : ratios) {
      const EquilibriumProfile p =
          solve_market(MarketConfig::balanced(1.5, K, 1.0 / (1.0 + r)));
      csv += "," + fmt("%.6f", p.x_low().value());
    }
    csv += "\n";
  }
  emit(out_path, out, [&](std::ostream& os) { os << csv; });
  err << "figure1: 7 rows\n";
  return kExitOk;
}

// --- simulate / verify -------------------------------------------------------

struct Profile {
  Strategy high;
  Strategy low;
};

Profile pick_profile(const MarketConfig& c, const SimFlags& f) {
  Profile p;
  if (f.profile == "simple") {
    p = {Strategy(c.list_length), Strategy(0.0)};
  } else {
    const EquilibriumProfile eq = solve_market(c);
    p = {eq.x_high(), eq.x_low()};
  }
  if (!std::isnan(f.x_high)) p.high = Strategy(f.x_high);
  if (!std::isnan(f.x_low)) p.low = Strategy(f.x_low);
  if (p.high.value() > c.list_length || p.low.value() > c.list_length) {
    throw BadInput("strategy exceeds the list length");
  }
  return p;
}

SimOptions sim_options(const SimFlags& f) {
  if (f.n < 1) throw BadInput("n must be positive");
  if (f.trials < 2) throw BadInput("trials must be at least 2");
  return {f.n, f.trials, f.seed};
}

json estimate_json(const Estimate& e) {
  return {{"mean", e.mean}, {"std_error", e.std_error}};
}

int cmd_simulate(const MarketFlags& mf, const SimFlags& sf, const std::string& out_path,
                 std::ostream& out, std::ostream& err) {
  const MarketConfig c = to_config(mf);
  const Profile p = pick_profile(c, sf);
  const SimReport r = estimate(c, p.high, p.low, sim_options(sf));
  json doc;
  doc["config"] = config_json(c);
  doc["x_high"] = p.high.value();
  doc["x_low"] = p.low.value();
  doc["n"] = sf.n;
  doc["trials"] = r.trials;
  doc["seed"] = sf.seed;
  doc["doctors"] = r.doctors;
  doc["hh"] = estimate_json(r.hh);
  doc["hl"] = estimate_json(r.hl);
  doc["lh"] = estimate_json(r.lh);
  doc["ll"] = estimate_json(r.ll);
  doc["welfare"] = estimate_json(r.welfare);
  doc["match_rate_high"] = estimate_json(r.match_rate_high);
  doc["match_rate_low"] = estimate_json(r.match_rate_low);
  emit(out_path, out, [&](std::ostream& os) { os << doc.dump(2) << '\n'; });
  err << "simulate: " << r.trials << " trials, welfare "
      << fmt("%.6f", r.welfare.mean) << " +- " << fmt("%.6f", r.welfare.std_error) << '\n';
  return kExitOk;
}

double z_score(double analytic, const Estimate& e) {
  const double gap = e.mean - analytic;
  if (e.std_error > 0.0) return gap / e.std_error;
  return std::abs(gap) < 1e-12 ? 0.0 : std::copysign(INFINITY, gap);
}

int cmd_verify(const MarketFlags& mf, const SimFlags& sf, const std::string& out_path,
               std::ostream& out, std::ostream& err) {
  const MarketConfig c = to_config(mf);
  const Profile p = pick_profile(c, sf);
  const MarketOutcome analytic = evaluate_profile(c, p.high, p.low);
  const MatchMasses m = analytic.masses();
  const SimReport r = estimate(c, p.high, p.low, sim_options(sf));

  auto rate = [](double matched, double mass) { return mass > 0.0 ? matched / mass : 0.0; };
  const struct {
    const char* name;
    double analytic;
    Estimate empirical;
  } rows[] = {
      {"hh", m.hh, r.hh},
      {"hl", m.hl, r.hl},
      {"lh", m.lh, r.lh},
      {"ll", m.ll, r.ll},
      {"welfare", welfare(m, c.high_value), r.welfare},
      {"match_rate_high", rate(m.hh + m.hl, c.doctors_high), r.match_rate_high},
      {"match_rate_low", rate(m.lh + m.ll, c.doctors_low), r.match_rate_low},
  };
  std::string table = "quantity,analytic,empirical,std_error,z\n";
  double worst = 0.0;
  for (const auto& row : rows) {
    const double z = z_score(row.analytic, row.empirical);
    worst = std::max(worst, std::abs(z));
    table += std::string(row.name) + "," + fmt("%.6f", row.analytic) + "," +
             fmt("%.6f", row.empirical.mean) + "," + fmt("%.6f", row.empirical.std_error) +
             "," + fmt("%.3f", z) + "\n";
  }
  emit(out_path, out, [&](std::ostream& os) { os << table; });
  const bool ok = worst <= 4.0;
  err << "verify: max |z| = " << fmt("%.3f", worst) << (ok ? " (ok)" : " (FAILED)") << '\n';
  return ok ? kExitOk : kExitVerifyFailed;
}

}  // namespace

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Equilibria, welfare and simulation for short-list matching markets"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "key=value file for the subcommand; flags take precedence");
  app.config_formatter(std::make_shared<SubcommandConfig>(app));
  app.allow_config_extras(CLI::config_extras_mode::error);

  int jobs = 0;
  app.add_option("--jobs", jobs, "Worker threads (default: all cores)")
      ->envname("MATCH_JOBS")
      ->check(CLI::PositiveNumber);

  std::function<int()> action;

  MarketFlags solve_flags;
  std::string solve_out;
  CLI::App* solve = app.add_subcommand("solve", "Solve one market and report JSON");
  add_market_options(solve, solve_flags);
  solve->add_option("--out", solve_out, "Output file (default: stdout)");
  solve->callback([&] { action = [&] { return cmd_solve(solve_flags, solve_out, out, err); }; });

  std::vector<double> v_list = standard_values();
  std::vector<double> rho_list = standard_shares();
  std::string k_range = "1-10";
  std::string sweep_out;
  CLI::App* sweep_cmd = app.add_subcommand("sweep", "Solve a grid and write CSV");
  sweep_cmd->add_option("--v-list", v_list, "Comma-separated v values")->delimiter(',');
  sweep_cmd->add_option("--k-range", k_range, "K values: lo-hi, lo..hi or a comma list");
  sweep_cmd->add_option("--rho-list", rho_list, "Comma-separated high-doctor shares")
      ->delimiter(',');
  sweep_cmd->add_option("--out", sweep_out, "Output file (default: stdout)");
  sweep_cmd->callback([&] {
    action = [&] { return cmd_sweep(v_list, k_range, rho_list, sweep_out, out, err); };
  });

  std::string table2_out;
  CLI::App* table2 = app.add_subcommand("table2", "Critical values and welfare ratios, K = 1");
  table2->add_option("--out", table2_out, "Output file (default: stdout)");
  table2->callback([&] { action = [&] { return cmd_table2(table2_out, out, err); }; });

  std::string figure1_out;
  CLI::App* figure1 =
      app.add_subcommand("figure1", "Low-tier strategy against K at v = 1.5");
  figure1->add_option("--out", figure1_out, "Output file (default: stdout)");
  figure1->callback([&] { action = [&] { return cmd_figure1(figure1_out, out, err); }; });

  MarketFlags sim_market;
  SimFlags sim_flags;
  std::string sim_out;
  CLI::App* simulate = app.add_subcommand("simulate", "Monte-Carlo estimate of a profile");
  add_market_options(simulate, sim_market);
  add_sim_options(simulate, sim_flags);
  simulate->add_option("--out", sim_out, "Output file (default: stdout)");
  simulate->callback([&] {
    action = [&] { return cmd_simulate(sim_market, sim_flags, sim_out, out, err); };
  });

  MarketFlags verify_market;
  SimFlags verify_flags;
  std::string verify_out;
  CLI::App* verify = app.add_subcommand("verify", "Compare analytic masses with simulation");
  add_market_options(verify, verify_market);
  add_sim_options(verify, verify_flags);
  verify->add_option("--out", verify_out, "Output file (default: stdout)");
  verify->callback([&] {
    action = [&] { return cmd_verify(verify_market, verify_flags, verify_out, out, err); };
  });

  for (CLI::App* sub : app.get_subcommands({})) {
    sub->footer("Also accepted: --config FILE (key=value lines naming the flags above), --jobs N");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == static_cast<int>(CLI::ExitCodes::Success)) {
      return app.exit(e, out, err);
    }
    err << "error: " << e.what() << '\n';
    return kExitBadInput;
  }
  if (jobs > 0) omp_set_num_threads(jobs);

  try {
    return action();
  } catch (const BadInput& e) {
    err << "error: " << e.what() << '\n';
    return kExitBadInput;
  } catch (const InvalidConfig& e) {
    err << "error: " << e.what() << '\n';
    return kExitBadInput;
  } catch (const SolverError& e) {
    err << "error: solver: " << e.what() << '\n';
    return kExitSolver;
  } catch (const std::domain_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitBadInput;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitSolver;
  }
}

}  // namespace shortlist::cli
