#include "shortlist/sweep.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>
#include <tuple>

namespace shortlist {

std::vector<GridPoint> make_grid(std::span<const double> values,
                                 std::span<const int> list_lengths,
                                 std::span<const double> shares) {
  std::vector<GridPoint> grid;
  grid.reserve(values.size() * list_lengths.size() * shares.size());
  for (double v : values) {
    for (int k : list_lengths) {
      for (double s : shares) grid.push_back({v, k, s});
    }
  }
  std::sort(grid.begin(), grid.end(), [](const GridPoint& a, const GridPoint& b) {
    return std::tie(a.high_value, a.list_length, a.share_high) <
           std::tie(b.high_value, b.list_length, b.share_high);
  });
  return grid;
}

std::vector<double> standard_values() {
  std::vector<double> v = {1.001, 1.01, 1.05, 1.1, 1.25, 1.5};
  for (int i = 0; i <= 16; ++i) v.push_back(2.0 + 0.5 * i);
  return v;
}

std::vector<double> standard_shares() { return {0.1, 0.2, 0.3, 0.4, 0.5}; }

std::vector<int> standard_list_lengths() {
  return {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
}

SweepRow solve_point(const GridPoint& point, const TierSolveOptions& options) {
  SweepRow row;
  row.point = point;
  try {
    const EquilibriumProfile prof = solve_market(point.config(), options);
    row.x_high = prof.x_high().value();
    row.x_low = prof.x_low().value();
    row.kind_high = prof.kind_high();
    row.kind_low = prof.kind_low();
    row.welfare = efficiency_report(prof);
    row.ok = true;
  } catch (const std::exception& e) {
    row.ok = false;
    row.status = e.what();
  }
  return row;
}

std::vector<SweepRow> sweep_serial(std::span<const GridPoint> grid,
                                   const TierSolveOptions& options) {
  std::vector<SweepRow> rows;
  rows.reserve(grid.size());
  for (const auto& p : grid) rows.push_back(solve_point(p, options));
  return rows;
}

std::vector<SweepRow> sweep(std::span<const GridPoint> grid,
                            const TierSolveOptions& options) {
  std::vector<SweepRow> rows(grid.size());
  const long n = static_cast<long>(grid.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (long i = 0; i < n; ++i) rows[i] = solve_point(grid[i], options);
  return rows;
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c == '\n' ? ' ' : c;
  }
  return out + "\"";
}

}  // namespace

void write_sweep_csv(std::ostream& os, std::span<const SweepRow> rows) {
  os << "v,K,rho_high,x_high,x_low,w_simple,w_nash,ratio_simple,ratio_opt,"
        "w_simple_lists,status\n";
  char buf[512];
  for (const auto& r : rows) {
    if (r.ok) {
      const auto& w = r.welfare;
      std::snprintf(buf, sizeof buf,
                    "%.6g,%d,%.6g,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,",
                    r.point.high_value, r.point.list_length, r.point.share_high,
                    r.x_high, r.x_low, w.w_simple, w.w_nash, w.ratio_nash_simple,
                    w.ratio_nash_opt, w.w_simple_lists);
    } else {
      std::snprintf(buf, sizeof buf, "%.6g,%d,%.6g,,,,,,,,", r.point.high_value,
                    r.point.list_length, r.point.share_high);
    }
    os << buf << csv_field(r.status) << '\n';
  }
}

}  // namespace shortlist
