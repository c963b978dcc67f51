// Grid sweeps over (v, K, share of high doctors). Every grid point is an
// independent solve; `sweep` fans the points out with OpenMP, `sweep_serial`
// is the single-threaded reference kept for testing and benchmarking. Both
// return rows in grid order.

#ifndef SHORTLIST_SWEEP_HPP_
#define SHORTLIST_SWEEP_HPP_

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "shortlist/equilibrium.hpp"
#include "shortlist/welfare.hpp"

namespace shortlist {

struct GridPoint {
  double high_value = 2.0;
  int list_length = 1;
  double share_high = 0.5;

  MarketConfig config() const {
    return MarketConfig::balanced(high_value, list_length, share_high);
  }
};

struct SweepRow {
  GridPoint point;
  bool ok = false;
  std::string status = "ok";  // error message when !ok
  double x_high = 0.0;
  double x_low = 0.0;
  StrategyKind kind_high = StrategyKind::Pure;
  StrategyKind kind_low = StrategyKind::Pure;
  WelfareReport welfare;
};

// Cartesian product sorted by (v, K, share).
std::vector<GridPoint> make_grid(std::span<const double> values,
                                 std::span<const int> list_lengths,
                                 std::span<const double> shares);

// v = 1.001, 1.01, 1.05, 1.1, 1.25, 1.5, then 2.0 to 10.0 in steps of 0.5.
std::vector<double> standard_values();
std::vector<double> standard_shares();  // 0.1 .. 0.5
std::vector<int> standard_list_lengths();  // 1 .. 10

SweepRow solve_point(const GridPoint& point,
                     const TierSolveOptions& options = {});

std::vector<SweepRow> sweep_serial(std::span<const GridPoint> grid,
                                   const TierSolveOptions& options = {});
std::vector<SweepRow> sweep(std::span<const GridPoint> grid,
                            const TierSolveOptions& options = {});

// Header: v,K,rho_high,x_high,x_low,w_simple,w_nash,ratio_simple,ratio_opt,
// w_simple_lists,status
void write_sweep_csv(std::ostream& os, std::span<const SweepRow> rows);

}  // namespace shortlist

#endif  // SHORTLIST_SWEEP_HPP_
