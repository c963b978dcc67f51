#include <doctest.h>

#include <sstream>
#include <string>

#include "shortlist/sweep.hpp"

using namespace shortlist;

TEST_CASE("grid is the sorted cartesian product") {
  const std::vector<double> v{3.0, 1.5};
  const std::vector<int> k{2, 1};
  const std::vector<double> d{0.5, 0.1};
  const auto grid = make_grid(v, k, d);
  REQUIRE(grid.size() == 8);
  CHECK(grid.front().high_value == 1.5);
  CHECK(grid.front().list_length == 1);
  CHECK(grid.front().share_high == 0.1);
  CHECK(grid[1].share_high == 0.5);
  CHECK(grid.back().high_value == 3.0);
  CHECK(grid.back().list_length == 2);
  CHECK(make_grid(v, std::vector<int>{}, d).empty());
}

TEST_CASE("standard grid sizes") {
  CHECK(standard_values().size() == 23);
  CHECK(standard_values().front() == 1.001);
  CHECK(standard_values().back() == 10.0);
  CHECK(standard_shares().size() == 5);
  CHECK(standard_list_lengths().size() == 10);
}

TEST_CASE("parallel sweep equals the serial reference bit for bit") {
  const auto grid = make_grid(std::vector<double>{1.01, 1.5, 4.0, 9.5},
                              std::vector<int>{1, 3, 6}, standard_shares());
  const auto serial = sweep_serial(grid);
  const auto parallel = sweep(grid);
  REQUIRE(serial.size() == parallel.size());
  for (std::size_t i = 0; i < serial.size(); ++i) {
    CHECK(serial[i].ok == parallel[i].ok);
    CHECK(serial[i].x_high == parallel[i].x_high);
    CHECK(serial[i].x_low == parallel[i].x_low);
    CHECK(serial[i].welfare.w_nash == parallel[i].welfare.w_nash);
  }
  std::ostringstream a, b;
  write_sweep_csv(a, serial);
  write_sweep_csv(b, parallel);
  CHECK(a.str() == b.str());
}

TEST_CASE("single-point sweep matches a direct solve") {
  const GridPoint pt{10.0, 1, 0.5};
  const SweepRow row = solve_point(pt);
  const EquilibriumProfile prof = solve_market(pt.config());
  CHECK(row.ok);
  CHECK(row.x_high == prof.x_high().value());
  CHECK(row.x_low == prof.x_low().value());
  CHECK(row.welfare.w_nash == efficiency_report(prof).w_nash);
}

TEST_CASE("failed points become rows with a status") {
  const SweepRow row = solve_point(GridPoint{0.5, 1, 0.5});
  CHECK_FALSE(row.ok);
  CHECK(row.status == "v must exceed 1");
  std::ostringstream os;
  write_sweep_csv(os, std::vector<SweepRow>{row});
  CHECK(os.str().find("0.5,1,0.5,,,,,,,,v must exceed 1\n") != std::string::npos);
}

TEST_CASE("csv header and row layout") {
  std::ostringstream os;
  write_sweep_csv(os, std::vector<SweepRow>{solve_point(GridPoint{10.0, 1, 0.5})});
  const std::string out = os.str();
  CHECK(out.rfind("v,K,rho_high,x_high,x_low,w_simple,w_nash,ratio_simple,ratio_opt,"
                  "w_simple_lists,status\n",
                  0) == 0);
  CHECK(out.find("10,1,0.5,1.000000,1.000000,6.953") != std::string::npos);
  CHECK(out.find('\r') == std::string::npos);
}
