#include <doctest.h>

#include <cmath>
#include <limits>

#include "shortlist/market.hpp"

using namespace shortlist;

TEST_CASE("match_prob examples") {
  CHECK(match_prob(1.0, 2.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(match_prob(0.5, 2.0) == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(match_prob(0.5, 1.5) == doctest::Approx(0.625).epsilon(1e-15));
  CHECK(match_prob(0.3, 0.0) == 0.0);
  CHECK(match_prob(0.0, 4.0) == 0.0);
}

TEST_CASE("match_prob rejects out-of-range inputs") {
  CHECK_THROWS_AS(match_prob(-0.1, 1.0), std::domain_error);
  CHECK_THROWS_AS(match_prob(1.1, 1.0), std::domain_error);
  CHECK_THROWS_AS(match_prob(0.5, -1.0), std::domain_error);
  CHECK_THROWS_AS(match_prob(std::nan(""), 1.0), std::domain_error);
}

TEST_CASE("expected_apps examples and small-p limit") {
  CHECK(expected_apps(1.0, 3.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(expected_apps(0.5, 2.0) == doctest::Approx(1.5).epsilon(1e-15));
  CHECK(expected_apps(1e-12, 2.0) == doctest::Approx(2.0).epsilon(1e-11));
  CHECK(expected_apps(0.0, 5) == 5.0);
  // Continuity across the series threshold.
  const double below = expected_apps(0.99e-8, 7);
  const double above = expected_apps(1.01e-8, 7);
  CHECK(std::abs(below - above) < 1e-8);
}

TEST_CASE("match_prob and expected_apps are monotone") {
  for (double X = 0.0; X <= 6.0; X += 0.25) {
    double prev = -1.0;
    for (double p = 0.0; p <= 1.0; p += 0.01) {
      const double m = match_prob(p, X);
      CHECK(m >= prev - 1e-15);
      prev = m;
    }
  }
  for (double p = 0.01; p <= 1.0; p += 0.07) {
    double prev_m = -1.0, prev_a = -1.0;
    for (double X = 0.0; X <= 8.0; X += 0.125) {
      const double m = match_prob(p, X);
      const double a = expected_apps(p, X);
      CHECK(m >= prev_m - 1e-15);
      CHECK(a >= prev_a - 1e-15);
      prev_m = m;
      prev_a = a;
    }
  }
}

TEST_CASE("utility boundary values") {
  const double v = 2.5;
  const int K = 4;
  const double p = 0.37, q = 0.81;
  CHECK(utility(K, p, q, v, K) ==
        doctest::Approx(v * (1.0 - std::pow(1.0 - p, K))).epsilon(1e-15));
  CHECK(utility(0, p, q, v, K) ==
        doctest::Approx(1.0 - std::pow(1.0 - q, K)).epsilon(1e-15));
  CHECK(utility(1, 1.0, q, 2.0, K) == doctest::Approx(2.0));
  // A single low application always succeeds when p_low = 1.
  CHECK(utility(2, p, 1.0, v, K) ==
        doctest::Approx(v * (1.0 - std::pow(1.0 - p, 2)) + std::pow(1.0 - p, 2)));
}

TEST_CASE("utility matches the closed form in (1-p)/(1-p')") {
  const double v = 3.0, p = 0.2, q = 0.6;
  const int K = 6;
  for (int y = 0; y <= K; ++y) {
    const double closed = v - (v - 1.0) * std::pow(1.0 - p, y) -
                          std::pow(1.0 - q, K) * std::pow((1.0 - p) / (1.0 - q), y);
    CHECK(utility(y, p, q, v, K) == doctest::Approx(closed).epsilon(1e-13));
  }
}

TEST_CASE("utility is strictly concave when 0 < p < p' < 1") {
  for (double v : {1.001, 1.5, 3.0, 10.0}) {
    for (int K : {2, 5, 10}) {
      for (double p = 0.05; p < 0.95; p += 0.1) {
        for (double q = p + 0.02; q < 0.999; q += 0.1) {
          for (int y = 1; y < K; ++y) {
            const double second = utility(y + 1, p, q, v, K) -
                                  2.0 * utility(y, p, q, v, K) +
                                  utility(y - 1, p, q, v, K);
            CHECK(second < 0.0);
          }
        }
      }
    }
  }
}

TEST_CASE("kernels stay finite at boundary probabilities") {
  for (double p : {0.0, 1e-300, 1e-9, 1.0 - 1e-16, 1.0}) {
    for (double X : {0.0, 0.5, 1.0, 7.25}) {
      CHECK(std::isfinite(match_prob(p, X)));
      CHECK(std::isfinite(expected_apps(p, X)));
    }
    for (double q : {0.0, 1.0}) {
      for (int y = 0; y <= 3; ++y) CHECK(std::isfinite(utility(y, p, q, 2.0, 3)));
    }
  }
}

TEST_CASE("Strategy decomposition") {
  const Strategy mixed(2.25);
  CHECK(mixed.base() == 2);
  CHECK(mixed.mix() == doctest::Approx(0.25));
  CHECK_FALSE(mixed.is_pure());
  const Strategy pure(3.0);
  CHECK(pure.is_pure());
  CHECK(pure.base() == 3);
  CHECK_THROWS_AS(Strategy(-0.5), std::domain_error);
  CHECK_THROWS_AS(Strategy(std::numeric_limits<double>::infinity()),
                  std::domain_error);

  const auto shares = high_slot_shares(0.4, mixed);
  CHECK(shares[0].mass == doctest::Approx(0.3));
  CHECK(shares[0].slots == 2);
  CHECK(shares[1].mass == doctest::Approx(0.1));
  CHECK(shares[1].slots == 3);
}

TEST_CASE("MarketConfig validation") {
  CHECK_NOTHROW(MarketConfig::balanced(2.0, 3, 0.3).validate());
  CHECK_THROWS_WITH_AS(MarketConfig::balanced(0.9, 1, 0.5).validate(),
                       "v must exceed 1", InvalidConfig);
  CHECK_THROWS_AS(MarketConfig::balanced(1.0, 1, 0.5).validate(), InvalidConfig);
  CHECK_THROWS_AS(MarketConfig::balanced(2.0, 0, 0.5).validate(), InvalidConfig);

  MarketConfig c = MarketConfig::balanced(2.0, 2, 0.5);
  c.doctors_low = 0.6;
  CHECK_THROWS_AS(c.validate(), InvalidConfig);
  c = MarketConfig::balanced(2.0, 2, 0.5);
  c.hospitals_low = -0.1;
  CHECK_THROWS_AS(c.validate(), InvalidConfig);
  c.hospitals_low = 0.0;
  c.hospitals_high = 0.0;
  CHECK_THROWS_AS(c.validate(), InvalidConfig);

  const MarketConfig b = MarketConfig::balanced(3.0, 2, 0.25);
  CHECK(b.ratio() == doctest::Approx(3.0));
  CHECK(b.is_balanced());
  CHECK(b.with_list_length(5).list_length == 5);
}
