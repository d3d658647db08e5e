// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "grid_rng.hpp"
#include "mc_stats.hpp"

using namespace sigmalab;
using namespace sigmalab::stats;

TEST_CASE("weighted mean and SE against the textbook formula") {
  const std::vector<double> v{1, 2, 3, 4};
  const std::vector<double> one(4, 1.0);
  const auto m = weighted_mean_se(v, one);
  CHECK(m.mean == doctest::Approx(2.5));
  CHECK(m.se == doctest::Approx(std::sqrt(5.0) / 4.0));
  const std::vector<double> w{1, 1, 2, 0};
  CHECK(weighted_mean_se(v, w).mean == doctest::Approx((1 + 2 + 6) / 4.0));
  const std::vector<double> zero(4, 0.0);
  CHECK_THROWS(weighted_mean_se(v, zero));
  const auto d = weighted_paired_difference(v, v, one);
  CHECK(d.mean == 0.0);
  CHECK(d.se == 0.0);
}

TEST_CASE("weighted tail and KS") {
  const std::vector<double> v{0.1, 0.2, 0.3, 0.4};
  const std::vector<double> w{1, 1, 1, 1};
  const std::vector<double> grid{0.0, 0.25, 0.4};
  CHECK(weighted_tail(v, w, grid) == std::vector<double>{1.0, 0.5, 0.0});
  // uniform cdf on [0, 0.5]: sup gap at the sample points
  CHECK(ks_weighted(v, w, [](double x) { return std::clamp(2.0 * x, 0.0, 1.0); }) == doctest::Approx(0.2));
  const CounterRng u(PathSeed{1, 0, stream::sample});
  std::vector<double> s(50000), ones(50000, 1.0);
  for (std::size_t i = 0; i < s.size(); ++i) s[i] = -std::log(u.uniform(i));
  CHECK(ks_weighted(s, ones, [](double x) { return 1.0 - std::exp(-x); }) < 0.01);
}

TEST_CASE("martingale increment test: null, constant and drift") {
  const CounterRng r(PathSeed{2, 0, stream::sample});
  const std::vector<std::pair<std::size_t, std::size_t>> pairs{{0, 1}, {1, 2}, {0, 2}};
  std::vector<std::vector<double>> bm, flat, drift;
  for (std::uint64_t i = 0; i < 20000; ++i) {
    const double b1 = r.normal(2 * i), b2 = b1 + r.normal(2 * i + 1);
    bm.push_back({0.0, b1, b2});
    flat.push_back({1.0, 1.0, 1.0});
    drift.push_back({0.0, b1 + 0.1, b2 + 0.2});
  }
  const std::vector<double> w(20000, 1.0);
  CHECK(martingale_increment_test(bm, w, pairs).pass);
  CHECK(martingale_increment_test(flat, w, pairs).pass);
  CHECK_FALSE(martingale_increment_test(drift, w, pairs).pass);
  const std::vector<std::pair<std::size_t, std::size_t>> one_pair{{0, 1}};
  CHECK_THROWS(martingale_increment_test(bm, w, one_pair));
}

TEST_CASE("report serialization") {
  IdentityReport r;
  r.id = "demo";
  r.checks.push_back({"a", 0.5, 0.5, 0.01, 0.04, "rule", true});
  r.checks.push_back({"b", 0.1, 0.0, 0.0, 0.02, "rule", false});
  r.finalize();
  CHECK_FALSE(r.pass);
  CHECK(csv_header() == "identity,estimate,target,se,pass\n");
  CHECK(csv_rows(r) == "demo/a,0.5,0.5,0.01,true\ndemo/b,0.1,0,0,false\n");
  const auto j = to_json(r);
  CHECK(j["identity"] == "demo");
  CHECK(j["checks"].size() == 2);
}
