// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "grid_rng.hpp"
#include "sigma_processes.hpp"

using namespace sigmalab;
using namespace sigmalab::sigma;

namespace {
std::vector<double> brownian(std::uint64_t seed, std::uint64_t path, const TimeGrid& grid) {
  return cumulate(gaussian_increments(PathSeed{seed, path, stream::driver}, grid));
}
}  // namespace

TEST_CASE("reflection: exact decomposition, A carried by zeros") {
  const TimeGrid grid(1e-3, 2000);
  for (std::uint64_t p = 0; p < 20; ++p) {
    const auto n = brownian(3, p, grid);
    const auto s = reflect_from_driver(grid, n);
    for (std::size_t k = 0; k < n.size(); ++k) {
      CHECK(s.x[k] >= 0.0);
      CHECK(s.x[k] == s.m[k] + s.a[k]);
      if (k > 0) {
        CHECK(s.a[k] >= s.a[k - 1]);
        if (s.a[k] > s.a[k - 1]) CHECK(s.x[k] == 0.0);
      }
    }
    const auto rep = sigma_class_check(s, 0.0, 0.0);
    CHECK(rep.pass);
    CHECK(rep.offending_mass == 0.0);
    CHECK(rep.submartingale_form());
  }
}

TEST_CASE("drift moved off the zero set is flagged") {
  const TimeGrid grid(0.1, 4);
  SigmaPath s{grid, {0.0, 1.0, 2.0, 3.0, 4.0}, {0.0, 0.5, 1.0, 1.5, 2.0}, {0.0, 0.5, 1.0, 1.5, 2.0}};
  const auto rep = sigma_class_check(s, 0.0, 0.0);
  CHECK_FALSE(rep.pass);
  CHECK(rep.offending_mass == doctest::Approx(1.5));
}

TEST_CASE("bridge maximum: bounds and tail law") {
  CHECK(bridge_maximum(0.0, 1.0, 0.1, 0.5) >= 1.0);
  // P(max > m) = exp(-2 (m - a)(m - b) / h)
  const CounterRng u(PathSeed{1, 0, stream::sample});
  const double a = 0.0, b = 0.2, h = 0.5, m = 0.6;
  int above = 0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) above += bridge_maximum(a, b, h, u.uniform(i)) > m;
  const double p = std::exp(-2.0 * (m - a) * (m - b) / h);
  CHECK(std::fabs(above / double(n) - p) < 4.0 * std::sqrt(p * (1 - p) / n));
  CHECK(bridge_crossing_probability(1.0, 1.0, 0.0, 0.5) == doctest::Approx(std::exp(-2.0 * 1.0 * 1.0 / 0.5)));
}

TEST_CASE("bridge-max reflection matches the law of the running supremum") {
  // P(sup_{[0,1]} B > 1) = 2 P(B_1 > 1)
  const TimeGrid grid(0.02, 50);
  int above = 0;
  const int n = 40000;
  for (int i = 0; i < n; ++i) {
    const auto b = brownian(9, i, grid);
    const auto s = reflect_with_bridge_max(grid, b, CounterRng(PathSeed{9, std::uint64_t(i), stream::bridge_max}));
    above += s.a.back() > 1.0;
    if (i < 50) CHECK(sigma_class_check(s, 0.0, 0.0).additivity_defect == 0.0);
  }
  const double p = std::erfc(1.0 / std::sqrt(2.0));
  CHECK(std::fabs(above / double(n) - p) < 4.0 * std::sqrt(p * (1 - p) / n));
}

TEST_CASE("last zeros") {
  const std::vector<double> x{0.0, 1.0, 0.0, 2.0, -1.0, -2.0};
  CHECK(last_zero_before(x, 1, 0.0) == 0);
  CHECK(last_zero_before(x, 3, 0.0) == 2);
  const auto g = last_zero_indices(x, 0.0);
  CHECK(g[1] == 0);
  CHECK(g[3] == 2);
  CHECK(g[4] == 3);  // sign change across step 3 -> 4
  CHECK(g[5] == 3);
}

TEST_CASE("sign identity reconstructs X exactly") {
  const TimeGrid grid(1e-3, 1000);
  for (std::uint64_t p = 0; p < 50; ++p) {
    const SignedPath sp{grid, brownian(4, p, grid)};
    const auto sb = sign_balayage(sp);
    CHECK(sb.reconstruction == sp.x);
  }
}

TEST_CASE("balayage of a reflected path stays in the class") {
  const TimeGrid grid(1e-3, 1000);
  std::vector<double> kv(grid.n_points());
  for (std::size_t k = 0; k < kv.size(); ++k) kv[k] = 1.5 * std::sin(0.01 * k) + 0.2;
  for (std::uint64_t p = 0; p < 20; ++p) {
    const auto s = reflect_from_driver(grid, brownian(5, p, grid));
    const auto y = balayage(s, kv, 0.0, 2.0);
    const auto rep = sigma_class_check(y, 0.0, 0.0, {}, 1e-9);
    CHECK(rep.pass);
    CHECK(rep.offending_mass == 0.0);
    const auto plain = balayage(s.x, kv, 0.0, 2.0);
    CHECK(plain == y.x);
  }
  std::vector<double> big(grid.n_points(), 5.0);
  const auto s = reflect_from_driver(grid, brownian(5, 0, grid));
  CHECK_THROWS_AS(balayage(s, big, 0.0, 3.0), std::invalid_argument);
}

TEST_CASE("Tanaka local time: E L_t = sqrt(2 t / pi)") {
  const TimeGrid grid(1e-3, 1000);
  double sum = 0.0, sum2 = 0.0;
  const int n = 2000;
  for (int p = 0; p < n; ++p) {
    const SignedPath sp{grid, brownian(6, p, grid)};
    const double l = local_time_estimate(sp, 0.0).back();
    sum += l;
    sum2 += l * l;
  }
  const double mean = sum / n;
  const double se = std::sqrt((sum2 / n - mean * mean) / n);
  CHECK(std::fabs(mean - std::sqrt(2.0 / M_PI)) < 4.0 * se + 0.02);
}

TEST_CASE("stop_at_level freezes the path") {
  const TimeGrid grid(1e-3, 5000);
  const auto s = reflect_from_driver(grid, brownian(8, 0, grid));
  const auto st = stop_at_level(s, 0.3);
  REQUIRE(st.stop_index.has_value());
  const auto k = *st.stop_index;
  CHECK(s.x[k] >= 0.3);
  for (std::size_t j = 0; j < k; ++j) CHECK(s.x[j] < 0.3);
  for (std::size_t j = k; j < st.path.x.size(); ++j) {
    CHECK(st.path.x[j] == 0.3);
    CHECK(st.path.a[j] == s.a[k]);
  }
  const auto never = stop_at_level(s, 1e9);
  CHECK(never.truncated);
}
