// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <numeric>

#include "grid_rng.hpp"
#include "parallel.hpp"

using namespace sigmalab;

TEST_CASE("philox4x32-10 known answers") {
  // Random123 kat_vectors.
  CHECK(philox4x32({0, 0, 0, 0}, {0, 0}) == std::array<std::uint32_t, 4>{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
  CHECK(philox4x32({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}) ==
        std::array<std::uint32_t, 4>{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
  CHECK(philox4x32({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}) ==
        std::array<std::uint32_t, 4>{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("draws are pure functions of seed and counter") {
  const CounterRng a(PathSeed{7, 3, stream::driver});
  const CounterRng b(PathSeed{7, 3, stream::driver});
  const CounterRng other_path(PathSeed{7, 4, stream::driver});
  const CounterRng other_tag(PathSeed{7, 3, stream::bridge_max});
  for (std::uint64_t c : {0ULL, 1ULL, 999ULL, 1ULL << 40}) {
    CHECK(a.uniform(c) == b.uniform(c));
    CHECK(a.normal(c) == b.normal(c));
    CHECK(a.uniform(c) != other_path.uniform(c));
    CHECK(a.uniform(c) != other_tag.uniform(c));
    CHECK(a.uniform(c) > 0.0);
    CHECK(a.uniform(c) < 1.0);
  }
  const auto pair = a.normal_pair(5);
  CHECK(a.normal(10) == pair[0]);
  CHECK(a.normal(11) == pair[1]);
}

TEST_CASE("increments: mean zero, variance dt, order and thread independent") {
  const TimeGrid grid(1e-3, 200000);
  const auto inc = gaussian_increments(PathSeed{11, 0, stream::driver}, grid);
  REQUIRE(inc.size() == 200000);
  const double mean = std::accumulate(inc.begin(), inc.end(), 0.0) / inc.size();
  double var = 0.0;
  for (double v : inc) var += (v - mean) * (v - mean);
  var /= inc.size() - 1;
  CHECK(std::fabs(mean) < 4.0 * std::sqrt(1e-3 / inc.size()));
  CHECK(var == doctest::Approx(1e-3).epsilon(0.02));

  const TimeGrid small(1e-2, 50);
  const auto serial = parallel_map(64, 1, [&](std::size_t i) { return gaussian_increments({5, i, 1}, small); });
  const auto threaded = parallel_map(64, 4, [&](std::size_t i) { return gaussian_increments({5, i, 1}, small); });
  CHECK(serial == threaded);
}

TEST_CASE("cumulate and grid helpers") {
  const std::vector<double> g{1.0, 2.0, -0.5};
  CHECK(cumulate(g) == std::vector<double>{0.0, 1.0, 3.0, 2.5});
  const auto grid = TimeGrid::covering(1e-3, 1.0);
  CHECK(grid.n_steps() == 1000);
  CHECK(grid.n_points() == 1001);
  CHECK(grid.index_at(0.5) == 500);
  CHECK_THROWS(TimeGrid(0.0, 10));
}
