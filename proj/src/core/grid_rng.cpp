// SPDX-License-Identifier: Apache-2.0
#include "grid_rng.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace sigmalab {

TimeGrid::TimeGrid(double dt, std::int64_t n_steps) : dt_(dt), n_steps_(n_steps) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("TimeGrid: dt must be positive");
  if (n_steps < 1) throw std::invalid_argument("TimeGrid: n_steps must be >= 1");
}

TimeGrid TimeGrid::covering(double dt, double t_max) {
  if (!(t_max > 0.0)) throw std::invalid_argument("TimeGrid: t_max must be positive");
  return TimeGrid(dt, static_cast<std::int64_t>(std::llround(t_max / dt)));
}

std::int64_t TimeGrid::index_at(double t) const noexcept {
  if (t <= 0.0) return 0;
  // Tolerate representation error so that index_at(time(k)) == k.
  auto k = static_cast<std::int64_t>(std::floor(t / dt_ + 1e-9));
  return k > n_steps_ ? n_steps_ : k;
}

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& lo, std::uint32_t& hi) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  lo = static_cast<std::uint32_t>(p);
  hi = static_cast<std::uint32_t>(p >> 32);
}

inline double to_open_unit(std::uint32_t hi, std::uint32_t lo) {
  const std::uint64_t bits = (static_cast<std::uint64_t>(hi) << 32) | lo;
  return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                        std::array<std::uint32_t, 2> key) noexcept {
  for (int round = 0; round < 10; ++round) {
    std::uint32_t lo0, hi0, lo1, hi1;
    mulhilo(kPhiloxM0, ctr[0], lo0, hi0);
    mulhilo(kPhiloxM1, ctr[2], lo1, hi1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kPhiloxW0;
    key[1] += kPhiloxW1;
  }
  return ctr;
}

CounterRng::CounterRng(PathSeed seed)
    : seed_(seed),
      key_{static_cast<std::uint32_t>(seed.global_seed),
           static_cast<std::uint32_t>(seed.global_seed >> 32)} {
  if (seed.path_index > 0xFFFFFFFFull) throw std::invalid_argument("CounterRng: path_index exceeds 32 bits");
}

std::array<std::uint32_t, 4> CounterRng::block(std::uint64_t counter) const noexcept {
  return philox4x32({static_cast<std::uint32_t>(counter), static_cast<std::uint32_t>(counter >> 32),
                     static_cast<std::uint32_t>(seed_.path_index), seed_.stream_tag},
                    key_);
}

double CounterRng::uniform(std::uint64_t counter) const noexcept {
  const auto b = block(counter);
  return to_open_unit(b[0], b[1]);
}

std::array<double, 2> CounterRng::normal_pair(std::uint64_t blk) const noexcept {
  const auto b = block(blk);
  const double u1 = to_open_unit(b[0], b[1]);
  const double u2 = to_open_unit(b[2], b[3]);
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  return {r * std::cos(theta), r * std::sin(theta)};
}

double CounterRng::normal(std::uint64_t counter) const noexcept {
  return normal_pair(counter >> 1)[counter & 1u];
}

std::vector<double> gaussian_increments(const PathSeed& seed, const TimeGrid& grid) {
  const CounterRng rng(seed);
  const double sd = std::sqrt(grid.dt());
  const auto n = static_cast<std::size_t>(grid.n_steps());
  std::vector<double> out(n);
  for (std::size_t j = 0; j < n; j += 2) {
    const auto pair = rng.normal_pair(j >> 1);
    out[j] = sd * pair[0];
    if (j + 1 < n) out[j + 1] = sd * pair[1];
  }
  return out;
}

std::vector<double> cumulate(std::span<const double> increments) {
  if (increments.empty()) throw std::invalid_argument("cumulate: empty increment sequence");
  std::vector<double> path(increments.size() + 1);
  path[0] = 0.0;
  for (std::size_t j = 0; j < increments.size(); ++j) path[j + 1] = path[j] + increments[j];
  return path;
}

}  // namespace sigmalab
