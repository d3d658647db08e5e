// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace sigmalab {

/// Uniform time grid t_k = k * dt, k = 0..n_steps.
class TimeGrid {
 public:
  TimeGrid(double dt, std::int64_t n_steps);

  /// Grid covering [0, t_max] with n_steps = round(t_max / dt).
  static TimeGrid covering(double dt, double t_max);

  double dt() const noexcept { return dt_; }
  std::int64_t n_steps() const noexcept { return n_steps_; }
  std::size_t n_points() const noexcept { return static_cast<std::size_t>(n_steps_) + 1; }
  double t_max() const noexcept { return dt_ * static_cast<double>(n_steps_); }
  double time(std::int64_t k) const noexcept { return dt_ * static_cast<double>(k); }

  /// Largest index k with t_k <= t (clamped to the grid).
  std::int64_t index_at(double t) const noexcept;

  bool operator==(const TimeGrid&) const = default;

 private:
  double dt_;
  std::int64_t n_steps_;
};

/// Stream tags. Every independent driver inside one path draws from its own tag.
namespace stream {
inline constexpr std::uint32_t driver = 1;
inline constexpr std::uint32_t bridge_max = 2;
inline constexpr std::uint32_t bridge_cross = 3;
inline constexpr std::uint32_t density = 4;
inline constexpr std::uint32_t refine_path = 5;
inline constexpr std::uint32_t refine_max = 6;
inline constexpr std::uint32_t refine_cross = 7;
inline constexpr std::uint32_t density_cross = 8;
inline constexpr std::uint32_t sample = 9;
inline constexpr std::uint32_t weights = 10;
/// Resampled density attempts use density + attempt * density_retry_stride.
inline constexpr std::uint32_t density_retry_stride = 256;
}  // namespace stream

struct PathSeed {
  std::uint64_t global_seed = 0;
  std::uint64_t path_index = 0;
  std::uint32_t stream_tag = stream::driver;

  PathSeed with_tag(std::uint32_t tag) const noexcept { return {global_seed, path_index, tag}; }
};

/// Philox4x32-10 block function.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key) noexcept;

/// Stateless generator: every draw is a pure function of (seed, counter).
///
/// The 128-bit Philox counter is (counter lo, counter hi, path_index, stream_tag),
/// the key is the global seed, so path indices are limited to 32 bits.
class CounterRng {
 public:
  explicit CounterRng(PathSeed seed);

  const PathSeed& seed() const noexcept { return seed_; }

  /// Uniform on the open interval (0, 1) with 53 bits of resolution.
  double uniform(std::uint64_t counter) const noexcept;

  /// Standard normal draw. Consecutive even/odd counters share one Box-Muller block.
  double normal(std::uint64_t counter) const noexcept;

  /// Both normals of Box-Muller block `block`.
  std::array<double, 2> normal_pair(std::uint64_t block) const noexcept;

 private:
  std::array<std::uint32_t, 4> block(std::uint64_t counter) const noexcept;

  PathSeed seed_;
  std::array<std::uint32_t, 2> key_;
};

/// n_steps i.i.d. N(0, dt) increments; element j is sqrt(dt) * normal(j).
std::vector<double> gaussian_increments(const PathSeed& seed, const TimeGrid& grid);

/// Prefix sums with a leading zero: [g0, g1, ...] -> [0, g0, g0+g1, ...].
std::vector<double> cumulate(std::span<const double> increments);

}  // namespace sigmalab
