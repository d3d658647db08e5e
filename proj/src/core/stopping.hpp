// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "grid_rng.hpp"
#include "sigma_processes.hpp"

namespace sigmalab::stop {

struct ScanOptions {
  bool bridge_max = true;       ///< sample each step's bridge maximum for A
  bool bridge_crossing = true;  ///< intra-step crossing correction
  /// Steps whose barrier is below refine_threshold * sqrt(dt) are split into
  /// refine_factor bridge sub-steps (0 disables).
  double refine_threshold = 4.0;
  int refine_factor = 32;
  /// Stop scanning (capped) once A exceeds this value.
  double a_cap = std::numeric_limits<double>::infinity();
  /// Report the barrier value instead of the overshooting grid value.
  bool clamp = true;
};

struct StoppingOutcome {
  std::optional<std::int64_t> stop_index;  ///< steps after the start, end of the crossing step
  bool truncated = false;                  ///< horizon reached undecided
  bool capped = false;                     ///< A passed a_cap first
  double x_at_stop = std::numeric_limits<double>::quiet_NaN();
  double a_at_stop = std::numeric_limits<double>::quiet_NaN();
  double x_grid = std::numeric_limits<double>::quiet_NaN();  ///< unclamped X at the recorded point
  double elapsed = std::numeric_limits<double>::quiet_NaN();
};

/// Gaussian draws of one stream in counter order, reusing each Box-Muller pair.
class NormalStream {
 public:
  explicit NormalStream(const PathSeed& seed) : rng_(seed) {}
  double at(std::uint64_t counter) {
    const std::uint64_t block = counter >> 1;
    if (block != cached_block_) {
      pair_ = rng_.normal_pair(block);
      cached_block_ = block;
    }
    return pair_[counter & 1U];
  }

 private:
  CounterRng rng_;
  std::uint64_t cached_block_ = ~std::uint64_t{0};
  std::array<double, 2> pair_{};
};

struct NoObserver {
  void operator()(std::int64_t, double, double) const noexcept {}
};

/// First time the reflected driver X = A - N started at grid step `start_step`
/// (X = A = 0 there) reaches barrier(A).
///
/// The driver increments are those of gaussian_increments(driver, grid) from
/// `start_step` on, so the unrefined walk reproduces build_sigma_h + reroot in bridge
/// mode. `observe(k, N_k, A_k)` runs after every processed grid step, including the
/// stopping one.
template <class Barrier, class Observer = NoObserver>
StoppingOutcome scan_first_crossing(const PathSeed& driver, const TimeGrid& grid, std::int64_t start_step,
                                    Barrier&& barrier, const ScanOptions& opt, Observer&& observe = {}) {
  StoppingOutcome out;
  const double dt = grid.dt();
  const double sd = std::sqrt(dt);
  const std::int64_t steps = grid.n_steps() - start_step;
  NormalStream z(driver.with_tag(stream::driver));
  const CounterRng max_u(driver.with_tag(stream::bridge_max));
  const CounterRng cross_u(driver.with_tag(stream::bridge_cross));
  const CounterRng ref_max_u(driver.with_tag(stream::refine_max));
  const CounterRng ref_cross_u(driver.with_tag(stream::refine_cross));
  NormalStream ref_z(driver.with_tag(stream::refine_path));

  double n = 0.0;
  double a = 0.0;
  double bar_a = 0.0;
  double bar = barrier(0.0);
  const auto barrier_at = [&](double level) {
    if (level != bar_a) {
      bar_a = level;
      bar = barrier(level);
    }
    return bar;
  };

  // One (sub)step of the driver from n0 to n1 over length h; true when it stops.
  const auto process = [&](double n0, double n1, double h, double u_max, const CounterRng& cross,
                           std::uint64_t cross_counter) {
    a = opt.bridge_max ? std::max(a, sigma::bridge_maximum(n0, n1, h, u_max)) : std::max(a, n1);
    const double b = barrier_at(a);
    const double x_end = a - n1;
    if (x_end >= b) {
      out.x_grid = x_end;
      out.x_at_stop = opt.clamp ? b : x_end;
      return true;
    }
    if (opt.bridge_crossing && std::isfinite(b)) {
      const double p = sigma::bridge_crossing_probability(n0, n1, a - b, h);
      if (p > 0.0 && cross.uniform(cross_counter) < p) {
        out.x_grid = x_end;
        out.x_at_stop = b;
        return true;
      }
    }
    return false;
  };

  const int r = std::max(1, opt.refine_factor);
  std::vector<double> sub(static_cast<std::size_t>(r) + 1);
  for (std::int64_t k = 1; k <= steps; ++k) {
    const auto j = static_cast<std::uint64_t>(start_step + k - 1);
    const double n1 = n + sd * z.at(j);
    bool stopped = false;
    double at_time = dt * static_cast<double>(k);
    double n_end = n1;
    if (opt.refine_threshold > 0.0 && r > 1 && barrier_at(a) < opt.refine_threshold * sd) {
      const double hs = dt / r;
      sub[0] = n;
      sub[static_cast<std::size_t>(r)] = n1;
      const std::uint64_t base = j * static_cast<std::uint64_t>(r);
      for (int span = r / 2; span >= 1; span /= 2) {
        const double sd_mid = std::sqrt(0.5 * span * hs);
        for (int i = span; i < r; i += 2 * span) {
          const auto ui = static_cast<std::size_t>(i);
          sub[ui] = 0.5 * (sub[ui - static_cast<std::size_t>(span)] + sub[ui + static_cast<std::size_t>(span)]) +
                    sd_mid * ref_z.at(base + static_cast<std::uint64_t>(i));
        }
      }
      for (int i = 1; i <= r; ++i) {
        const auto ui = static_cast<std::size_t>(i);
        const std::uint64_t c = base + static_cast<std::uint64_t>(i - 1);
        if (process(sub[ui - 1], sub[ui], hs, ref_max_u.uniform(c), ref_cross_u, c)) {
          stopped = true;
          at_time = dt * static_cast<double>(k - 1) + hs * i;
          n_end = sub[ui];
          break;
        }
      }
    } else {
      stopped = process(n, n1, dt, max_u.uniform(j), cross_u, j);
    }
    n = n_end;
    observe(k, n, a);
    if (stopped) {
      out.stop_index = k;
      out.a_at_stop = a;
      out.elapsed = at_time;
      return out;
    }
    if (a > opt.a_cap) {
      out.capped = true;
      out.a_at_stop = a;
      out.x_grid = out.x_at_stop = a - n;
      out.elapsed = at_time;
      return out;
    }
  }
  out.truncated = true;
  out.a_at_stop = a;
  out.x_grid = out.x_at_stop = a - n;
  out.elapsed = dt * static_cast<double>(steps);
  return out;
}

/// Outcome of a first passage of Y_t = y0 + drift t + B_t to an upper level.
struct PassageOutcome {
  bool hit = false;
  bool undecided = false;  ///< horizon reached with Y still above the floor
  std::int64_t steps = 0;
  double y_end = 0.0;
};

/// Walks Y with the driver stream from counter `first_counter` on, for at most
/// `max_steps` steps, until Y reaches `level` (with the bridge crossing correction when
/// enabled) or falls below `floor` (declared a miss).
PassageOutcome drifted_passage(const PathSeed& driver, double dt, std::uint64_t first_counter, double y0,
                               double drift, double level, double floor, std::int64_t max_steps, bool bridge);

/// Y at time n_steps * dt: y0 + drift t + B_t on the driver stream from counter 0.
double drifted_value(const PathSeed& driver, double dt, std::int64_t n_steps, double y0, double drift);

}  // namespace sigmalab::stop
