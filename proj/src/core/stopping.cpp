// SPDX-License-Identifier: Apache-2.0
#include "stopping.hpp"

namespace sigmalab::stop {

PassageOutcome drifted_passage(const PathSeed& driver, double dt, std::uint64_t first_counter, double y0,
                               double drift, double level, double floor, std::int64_t max_steps, bool bridge) {
  PassageOutcome out;
  if (y0 >= level) {
    out.hit = true;
    out.y_end = y0;
    return out;
  }
  NormalStream z(driver.with_tag(stream::driver));
  const CounterRng cross(driver.with_tag(stream::bridge_cross));
  const double sd = std::sqrt(dt);
  const double mu = drift * dt;
  double y = y0;
  for (std::int64_t k = 0; k < max_steps; ++k) {
    const std::uint64_t c = first_counter + static_cast<std::uint64_t>(k);
    const double next = y + mu + sd * z.at(c);
    out.steps = k + 1;
    if (next >= level) {
      out.hit = true;
      out.y_end = next;
      return out;
    }
    // The bridge between y and next dips above `level` with this probability.
    if (bridge && cross.uniform(c) < std::exp(-2.0 * (level - y) * (level - next) / dt)) {
      out.hit = true;
      out.y_end = level;
      return out;
    }
    y = next;
    if (y < floor) {
      out.y_end = y;
      return out;
    }
  }
  out.undecided = true;
  out.y_end = y;
  return out;
}

double drifted_value(const PathSeed& driver, double dt, std::int64_t n_steps, double y0, double drift) {
  NormalStream z(driver.with_tag(stream::driver));
  const double sd = std::sqrt(dt);
  double y = y0;
  for (std::int64_t k = 0; k < n_steps; ++k) y += drift * dt + sd * z.at(static_cast<std::uint64_t>(k));
  return y;
}

}  // namespace sigmalab::stop
