// SPDX-License-Identifier: Apache-2.0
#include "signed_measure.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "errors.hpp"
#include "parallel.hpp"

namespace sigmalab::measure {

DensityModel DensityModel::from_name(const std::string& name, double d0, double t_stop) {
  if (name == "constant_one") return constant_one();
  if (name == "brownian_stopped") {
    if (!(d0 > 0.0)) throw ConfigError("brownian_stopped: d0 must be positive");
    if (!(t_stop > 0.0)) throw ConfigError("brownian_stopped: t_stop must be positive");
    return brownian_stopped(d0, t_stop);
  }
  throw ConfigError("unknown density model '" + name + "'");
}

std::string DensityModel::name() const {
  return kind == Kind::constant_one ? "constant_one" : "brownian_stopped";
}

double density_zero_band(const TimeGrid& grid) { return 0.5 * std::sqrt(grid.dt()); }

namespace {

struct DensityRun {
  DensitySummary summary;
  std::vector<double> d;
  std::vector<std::size_t> h;
};

// One attempt of D = d0 + B stopped at t_stop; stores the path only when asked.
DensityRun run_density(const DensityModel& model, const PathSeed& seed, const TimeGrid& grid, bool store) {
  DensityRun run;
  if (model.kind == DensityModel::Kind::constant_one) {
    if (store) run.d.assign(grid.n_points(), 1.0);
    return run;
  }
  const double band = density_zero_band(grid);
  const double sd = std::sqrt(grid.dt());
  const auto active_steps = std::min<std::int64_t>(grid.n_steps(), std::llround(model.t_stop / grid.dt()));
  for (std::uint32_t attempt = 0;; ++attempt) {
    const CounterRng rng(seed.with_tag(stream::density + attempt * stream::density_retry_stride));
    if (store) {
      run.d.assign(grid.n_points(), model.d0);
      run.h.clear();
    }
    double d = model.d0;
    double prev = d;
    std::size_t g_bar = 0;
    bool hit = false;
    auto mark = [&](std::size_t k) {
      g_bar = k;
      hit = true;
      if (store && (run.h.empty() || run.h.back() != k)) run.h.push_back(k);
    };
    if (std::fabs(d) <= band) mark(0);
    for (std::int64_t j = 0; j < active_steps; ++j) {
      d = prev + sd * rng.normal(static_cast<std::uint64_t>(j));
      const auto k = static_cast<std::size_t>(j + 1);
      if (std::fabs(d) <= band) {
        mark(k);
      } else if (std::fabs(prev) > band && (prev > 0.0) != (d > 0.0)) {
        mark(k - 1);
      }
      if (store) run.d[k] = d;
      prev = d;
    }
    if (store) std::fill(run.d.begin() + active_steps + 1, run.d.end(), d);
    if (std::fabs(d) <= kTerminalFloor) {
      ++run.summary.rejected;
      continue;
    }
    run.summary.g_bar_index = g_bar;
    run.summary.d_terminal = d;
    run.summary.hit_zero = hit;
    return run;
  }
}

}  // namespace

DensityScenario simulate_density(const DensityModel& model, const PathSeed& seed, const TimeGrid& grid) {
  auto run = run_density(model, seed, grid, true);
  DensityScenario s{grid, std::move(run.d), std::move(run.h), run.summary.g_bar_index, run.summary.d_terminal,
                    run.summary.rejected};
  return s;
}

DensitySummary summarize_density(const DensityModel& model, const PathSeed& seed, const TimeGrid& grid) {
  return run_density(model, seed, grid, false).summary;
}

WeightedEnsemble build_ensemble(const TimeGrid& grid, std::uint64_t global_seed, std::size_t n,
                                const DensityModel& model, unsigned threads) {
  if (n == 0) throw std::invalid_argument("build_ensemble: empty ensemble");
  WeightedEnsemble e{grid, global_seed, model, {}, {}, 0};
  const auto summaries = parallel_map(n, threads, [&](std::size_t i) {
    return summarize_density(model, PathSeed{global_seed, i, stream::density}, grid);
  });
  e.records.resize(n);
  e.weights.resize(n);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    e.records[i] = {i, summaries[i].g_bar_index, summaries[i].d_terminal, summaries[i].hit_zero};
    e.rejected_total += summaries[i].rejected;
    total += std::fabs(summaries[i].d_terminal);
  }
  const double mean = total / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) e.weights[i] = std::fabs(e.records[i].d_terminal) / mean;
  return e;
}

WeightedEnsemble plain_ensemble(const TimeGrid& grid, std::uint64_t global_seed, std::size_t n) {
  WeightedEnsemble e{grid, global_seed, DensityModel::constant_one(), {}, {}, 0};
  e.records.resize(n);
  for (std::size_t i = 0; i < n; ++i) e.records[i].path_index = i;
  e.weights.assign(n, 1.0);
  return e;
}

sigma::SigmaPath build_sigma_h(const TimeGrid& grid, std::size_t g_bar_index, std::span<const double> increments,
                               sigma::RunningMax mode, const CounterRng* bridge_uniforms) {
  if (increments.size() != static_cast<std::size_t>(grid.n_steps()))
    throw std::invalid_argument("build_sigma_h: increment count does not match grid");
  if (g_bar_index > increments.size()) throw std::invalid_argument("build_sigma_h: g-bar outside grid");
  if (mode == sigma::RunningMax::bridge && bridge_uniforms == nullptr)
    throw std::invalid_argument("build_sigma_h: bridge mode needs a uniform stream");
  const std::size_t n = grid.n_points();
  sigma::SigmaPath s{grid, std::vector<double>(n, 0.0), std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)};
  double driver = 0.0;
  double running = 0.0;
  for (std::size_t k = g_bar_index + 1; k < n; ++k) {
    const double prev = driver;
    driver += increments[k - 1];
    const double top = mode == sigma::RunningMax::grid
                           ? driver
                           : sigma::bridge_maximum(prev, driver, grid.dt(), bridge_uniforms->uniform(k - 1));
    running = std::max(running, top);
    s.a[k] = running;
    s.m[k] = -driver;
    s.x[k] = running + s.m[k];
  }
  return s;
}

sigma::SigmaPath build_sigma_h(const DensityScenario& scenario, const PathSeed& driver_seed, sigma::RunningMax mode) {
  const auto inc = gaussian_increments(driver_seed, scenario.grid);
  const CounterRng uniforms(driver_seed.with_tag(stream::bridge_max));
  return build_sigma_h(scenario.grid, scenario.g_bar_index, inc, mode, &uniforms);
}

Rerooted reroot(const sigma::SigmaPath& s, std::size_t g, double zero_band) {
  const std::size_t n = s.x.size();
  if (g + 1 >= n) throw std::invalid_argument("reroot: g-bar leaves no remaining steps");
  const std::size_t len = n - g;
  Rerooted out{sigma::SigmaPath{TimeGrid(s.grid.dt(), static_cast<std::int64_t>(len - 1)), std::vector<double>(len),
                                std::vector<double>(len), std::vector<double>(len)},
               std::fabs(s.x[g]) > zero_band};
  for (std::size_t k = 0; k < len; ++k) {
    out.path.x[k] = s.x[k + g];
    out.path.m[k] = s.m[k + g] - s.m[g];
    out.path.a[k] = s.a[k + g] - s.a[g];
  }
  return out;
}

Rerooted reroot(const sigma::SigmaPath& s, const DensityScenario& scenario, double zero_band) {
  return reroot(s, scenario.g_bar_index, zero_band);
}

std::optional<std::size_t> tau_inverse(const sigma::SigmaPath& rerooted, double u) {
  if (!(u > 0.0)) throw std::invalid_argument("tau_inverse: u must be positive");
  for (std::size_t k = 0; k < rerooted.a.size(); ++k) {
    if (rerooted.a[k] > u) return k;
  }
  return std::nullopt;
}

}  // namespace sigmalab::measure
