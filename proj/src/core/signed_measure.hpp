// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "grid_rng.hpp"
#include "sigma_processes.hpp"

namespace sigmalab::measure {

/// Density-martingale models for D = dQ/dP.
struct DensityModel {
  enum class Kind { constant_one, brownian_stopped };
  Kind kind = Kind::constant_one;
  double d0 = 1.0;      ///< D_0 for brownian_stopped
  double t_stop = 1.0;  ///< D_t = d0 + B_{t ^ t_stop}

  static DensityModel constant_one() { return {}; }
  static DensityModel brownian_stopped(double d0, double t_stop) { return {Kind::brownian_stopped, d0, t_stop}; }

  /// "constant_one" or "brownian_stopped"; throws ConfigError for anything else.
  static DensityModel from_name(const std::string& name, double d0 = 1.0, double t_stop = 1.0);
  std::string name() const;
};

/// Simulated density path with its zero set H, last zero g-bar and terminal value.
struct DensityScenario {
  TimeGrid grid;
  std::vector<double> d;
  std::vector<std::size_t> h_indices;
  std::size_t g_bar_index = 0;
  double d_terminal = 1.0;
  std::uint32_t rejected = 0;  ///< resampled attempts with |D_terminal| at the rejection floor
};

/// Zero band used for H on a grid: 0.5 sqrt(dt).
double density_zero_band(const TimeGrid& grid);

/// Terminal values below this magnitude are treated as D_infinity = 0 and resampled.
inline constexpr double kTerminalFloor = 10.0 * 2.220446049250313e-16;

DensityScenario simulate_density(const DensityModel& model, const PathSeed& seed, const TimeGrid& grid);

/// Same as simulate_density but keeps only g-bar and the terminal value.
struct DensitySummary {
  std::size_t g_bar_index = 0;
  double d_terminal = 1.0;
  bool hit_zero = false;
  std::uint32_t rejected = 0;
};
DensitySummary summarize_density(const DensityModel& model, const PathSeed& seed, const TimeGrid& grid);

struct EnsembleRecord {
  std::uint64_t path_index = 0;
  std::size_t g_bar_index = 0;
  double d_terminal = 1.0;
  bool hit_zero = false;
};

/// Paths under P' = |D_inf| / E|D_inf| P, represented by self-normalized weights.
/// Driver paths are regenerated on demand from (global_seed, path_index).
struct WeightedEnsemble {
  TimeGrid grid;
  std::uint64_t global_seed = 0;
  DensityModel model;
  std::vector<EnsembleRecord> records;
  std::vector<double> weights;  ///< mean exactly representable as 1 up to rounding
  std::uint64_t rejected_total = 0;

  std::size_t size() const noexcept { return records.size(); }
  PathSeed driver_seed(std::size_t i) const noexcept {
    return {global_seed, records[i].path_index, stream::driver};
  }
};

WeightedEnsemble build_ensemble(const TimeGrid& grid, std::uint64_t global_seed, std::size_t n,
                                const DensityModel& model, unsigned threads = 0);

/// Unit-weight ensemble of plain class-(Sigma) paths (g-bar = 0 everywhere).
WeightedEnsemble plain_ensemble(const TimeGrid& grid, std::uint64_t global_seed, std::size_t n);

/// X = 0 up to g-bar, then the reflection of the driver increments accumulated from g-bar on.
sigma::SigmaPath build_sigma_h(const TimeGrid& grid, std::size_t g_bar_index, std::span<const double> increments,
                               sigma::RunningMax mode = sigma::RunningMax::grid,
                               const CounterRng* bridge_uniforms = nullptr);

sigma::SigmaPath build_sigma_h(const DensityScenario& scenario, const PathSeed& driver_seed,
                               sigma::RunningMax mode = sigma::RunningMax::grid);

struct Rerooted {
  sigma::SigmaPath path;
  bool flagged = false;  ///< X at g-bar lay outside the zero band
};

/// Shift to g-bar: X' = X_{.+g}, M' = M_{.+g} - M_g, A' = A_{.+g} - A_g.
Rerooted reroot(const sigma::SigmaPath& s, std::size_t g_bar_index, double zero_band = 0.0);
Rerooted reroot(const sigma::SigmaPath& s, const DensityScenario& scenario, double zero_band = 0.0);

/// First index with A' > u, or nullopt when A' never exceeds u on the grid.
std::optional<std::size_t> tau_inverse(const sigma::SigmaPath& rerooted, double u);

}  // namespace sigmalab::measure
