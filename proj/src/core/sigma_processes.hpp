// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "grid_rng.hpp"

namespace sigmalab::sigma {

/// Discrete class-(Sigma) path X = M + A on a shared grid. A is stored cumulatively.
struct SigmaPath {
  TimeGrid grid;
  std::vector<double> x;
  std::vector<double> m;
  std::vector<double> a;
};

/// A continuous process vanishing at zero that may change sign.
struct SignedPath {
  TimeGrid grid;
  std::vector<double> x;
};

/// How the running maximum of the driver is formed.
enum class RunningMax {
  grid,    ///< max over grid values; A increases only where X_k = 0
  bridge,  ///< exact-law max: each step's Brownian-bridge maximum is sampled
};

/// Skorokhod reflection of a driver N with N_0 = 0: A = max(0, running max of N),
/// M = -N and X = A - N. With RunningMax::grid everything is exact on the grid.
SigmaPath reflect_from_driver(const TimeGrid& grid, std::span<const double> n);

/// Same construction with the per-step bridge maximum of N sampled from `bridge_uniforms`
/// (counter = step index). (N_k, A_k) then has the joint law of Brownian motion and its
/// running supremum at the grid times.
SigmaPath reflect_with_bridge_max(const TimeGrid& grid, std::span<const double> n,
                                  const CounterRng& bridge_uniforms);

/// Sample of the maximum of a Brownian bridge from `a` to `b` over a step of length h.
double bridge_maximum(double a, double b, double h, double uniform) noexcept;

/// Probability that a Brownian bridge from a to b (both above `level`) dips to `level`.
double bridge_crossing_probability(double a, double b, double level, double h) noexcept;

/// Largest j <= k with |x_j| <= band, or nullopt.
std::optional<std::size_t> last_zero_before(std::span<const double> x, std::size_t k, double band);

/// g_k for every k: last zero-band index at or before k, where a sign change across
/// a step also counts as a zero at the step's earlier index. Index 0 is a zero.
std::vector<std::size_t> last_zero_indices(std::span<const double> x, double band);

/// Balayage Y_k = K_{g_k} X_k with g_k = last zero of X at or before k.
/// Throws std::invalid_argument if some |K_j| exceeds `bound`.
std::vector<double> balayage(std::span<const double> x, std::span<const double> k_values,
                             double band, double bound);

/// Balayage of a class-(Sigma) path. X is the exact K_{g_k} X_k, M accumulates
/// sum_j K_{g_{j-1}} (M_j - M_{j-1}) and A sum_j K_{g_{j-1}} (A_j - A_{j-1}), so X - (M + A)
/// vanishes up to rounding.
SigmaPath balayage(const SigmaPath& s, std::span<const double> k_values, double band, double bound);

struct SignBalayage {
  std::vector<int> k_at_g;             ///< excursion sign, 0 on the zero set
  std::vector<double> reconstruction;  ///< k_at_g[k] * |X_k|
};

/// Excursion sign K_{g_k} and the reconstruction K_{g_k} |X_k|, which equals X exactly.
SignBalayage sign_balayage(const SignedPath& x);

/// Discrete Tanaka estimator of the local time at `level`:
/// L_k = |X_k - level| - |X_0 - level| - sum_{j<=k} sgn(X_{j-1} - level)(X_j - X_{j-1}).
std::vector<double> local_time_estimate(const SignedPath& x, double level);

/// Occupation-time estimator (1 / 2 eps) * sum 1{|X_j - level| <= eps} dt.
std::vector<double> occupation_local_time(const SignedPath& x, double level, double eps);

struct StoppedPath {
  SigmaPath path;
  std::optional<std::size_t> stop_index;
  bool truncated = false;
};

/// Freezes the path at the first index with X >= level; from there X = level, A is frozen
/// and M = level - A. Unreached levels leave the path unchanged and mark it truncated.
StoppedPath stop_at_level(const SigmaPath& s, double level);

struct ConformanceReport {
  double offending_mass = 0.0;       ///< sum |dA_k| over steps with min(X_{k-1}, X_k) > band
  double total_variation = 0.0;      ///< sum |dA_k|
  double additivity_defect = 0.0;    ///< max |X_k - (M_k + A_k)|
  double monotonicity_defect = 0.0;  ///< sum of negative parts of dA_k
  double start_defect = 0.0;         ///< |A_0|
  bool pass = false;

  /// Conformance plus a nondecreasing A (a class-(Sigma) submartingale).
  bool submartingale_form() const noexcept { return pass && monotonicity_defect == 0.0; }
};

/// Membership check for class (Sigma): dA must be carried by the zero set of X
/// (optionally extended by `extra_carrier` indices, e.g. the zero set H of a density).
///
/// pass iff offending_mass <= tol * total_variation, A_0 = 0 and the additivity defect
/// is at most `additivity_tol` (exactly zero for constructed paths; frozen paths may
/// carry one rounding unit). A of either sign is accepted; see submartingale_form().
ConformanceReport sigma_class_check(const SigmaPath& s, double zero_band, double tol,
                                    std::span<const std::size_t> extra_carrier = {},
                                    double additivity_tol = 0.0);

}  // namespace sigmalab::sigma
