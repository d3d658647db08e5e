// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "monotone_fn.hpp"
#include "sigma_processes.hpp"

namespace sigmalab::fn {

using ScalarFn = std::function<double(double)>;

/// Declares f(z) = z^{-alpha} r(z) near 0 with 0 < alpha < 1 and r bounded.
struct PowerSingularity {
  double alpha = 0.5;
};

/// Default number of quadrature cells: 10^4 per unit length, at least 2.
std::int64_t default_cells(double x_max);

/// F(x) = int_0^x f by the composite midpoint rule on n_quad uniform cells (F(0) = 0).
///
/// With a declared power singularity each cell uses the product rule
/// r(midpoint) * int_cell z^{-alpha} dz, which is exact for f = z^{-alpha}.
/// The returned table carries a Richardson estimate of the quadrature error.
MonotoneFn primitive(const ScalarFn& f, double x_max, std::int64_t n_quad = 0,
                     std::optional<PowerSingularity> singularity = std::nullopt);

/// A function parsed from a config string.
struct NamedFn {
  std::string spec;
  ScalarFn f;
  std::optional<PowerSingularity> singularity;
};

/// Parses const:c, affine:a,b (a + b z), exp_decay:l (e^{-l z}), power:p (z^p, singular
/// at 0 when -1 < p < 0) and csv:path (columns x,value; linear interpolation, flat outside).
/// Throws ConfigError on anything else.
NamedFn parse_function(const std::string& spec);

/// W_k = F(A_k) - f(A_k) X_k.
std::vector<double> azema_yor_transform(const sigma::SigmaPath& s, const ScalarFn& f, const MonotoneFn& F);

/// max_k |max_{j<=k} W_j - F(A_k)|.
double running_max_identity_check(std::span<const double> w, const MonotoneFn& F, std::span<const double> a);

/// Primitive of f(z) g(F(z)), i.e. the tabulated G o F.
MonotoneFn composed_primitive(const ScalarFn& f, const ScalarFn& g, const MonotoneFn& F, double x_max,
                              std::int64_t n_quad = 0);

struct CompositionResult {
  double defect = 0.0;     ///< max_k |W^G(f(A) X)_k - W^{G o F}(X)_k|
  double tolerance = 0.0;  ///< combined tabulation error of F, G and G o F
};

/// Compares W^G applied to f(A) X (nondecreasing part F(A)) with W^{G o F}(X).
CompositionResult composition_check(const sigma::SigmaPath& s, const ScalarFn& f, const ScalarFn& g,
                                    const MonotoneFn& F, const MonotoneFn& G, const MonotoneFn& GF);

/// Clock V(y) = int_0^y ds / phi(s), extended by doubling y_max until V reaches v_needed
/// (at most 40 doublings). `reached` is false when the clock saturates first.
struct BachelierClock {
  MonotoneFn v;
  bool reached = true;
};
BachelierClock bachelier_clock(const ScalarFn& phi, double v_needed, double y_max = 1.0,
                               double cells_per_unit = 1e4);

struct BachelierSolution {
  std::vector<double> y_euler;
  std::vector<double> y_closed;
  std::vector<double> a;            ///< running max of N (with 0)
  bool clamped = false;             ///< some A_k fell outside the clock's range
  double max_identity_defect = 0.0; ///< max_k |max_{j<=k} Y_closed,j - U(A_k)|
};

/// Euler scheme Y_{k+1} = Y_k + phi(max_{j<=k} Y_j)(N_{k+1} - N_k) and the closed form
/// U(A_k) - phi(U(A_k)) X_k with U = V^{-1}, A the running max of N and X = A - N.
BachelierSolution bachelier_solve(std::span<const double> n, const ScalarFn& phi, const MonotoneFn& clock);

/// Convenience overload that builds the clock for the path's running max.
BachelierSolution bachelier_solve(std::span<const double> n, const ScalarFn& phi);

struct RefinementLadder {
  std::vector<double> dts;                      ///< as given
  std::vector<std::vector<double>> errors;      ///< errors[level][path]: sup_k |Y_euler - Y_closed|
  std::vector<double> median_ratio;             ///< per consecutive pair: median of err[l+1]/err[l]
  bool clamped = false;
};

/// Runs bachelier_solve on one Brownian path per index at every dt of the ladder. All
/// levels subsample the same finest path, so dts must be integer multiples of the smallest.
RefinementLadder bachelier_refinement(const ScalarFn& phi, std::span<const double> dts, double t_max,
                                      std::size_t n_paths, std::uint64_t seed, unsigned threads = 0);

}  // namespace sigmalab::fn
