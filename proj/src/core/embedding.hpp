// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "monotone_fn.hpp"
#include "signed_measure.hpp"
#include "stopping.hpp"
#include "target_law.hpp"

namespace sigmalab::embed {

/// Tail mass at which laws with unbounded support are cut off for tabulation.
inline constexpr double kTailCut = 1e-6;

/// Psi(x) = int_[0,x] z / tail(z) dnu(z): zero on [0, a], tabulated on [a, x_hi],
/// infinite from b on.
struct PsiFunction {
  MonotoneFn table;
  double a_nu = 0.0;
  double b_nu = std::numeric_limits<double>::infinity();
  double x_hi = 0.0;  ///< last tabulated abscissa

  double operator()(double x) const;
};

/// Stieltjes midpoint sum over n_quad cells (default 10^4 per unit of [a, x_hi]) in the
/// variable -log tail, which is exact for the exponential family.
PsiFunction psi(const law::TargetLaw& law, std::int64_t n_quad = 0);

/// Right-continuous inverse phi(z) = inf{x : Psi(x) > z}; phi(0) = a.
/// Throws std::invalid_argument when the table is not strictly increasing.
MonotoneFn phi_from_psi(const PsiFunction& psi);
MonotoneFn phi_from_psi(const MonotoneFn& psi);

/// Cumulative int_0^z dz' / phi(z') along the knots of phi (midpoint rule per cell).
MonotoneFn clock_integral(const MonotoneFn& phi);

/// First index k of a stored path with X_k >= barrier(A_k).
stop::StoppingOutcome stop_T_phi(const sigma::SigmaPath& path, const std::function<double(double)>& barrier);

/// First index k with h(A_k) X_k >= 1.
stop::StoppingOutcome stop_R_h(const sigma::SigmaPath& path, const std::function<double(double)>& h);

struct EmbedOptions {
  stop::ScanOptions scan;
  double truncation_budget = 0.005;
  bool escalate = true;  ///< retry truncated paths once with a 4x horizon
  std::int64_t n_quad = 0;
  std::size_t low_power_below = 10000;
  double ks_threshold = 0.02;
  unsigned threads = 0;
};

struct EmbedSample {
  double x = 0.0;       ///< X at the stop (barrier value when clamped)
  double weight = 0.0;
  double a = 0.0;       ///< A at the stop
  double x_grid = 0.0;  ///< unclamped grid value
  bool truncated = false;
  bool beyond_table = false;
};

struct EmbedResult {
  std::string law;
  std::vector<EmbedSample> samples;
  double t_max = 0.0;
  bool escalated = false;
  double truncated_fraction = 0.0;  ///< weighted
  bool truncation_failed = false;
  double ks = std::numeric_limits<double>::quiet_NaN();
  bool low_power = false;
  bool pass = false;
  double support_low = 0.0;   ///< min sample
  double support_high = 0.0;  ///< max sample
  bool support_ok = false;    ///< samples inside [a - 5 sqrt(dt), b + 5 sqrt(dt)]
  double defect_phi = 0.0;      ///< weighted mean |X_grid - phi(A)|
  double defect_inverse = 0.0;  ///< weighted mean |X_grid - 1 / phi(A)|
  std::string supported_identity;
  std::size_t beyond_table = 0;
  std::string diagnostic;
};

/// Stops every path of the ensemble at T = inf{t : X >= phi_nu(A)} after its g-bar and
/// returns the weighted sample of X_T with diagnostics.
EmbedResult embed(const measure::WeightedEnsemble& ensemble, const law::TargetLaw& law, const EmbedOptions& opt);

struct CrossingEstimate {
  double estimate = 0.0;
  double se = 0.0;
  double truncated_fraction = 0.0;
  std::size_t crossed = 0;
  std::size_t capped = 0;
  std::size_t truncated = 0;
};

/// Weighted P'(X crosses barrier(A) before A exceeds u), scanning each path from g-bar.
/// Truncated paths are excluded from the estimate and reported separately.
CrossingEstimate crossing_probability(const measure::WeightedEnsemble& ensemble,
                                      const std::function<double(double)>& barrier, double u,
                                      const stop::ScanOptions& scan, unsigned threads = 0);

struct LambdaBin {
  double a_low = 0.0;
  double a_high = 0.0;
  double a_mean = 0.0;
  double lambda = 0.0;
  double se = 0.0;
  double mass = 0.0;
  std::size_t count = 0;
};

/// Binned estimate of lambda(x) = E'[X | A = x] with the curve exp(-int_0^x dz / lambda).
struct LambdaFit {
  std::vector<LambdaBin> bins;
  std::size_t empty_bins = 0;
  std::vector<double> curve_x;
  std::vector<double> curve_tail;

  /// lambda interpolated linearly between bin centres, flat beyond them.
  double lambda_at(double x) const;
  /// exp(-int_0^x dz / lambda), by trapezoid accumulation on curve_x.
  double tail(double x) const;
};

LambdaFit conditional_lambda(std::span<const double> a_values, std::span<const double> x_values,
                             std::span<const double> weights, std::size_t n_bins);

}  // namespace sigmalab::embed
