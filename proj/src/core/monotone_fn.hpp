// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <vector>

namespace sigmalab {

/// Tabulated function on strictly increasing knots with linear interpolation.
///
/// Values are expected to be nondecreasing; inverse() is the right-continuous inverse
/// inf{x : F(x) > y}, so flat stretches map to their right end. Outside the knot range
/// evaluation clamps to the end values; callers check covers() where that matters.
class MonotoneFn {
 public:
  MonotoneFn() = default;
  MonotoneFn(std::vector<double> knots, std::vector<double> values, double quadrature_error = 0.0);

  double operator()(double x) const;
  double inverse(double y) const;

  /// Slope of the interpolant on the cell containing x.
  double slope(double x) const;

  bool covers(double x) const noexcept { return x >= knots_.front() && x <= knots_.back(); }
  bool inverse_covers(double y) const noexcept { return y >= values_.front() && y <= values_.back(); }
  bool is_monotone() const noexcept { return monotone_; }
  bool is_strictly_increasing() const noexcept { return strict_; }

  double lower() const noexcept { return knots_.front(); }
  double upper() const noexcept { return knots_.back(); }
  double value_min() const noexcept { return values_.front(); }
  double value_max() const noexcept { return values_.back(); }

  std::span<const double> knots() const noexcept { return knots_; }
  std::span<const double> values() const noexcept { return values_; }

  /// Bound on linear-interpolation error: max over interior knots of |second difference| / 8.
  double interpolation_tolerance() const noexcept { return interp_tol_; }
  /// Richardson estimate of the tabulation error carried over from quadrature (0 if exact).
  double quadrature_error() const noexcept { return quad_err_; }
  double error_bound() const noexcept { return interp_tol_ + quad_err_; }

  /// Swaps roles of knots and values. Requires strictly increasing values.
  MonotoneFn inverted() const;

 private:
  std::size_t cell(double x) const;

  std::vector<double> knots_;
  std::vector<double> values_;
  double interp_tol_ = 0.0;
  double quad_err_ = 0.0;
  bool monotone_ = true;
  bool strict_ = true;
  bool uniform_ = false;
  double inv_h_ = 0.0;
};

}  // namespace sigmalab
