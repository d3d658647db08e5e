// SPDX-License-Identifier: Apache-2.0
#include "monotone_fn.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "errors.hpp"

namespace sigmalab {

MonotoneFn::MonotoneFn(std::vector<double> knots, std::vector<double> values, double quadrature_error)
    : knots_(std::move(knots)), values_(std::move(values)), quad_err_(quadrature_error) {
  if (knots_.size() < 2 || knots_.size() != values_.size())
    throw std::invalid_argument("MonotoneFn: need at least two knots and matching values");
  for (std::size_t i = 0; i < knots_.size(); ++i) {
    if (!std::isfinite(knots_[i]) || !std::isfinite(values_[i]))
      throw std::invalid_argument("MonotoneFn: non-finite table entry at row " + std::to_string(i));
    if (i == 0) continue;
    if (!(knots_[i] > knots_[i - 1])) throw MonotonicityError("MonotoneFn: knots must be strictly increasing", i);
    if (values_[i] < values_[i - 1]) monotone_ = false;
    if (!(values_[i] > values_[i - 1])) strict_ = false;
  }
  for (std::size_t i = 1; i + 1 < values_.size(); ++i) {
    // Second difference normalised to the local spacing.
    const double h0 = knots_[i] - knots_[i - 1];
    const double h1 = knots_[i + 1] - knots_[i];
    const double curvature = std::fabs((values_[i + 1] - values_[i]) / h1 - (values_[i] - values_[i - 1]) / h0) /
                             (0.5 * (h0 + h1));
    const double h = std::max(h0, h1);
    interp_tol_ = std::max(interp_tol_, curvature * h * h / 8.0);
  }
  const double h = (knots_.back() - knots_.front()) / static_cast<double>(knots_.size() - 1);
  uniform_ = true;
  for (std::size_t i = 1; i < knots_.size() && uniform_; ++i) {
    uniform_ = std::fabs(knots_[i] - (knots_.front() + h * static_cast<double>(i))) <= 1e-9 * h;
  }
  inv_h_ = 1.0 / h;
}

std::size_t MonotoneFn::cell(double x) const {
  // Index i with knots_[i] <= x < knots_[i+1], clamped to [0, n-2].
  if (uniform_) {
    const double pos = (x - knots_.front()) * inv_h_;
    auto i = pos <= 0.0 ? std::size_t{0} : std::min(static_cast<std::size_t>(pos), knots_.size() - 2);
    while (i > 0 && knots_[i] > x) --i;
    while (i + 2 < knots_.size() && knots_[i + 1] <= x) ++i;
    return i;
  }
  auto it = std::upper_bound(knots_.begin(), knots_.end(), x);
  std::size_t i = it == knots_.begin() ? 0 : static_cast<std::size_t>(it - knots_.begin()) - 1;
  return std::min(i, knots_.size() - 2);
}

double MonotoneFn::operator()(double x) const {
  if (x <= knots_.front()) return values_.front();
  if (x >= knots_.back()) return values_.back();
  const std::size_t i = cell(x);
  const double w = (x - knots_[i]) / (knots_[i + 1] - knots_[i]);
  return values_[i] + w * (values_[i + 1] - values_[i]);
}

double MonotoneFn::slope(double x) const {
  const std::size_t i = cell(x);
  return (values_[i + 1] - values_[i]) / (knots_[i + 1] - knots_[i]);
}

double MonotoneFn::inverse(double y) const {
  if (!monotone_) throw std::logic_error("MonotoneFn::inverse on a non-monotone table");
  auto it = std::upper_bound(values_.begin(), values_.end(), y);
  if (it == values_.begin()) return knots_.front();
  if (it == values_.end()) return knots_.back();
  const auto i = static_cast<std::size_t>(it - values_.begin());
  const double w = (y - values_[i - 1]) / (values_[i] - values_[i - 1]);
  return knots_[i - 1] + w * (knots_[i] - knots_[i - 1]);
}

MonotoneFn MonotoneFn::inverted() const {
  if (!strict_) throw std::invalid_argument("MonotoneFn::inverted: values are not strictly increasing");
  return MonotoneFn(values_, knots_, quad_err_);
}

}  // namespace sigmalab
