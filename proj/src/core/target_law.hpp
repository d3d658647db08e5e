// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace sigmalab::law {

/// Non-atomic probability law on [0, inf).
class TargetLaw {
 public:
  virtual ~TargetLaw() = default;

  /// Canonical spec string, e.g. "exp:1".
  virtual std::string name() const = 0;
  /// nu([x, inf)).
  virtual double tail(double x) const = 0;
  double cdf(double x) const { return 1.0 - tail(x); }
  virtual std::optional<double> density(double) const { return std::nullopt; }
  /// Generalized inverse of the cdf on (0, 1).
  virtual double quantile(double p) const = 0;
  double sample(double uniform) const { return quantile(uniform); }
  /// a = sup{x : tail(x) = 1}.
  virtual double lower() const = 0;
  /// b = inf{x : tail(x) = 0}, possibly infinite.
  virtual double upper() const { return std::numeric_limits<double>::infinity(); }
  /// -log tail(x), accurate far into the tail.
  virtual double log_tail_neg(double x) const;
};

std::unique_ptr<TargetLaw> exponential(double theta);
std::unique_ptr<TargetLaw> uniform(double a, double b);
std::unique_ptr<TargetLaw> weibull(double shape, double scale);
std::unique_ptr<TargetLaw> half_normal(double sigma);

/// Piecewise-linear cdf through (x_i, cdf_i). Requires x strictly increasing, x_0 >= 0,
/// cdf nondecreasing from 0 to 1; a violation throws MonotonicityError with its row.
std::unique_ptr<TargetLaw> tabulated(std::vector<double> x, std::vector<double> cdf, std::string name = "table");

/// exp:theta, uniform:a,b, weibull:k,lambda, halfnormal:sigma, csv:path.
/// Throws ConfigError (or MonotonicityError for bad tables).
std::unique_ptr<TargetLaw> parse_law(const std::string& spec);

}  // namespace sigmalab::law
