// SPDX-License-Identifier: Apache-2.0
#include "target_law.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <boost/math/special_functions/erf.hpp>

#include "errors.hpp"
#include "table_io.hpp"

namespace sigmalab::law {

double TargetLaw::log_tail_neg(double x) const { return -std::log(tail(x)); }

namespace {

std::string spec_of(const char* family, std::initializer_list<double> args) {
  std::string s = family;
  s += ':';
  bool first = true;
  for (double a : args) {
    if (!first) s += ',';
    s += format_double(a);
    first = false;
  }
  return s;
}

class Exponential final : public TargetLaw {
 public:
  explicit Exponential(double theta) : theta_(theta) {}
  std::string name() const override { return spec_of("exp", {theta_}); }
  double tail(double x) const override { return x <= 0.0 ? 1.0 : std::exp(-theta_ * x); }
  std::optional<double> density(double x) const override { return x < 0.0 ? 0.0 : theta_ * std::exp(-theta_ * x); }
  double quantile(double p) const override { return -std::log1p(-p) / theta_; }
  double lower() const override { return 0.0; }
  double log_tail_neg(double x) const override { return x <= 0.0 ? 0.0 : theta_ * x; }

 private:
  double theta_;
};

class Uniform final : public TargetLaw {
 public:
  Uniform(double a, double b) : a_(a), b_(b) {}
  std::string name() const override { return spec_of("uniform", {a_, b_}); }
  double tail(double x) const override {
    if (x <= a_) return 1.0;
    if (x >= b_) return 0.0;
    return (b_ - x) / (b_ - a_);
  }
  std::optional<double> density(double x) const override { return (x >= a_ && x <= b_) ? 1.0 / (b_ - a_) : 0.0; }
  double quantile(double p) const override { return a_ + p * (b_ - a_); }
  double lower() const override { return a_; }
  double upper() const override { return b_; }

 private:
  double a_, b_;
};

class Weibull final : public TargetLaw {
 public:
  Weibull(double k, double lambda) : k_(k), lambda_(lambda) {}
  std::string name() const override { return spec_of("weibull", {k_, lambda_}); }
  double tail(double x) const override { return std::exp(-log_tail_neg(x)); }
  std::optional<double> density(double x) const override {
    if (x <= 0.0) return k_ == 1.0 ? 1.0 / lambda_ : 0.0;
    const double r = x / lambda_;
    return k_ / lambda_ * std::pow(r, k_ - 1.0) * std::exp(-std::pow(r, k_));
  }
  double quantile(double p) const override { return lambda_ * std::pow(-std::log1p(-p), 1.0 / k_); }
  double lower() const override { return 0.0; }
  double log_tail_neg(double x) const override { return x <= 0.0 ? 0.0 : std::pow(x / lambda_, k_); }

 private:
  double k_, lambda_;
};

class HalfNormal final : public TargetLaw {
 public:
  explicit HalfNormal(double sigma) : sigma_(sigma) {}
  std::string name() const override { return spec_of("halfnormal", {sigma_}); }
  double tail(double x) const override { return x <= 0.0 ? 1.0 : std::erfc(x / (sigma_ * std::sqrt(2.0))); }
  std::optional<double> density(double x) const override {
    if (x < 0.0) return 0.0;
    return std::sqrt(2.0 / M_PI) / sigma_ * std::exp(-0.5 * (x / sigma_) * (x / sigma_));
  }
  double quantile(double p) const override { return sigma_ * std::sqrt(2.0) * boost::math::erf_inv(p); }
  double lower() const override { return 0.0; }
  double log_tail_neg(double x) const override {
    const double t = tail(x);
    if (t > 1e-300) return -std::log(t);
    // erfc(z) ~ exp(-z^2) / (z sqrt(pi)) for large z
    const double z = x / (sigma_ * std::sqrt(2.0));
    return z * z + std::log(z * std::sqrt(M_PI));
  }

 private:
  double sigma_;
};

class Tabulated final : public TargetLaw {
 public:
  Tabulated(std::vector<double> x, std::vector<double> c, std::string name)
      : x_(std::move(x)), c_(std::move(c)), name_(std::move(name)) {
    if (x_.size() < 2 || x_.size() != c_.size()) throw ConfigError("tabulated law needs two or more (x, cdf) rows");
    if (!(x_[0] >= 0.0)) throw MonotonicityError("tabulated law: support must lie in [0, inf)", 0);
    if (c_[0] != 0.0) throw MonotonicityError("tabulated law: cdf must start at 0 (no atom at the left end)", 0);
    for (std::size_t i = 1; i < x_.size(); ++i) {
      if (!(x_[i] > x_[i - 1])) throw MonotonicityError("tabulated law: x must be strictly increasing", i);
      if (c_[i] < c_[i - 1]) throw MonotonicityError("tabulated law: cdf must be nondecreasing", i);
    }
    if (c_.back() != 1.0) throw MonotonicityError("tabulated law: cdf must end at 1", x_.size() - 1);
    // Trim flat stretches at either end so that a and b are the support bounds.
    while (x_.size() > 2 && c_[1] == 0.0) {
      x_.erase(x_.begin());
      c_.erase(c_.begin());
    }
    while (x_.size() > 2 && c_[c_.size() - 2] == 1.0) {
      x_.pop_back();
      c_.pop_back();
    }
  }
  std::string name() const override { return name_; }
  double tail(double x) const override {
    if (x <= x_.front()) return 1.0;
    if (x >= x_.back()) return 0.0;
    const auto i = static_cast<std::size_t>(std::upper_bound(x_.begin(), x_.end(), x) - x_.begin());
    const double w = (x - x_[i - 1]) / (x_[i] - x_[i - 1]);
    return 1.0 - (c_[i - 1] + w * (c_[i] - c_[i - 1]));
  }
  std::optional<double> density(double x) const override {
    if (x < x_.front() || x >= x_.back()) return 0.0;
    const auto i = static_cast<std::size_t>(std::upper_bound(x_.begin(), x_.end(), x) - x_.begin());
    return (c_[i] - c_[i - 1]) / (x_[i] - x_[i - 1]);
  }
  double quantile(double p) const override {
    const auto i = static_cast<std::size_t>(std::upper_bound(c_.begin(), c_.end(), p) - c_.begin());
    if (i == 0) return x_.front();
    if (i == c_.size()) return x_.back();
    const double w = (p - c_[i - 1]) / (c_[i] - c_[i - 1]);
    return x_[i - 1] + w * (x_[i] - x_[i - 1]);
  }
  double lower() const override { return x_.front(); }
  double upper() const override { return x_.back(); }

 private:
  std::vector<double> x_, c_;
  std::string name_;
};

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(std::string(what) + " must be positive and finite");
}

std::vector<double> numbers(const std::string& spec, const std::string& body, std::size_t expected) {
  std::vector<double> out;
  std::size_t start = 0;
  for (;;) {
    const auto comma = body.find(',', start);
    const std::string tok = body.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(tok, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != tok.size()) throw ConfigError("law '" + spec + "': bad numeric argument '" + tok + "'");
    out.push_back(v);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  if (out.size() != expected)
    throw ConfigError("law '" + spec + "': expected " + std::to_string(expected) + " argument(s)");
  return out;
}

}  // namespace

std::unique_ptr<TargetLaw> exponential(double theta) {
  require_positive(theta, "exp rate");
  return std::make_unique<Exponential>(theta);
}

std::unique_ptr<TargetLaw> uniform(double a, double b) {
  if (!(a >= 0.0) || !(b > a) || !std::isfinite(b)) throw ConfigError("uniform law needs 0 <= a < b < inf");
  return std::make_unique<Uniform>(a, b);
}

std::unique_ptr<TargetLaw> weibull(double shape, double scale) {
  require_positive(scale, "weibull scale");
  if (!(shape >= 1.0) || !std::isfinite(shape)) throw ConfigError("weibull shape must be at least 1");
  return std::make_unique<Weibull>(shape, scale);
}

std::unique_ptr<TargetLaw> half_normal(double sigma) {
  require_positive(sigma, "half-normal scale");
  return std::make_unique<HalfNormal>(sigma);
}

std::unique_ptr<TargetLaw> tabulated(std::vector<double> x, std::vector<double> cdf, std::string name) {
  return std::make_unique<Tabulated>(std::move(x), std::move(cdf), std::move(name));
}

std::unique_ptr<TargetLaw> parse_law(const std::string& spec) {
  const auto colon = spec.find(':');
  if (colon == std::string::npos) throw ConfigError("law '" + spec + "': expected family:args");
  const std::string family = spec.substr(0, colon);
  const std::string body = spec.substr(colon + 1);
  if (family == "exp") return exponential(numbers(spec, body, 1)[0]);
  if (family == "uniform") {
    const auto p = numbers(spec, body, 2);
    return uniform(p[0], p[1]);
  }
  if (family == "weibull") {
    const auto p = numbers(spec, body, 2);
    return weibull(p[0], p[1]);
  }
  if (family == "halfnormal") return half_normal(numbers(spec, body, 1)[0]);
  if (family == "csv") {
    auto t = read_two_column_csv(body);
    return tabulated(std::move(t.first), std::move(t.second), spec);
  }
  throw ConfigError("unknown law family '" + family + "'");
}

}  // namespace sigmalab::law
