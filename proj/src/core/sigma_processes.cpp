// SPDX-License-Identifier: Apache-2.0
#include "sigma_processes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace sigmalab::sigma {

namespace {

void require_driver(const TimeGrid& grid, std::span<const double> n) {
  if (n.size() != grid.n_points()) throw std::invalid_argument("driver length does not match grid");
  if (n.front() != 0.0) throw std::invalid_argument("driver must start at 0");
}

int sign_of(double v) noexcept { return (v > 0.0) - (v < 0.0); }

}  // namespace

SigmaPath reflect_from_driver(const TimeGrid& grid, std::span<const double> n) {
  require_driver(grid, n);
  SigmaPath s{grid, std::vector<double>(n.size()), std::vector<double>(n.size()), std::vector<double>(n.size())};
  double running = 0.0;
  for (std::size_t k = 0; k < n.size(); ++k) {
    running = std::max(running, n[k]);
    s.a[k] = running;
    s.m[k] = -n[k];
    s.x[k] = running + s.m[k];
  }
  return s;
}

double bridge_maximum(double a, double b, double h, double uniform) noexcept {
  const double d = b - a;
  return 0.5 * (a + b + std::sqrt(d * d - 2.0 * h * std::log(uniform)));
}

double bridge_crossing_probability(double a, double b, double level, double h) noexcept {
  if (a <= level || b <= level) return 1.0;
  return std::exp(-2.0 * (a - level) * (b - level) / h);
}

SigmaPath reflect_with_bridge_max(const TimeGrid& grid, std::span<const double> n,
                                  const CounterRng& bridge_uniforms) {
  require_driver(grid, n);
  SigmaPath s{grid, std::vector<double>(n.size()), std::vector<double>(n.size()), std::vector<double>(n.size())};
  double running = 0.0;
  for (std::size_t k = 1; k < n.size(); ++k) {
    const double top = bridge_maximum(n[k - 1], n[k], grid.dt(), bridge_uniforms.uniform(k - 1));
    running = std::max(running, top);
    s.a[k] = running;
    s.m[k] = -n[k];
    s.x[k] = running + s.m[k];
  }
  return s;
}

std::optional<std::size_t> last_zero_before(std::span<const double> x, std::size_t k, double band) {
  if (k >= x.size()) throw std::out_of_range("last_zero_before: index outside grid");
  for (std::size_t j = k + 1; j-- > 0;) {
    if (std::fabs(x[j]) <= band) return j;
  }
  return std::nullopt;
}

std::vector<std::size_t> last_zero_indices(std::span<const double> x, double band) {
  std::vector<std::size_t> g(x.size(), 0);
  std::size_t last = 0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    if (std::fabs(x[k]) <= band) {
      last = k;
    } else if (k > 0 && std::fabs(x[k - 1]) > band && sign_of(x[k - 1]) * sign_of(x[k]) < 0) {
      last = k - 1;
    }
    g[k] = last;
  }
  return g;
}

std::vector<double> balayage(std::span<const double> x, std::span<const double> k_values,
                             double band, double bound) {
  if (k_values.size() != x.size()) throw std::invalid_argument("balayage: K length does not match path");
  for (double kv : k_values) {
    if (!(std::fabs(kv) <= bound)) throw std::invalid_argument("balayage: K exceeds the configured bound");
  }
  const auto g = last_zero_indices(x, band);
  std::vector<double> y(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) y[k] = k_values[g[k]] * x[k];
  return y;
}

SigmaPath balayage(const SigmaPath& s, std::span<const double> k_values, double band, double bound) {
  const auto y = balayage(s.x, k_values, band, bound);
  // A zero of X inside step k shows up as an increase of A.
  std::vector<std::size_t> g(s.x.size(), 0);
  for (std::size_t k = 1; k < s.x.size(); ++k) {
    g[k] = (std::fabs(s.x[k]) <= band || s.a[k] > s.a[k - 1]) ? k : g[k - 1];
  }
  SigmaPath out{s.grid, std::vector<double>(y.size()), std::vector<double>(y.size()), std::vector<double>(y.size())};
  out.m[0] = k_values[0] * s.m[0];
  out.a[0] = k_values[0] * s.a[0];
  out.x = y;
  for (std::size_t k = 1; k < y.size(); ++k) {
    const double kg = k_values[g[k - 1]];
    out.m[k] = out.m[k - 1] + kg * (s.m[k] - s.m[k - 1]);
    const double da = s.a[k] - s.a[k - 1];
    out.a[k] = da == 0.0 ? out.a[k - 1] : out.a[k - 1] + kg * da;
  }
  return out;
}

SignBalayage sign_balayage(const SignedPath& path) {
  const auto& x = path.x;
  if (x.empty() || x.front() != 0.0) throw std::invalid_argument("sign_balayage: path must start at 0");
  SignBalayage out{std::vector<int>(x.size(), 0), std::vector<double>(x.size(), 0.0)};
  // K_{g_k} is the sign of the excursion that starts right after g_k; excursions are
  // separated by exact zeros and by sign changes between neighbouring grid points.
  const auto g = last_zero_indices(x, 0.0);
  for (std::size_t k = 0; k < x.size(); ++k) {
    out.k_at_g[k] = x[k] == 0.0 ? 0 : sign_of(x[g[k] + 1]);
    out.reconstruction[k] = static_cast<double>(out.k_at_g[k]) * std::fabs(x[k]);
  }
  return out;
}

std::vector<double> local_time_estimate(const SignedPath& path, double level) {
  const auto& x = path.x;
  std::vector<double> l(x.size(), 0.0);
  if (x.empty()) return l;
  const double base = std::fabs(x[0] - level);
  double stochastic = 0.0;
  for (std::size_t k = 1; k < x.size(); ++k) {
    stochastic += sign_of(x[k - 1] - level) * (x[k] - x[k - 1]);
    l[k] = std::fabs(x[k] - level) - base - stochastic;
  }
  return l;
}

std::vector<double> occupation_local_time(const SignedPath& path, double level, double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("occupation_local_time: eps must be positive");
  const auto& x = path.x;
  std::vector<double> l(x.size(), 0.0);
  const double scale = path.grid.dt() / (2.0 * eps);
  for (std::size_t k = 1; k < x.size(); ++k) {
    l[k] = l[k - 1] + (std::fabs(x[k - 1] - level) <= eps ? scale : 0.0);
  }
  return l;
}

StoppedPath stop_at_level(const SigmaPath& s, double level) {
  if (!(level > 0.0)) throw std::invalid_argument("stop_at_level: level must be positive");
  StoppedPath out{s, std::nullopt, false};
  std::size_t stop = s.x.size();
  for (std::size_t k = 0; k < s.x.size(); ++k) {
    if (s.x[k] >= level) {
      stop = k;
      break;
    }
  }
  if (stop == s.x.size()) {
    out.truncated = true;
    return out;
  }
  out.stop_index = stop;
  const double a_stop = s.a[stop];
  // Pick M so that M + A reproduces the clamped level exactly whenever possible.
  double m_stop = level - a_stop;
  for (int tries = 0; tries < 4 && m_stop + a_stop != level; ++tries) {
    m_stop = std::nextafter(m_stop, m_stop + a_stop < level ? std::numeric_limits<double>::infinity()
                                                            : -std::numeric_limits<double>::infinity());
  }
  for (std::size_t k = stop; k < s.x.size(); ++k) {
    out.path.x[k] = level;
    out.path.a[k] = a_stop;
    out.path.m[k] = m_stop;
  }
  return out;
}

ConformanceReport sigma_class_check(const SigmaPath& s, double zero_band, double tol,
                                    std::span<const std::size_t> extra_carrier, double additivity_tol) {
  ConformanceReport r;
  const std::size_t n = s.x.size();
  if (s.m.size() != n || s.a.size() != n) throw std::invalid_argument("sigma_class_check: ragged path");
  std::vector<char> carrier(n, 0);
  for (std::size_t k = 0; k < n; ++k) carrier[k] = std::fabs(s.x[k]) <= zero_band;
  for (std::size_t idx : extra_carrier) {
    if (idx < n) carrier[idx] = 1;
  }
  for (std::size_t k = 0; k < n; ++k) {
    r.additivity_defect = std::max(r.additivity_defect, std::fabs(s.x[k] - (s.m[k] + s.a[k])));
    if (k == 0) continue;
    const double da = s.a[k] - s.a[k - 1];
    if (da == 0.0) continue;
    r.total_variation += std::fabs(da);
    if (da < 0.0) r.monotonicity_defect += -da;
    if (!carrier[k] && !carrier[k - 1]) r.offending_mass += std::fabs(da);
  }
  r.start_defect = n > 0 ? std::fabs(s.a[0]) : 0.0;
  r.pass = r.offending_mass <= tol * r.total_variation && r.start_defect == 0.0 &&
           r.additivity_defect <= additivity_tol;
  return r;
}

}  // namespace sigmalab::sigma
