// SPDX-License-Identifier: Apache-2.0
#include "functionals.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numeric>
#include <stdexcept>

#include "errors.hpp"
#include "grid_rng.hpp"
#include "parallel.hpp"
#include "table_io.hpp"

namespace sigmalab::fn {

std::int64_t default_cells(double x_max) {
  return std::max<std::int64_t>(2, static_cast<std::int64_t>(std::ceil(1e4 * x_max)));
}

namespace {

double checked(const ScalarFn& f, double z) {
  const double v = f(z);
  if (!std::isfinite(v)) throw std::domain_error("non-finite integrand at z = " + format_double(z));
  return v;
}

// Cell integrals of f on a uniform partition of [0, x_max].
std::vector<double> cell_integrals(const ScalarFn& f, double x_max, std::int64_t cells,
                                   const std::optional<PowerSingularity>& sing) {
  const double h = x_max / static_cast<double>(cells);
  std::vector<double> out(static_cast<std::size_t>(cells));
  for (std::int64_t i = 0; i < cells; ++i) {
    const double lo = h * static_cast<double>(i);
    const double hi = i + 1 == cells ? x_max : h * static_cast<double>(i + 1);
    const double mid = 0.5 * (lo + hi);
    if (sing) {
      const double alpha = sing->alpha;
      const double r = checked(f, mid) * std::pow(mid, alpha);
      const double e = 1.0 - alpha;
      out[static_cast<std::size_t>(i)] = r * (std::pow(hi, e) - std::pow(lo, e)) / e;
    } else {
      out[static_cast<std::size_t>(i)] = checked(f, mid) * (hi - lo);
    }
  }
  return out;
}

double total(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s;
}

}  // namespace

MonotoneFn primitive(const ScalarFn& f, double x_max, std::int64_t n_quad, std::optional<PowerSingularity> sing) {
  if (!(x_max > 0.0) || !std::isfinite(x_max)) throw std::invalid_argument("primitive: x_max must be positive");
  if (n_quad == 0) n_quad = default_cells(x_max);
  if (n_quad < 2) throw std::invalid_argument("primitive: n_quad must be at least 2");
  if (sing && !(sing->alpha > 0.0 && sing->alpha < 1.0))
    throw std::invalid_argument("primitive: singularity exponent must lie in (0, 1)");

  const auto cells = cell_integrals(f, x_max, n_quad, sing);
  std::vector<double> knots(cells.size() + 1);
  std::vector<double> values(cells.size() + 1, 0.0);
  const double h = x_max / static_cast<double>(n_quad);
  for (std::size_t i = 0; i < cells.size(); ++i) {
    knots[i + 1] = i + 1 == cells.size() ? x_max : h * static_cast<double>(i + 1);
    values[i + 1] = values[i] + cells[i];
  }
  const double coarse = total(cell_integrals(f, x_max, std::max<std::int64_t>(1, n_quad / 2), sing));
  const double err = std::fabs(values.back() - coarse) / 3.0;
  return MonotoneFn(std::move(knots), std::move(values), err);
}

namespace {

std::vector<double> parse_args(const std::string& spec, const std::string& body, std::size_t expected) {
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= body.size()) {
    const auto comma = body.find(',', start);
    const std::string tok = body.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(tok, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != tok.size() || !std::isfinite(v))
      throw ConfigError("function '" + spec + "': bad numeric argument '" + tok + "'");
    out.push_back(v);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  if (out.size() != expected)
    throw ConfigError("function '" + spec + "': expected " + std::to_string(expected) + " argument(s)");
  return out;
}

}  // namespace

NamedFn parse_function(const std::string& spec) {
  const auto colon = spec.find(':');
  if (colon == std::string::npos) throw ConfigError("function '" + spec + "': expected family:args");
  const std::string family = spec.substr(0, colon);
  const std::string body = spec.substr(colon + 1);
  NamedFn out{spec, {}, std::nullopt};
  if (family == "const") {
    const double c = parse_args(spec, body, 1)[0];
    out.f = [c](double) { return c; };
  } else if (family == "affine") {
    const auto p = parse_args(spec, body, 2);
    out.f = [a = p[0], b = p[1]](double z) { return a + b * z; };
  } else if (family == "exp_decay") {
    const double l = parse_args(spec, body, 1)[0];
    out.f = [l](double z) { return std::exp(-l * z); };
  } else if (family == "power") {
    const double p = parse_args(spec, body, 1)[0];
    if (p <= -1.0) throw ConfigError("function '" + spec + "': exponent must exceed -1");
    out.f = [p](double z) { return std::pow(z, p); };
    if (p < 0.0) out.singularity = PowerSingularity{-p};
  } else if (family == "csv") {
    auto t = read_two_column_csv(body);
    for (std::size_t i = 1; i < t.first.size(); ++i) {
      if (!(t.first[i] > t.first[i - 1])) throw MonotonicityError("function table x must be increasing", i);
    }
    auto table = std::make_shared<TwoColumnTable>(std::move(t));
    out.f = [table](double z) {
      const auto& xs = table->first;
      const auto& ys = table->second;
      if (z <= xs.front()) return ys.front();
      if (z >= xs.back()) return ys.back();
      const auto i = static_cast<std::size_t>(std::upper_bound(xs.begin(), xs.end(), z) - xs.begin());
      const double w = (z - xs[i - 1]) / (xs[i] - xs[i - 1]);
      return ys[i - 1] + w * (ys[i] - ys[i - 1]);
    };
  } else {
    throw ConfigError("unknown function family '" + family + "'");
  }
  return out;
}

std::vector<double> azema_yor_transform(const sigma::SigmaPath& s, const ScalarFn& f, const MonotoneFn& F) {
  std::vector<double> w(s.x.size());
  for (std::size_t k = 0; k < w.size(); ++k) w[k] = F(s.a[k]) - f(s.a[k]) * s.x[k];
  return w;
}

double running_max_identity_check(std::span<const double> w, const MonotoneFn& F, std::span<const double> a) {
  if (w.size() != a.size()) throw std::invalid_argument("running_max_identity_check: length mismatch");
  double top = -std::numeric_limits<double>::infinity();
  double defect = 0.0;
  for (std::size_t k = 0; k < w.size(); ++k) {
    top = std::max(top, w[k]);
    defect = std::max(defect, std::fabs(top - F(a[k])));
  }
  return defect;
}

MonotoneFn composed_primitive(const ScalarFn& f, const ScalarFn& g, const MonotoneFn& F, double x_max,
                              std::int64_t n_quad) {
  return primitive([&](double z) { return f(z) * g(F(z)); }, x_max, n_quad);
}

CompositionResult composition_check(const sigma::SigmaPath& s, const ScalarFn& f, const ScalarFn& g,
                                    const MonotoneFn& F, const MonotoneFn& G, const MonotoneFn& GF) {
  CompositionResult r;
  double g_sup = 0.0;
  for (std::size_t k = 0; k < s.x.size(); ++k) {
    const double a = s.a[k];
    const double fa = f(a);
    const double Fa = F(a);
    const double gFa = g(Fa);
    g_sup = std::max(g_sup, std::fabs(gFa));
    const double lhs = G(Fa) - gFa * (fa * s.x[k]);
    const double rhs = GF(a) - fa * gFa * s.x[k];
    r.defect = std::max(r.defect, std::fabs(lhs - rhs));
  }
  r.tolerance = G.error_bound() + GF.error_bound() + g_sup * F.error_bound();
  return r;
}

BachelierClock bachelier_clock(const ScalarFn& phi, double v_needed, double y_max, double cells_per_unit) {
  if (!(y_max > 0.0)) throw std::invalid_argument("bachelier_clock: y_max must be positive");
  const auto inv = [&](double y) {
    const double p = phi(y);
    if (!(p > 0.0)) throw std::domain_error("bachelier: phi must be positive, got " + format_double(p) +
                                            " at y = " + format_double(y));
    return 1.0 / p;
  };
  for (int doubling = 0;; ++doubling) {
    const auto cells = std::max<std::int64_t>(2, static_cast<std::int64_t>(std::ceil(cells_per_unit * y_max)));
    MonotoneFn v = primitive(inv, y_max, cells);
    if (v.value_max() >= v_needed) return {std::move(v), true};
    if (doubling == 40) return {std::move(v), false};
    y_max *= 2.0;
  }
}

BachelierSolution bachelier_solve(std::span<const double> n, const ScalarFn& phi, const MonotoneFn& clock) {
  if (n.empty() || n.front() != 0.0) throw std::invalid_argument("bachelier_solve: driver must start at 0");
  const std::size_t len = n.size();
  BachelierSolution s{std::vector<double>(len), std::vector<double>(len), std::vector<double>(len), false, 0.0};
  double running = 0.0;
  double y = 0.0;
  double y_bar = 0.0;
  double closed_bar = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < len; ++k) {
    running = std::max(running, n[k]);
    s.a[k] = running;
    if (k > 0) {
      y += phi(y_bar) * (n[k] - n[k - 1]);
    }
    y_bar = std::max(y_bar, y);
    s.y_euler[k] = y;
    if (!clock.inverse_covers(running)) s.clamped = true;
    const double u = clock.inverse(running);
    s.y_closed[k] = u - phi(u) * (running - n[k]);
    closed_bar = std::max(closed_bar, s.y_closed[k]);
    s.max_identity_defect = std::max(s.max_identity_defect, std::fabs(closed_bar - u));
  }
  return s;
}

BachelierSolution bachelier_solve(std::span<const double> n, const ScalarFn& phi) {
  double top = 0.0;
  for (double v : n) top = std::max(top, v);
  const auto clock = bachelier_clock(phi, top);
  return bachelier_solve(n, phi, clock.v);
}

RefinementLadder bachelier_refinement(const ScalarFn& phi, std::span<const double> dts, double t_max,
                                      std::size_t n_paths, std::uint64_t seed, unsigned threads) {
  if (dts.empty()) throw ConfigError("bachelier: at least one dt is required");
  if (n_paths == 0) throw ConfigError("bachelier: n_paths must be positive");
  const double fine = *std::min_element(dts.begin(), dts.end());
  if (!(fine > 0.0)) throw ConfigError("bachelier: dt values must be positive");
  std::vector<std::int64_t> strides;
  for (double dt : dts) {
    const double ratio = dt / fine;
    const auto stride = static_cast<std::int64_t>(std::llround(ratio));
    if (std::fabs(ratio - static_cast<double>(stride)) > 1e-9 * ratio)
      throw ConfigError("bachelier: every dt must be an integer multiple of the smallest (" + format_double(dt) + ")");
    strides.push_back(stride);
  }
  std::int64_t lcm = 1;
  for (auto s : strides) lcm = std::lcm(lcm, s);
  const auto fine_steps = std::max<std::int64_t>(lcm, lcm * std::llround(t_max / (fine * static_cast<double>(lcm))));
  const TimeGrid grid(fine, fine_steps);

  struct PathResult {
    std::vector<double> err;
    bool clamped = false;
  };
  const auto path_of = [&](std::size_t i) {
    return cumulate(gaussian_increments(PathSeed{seed, i, stream::driver}, grid));
  };
  const auto tops = parallel_map(n_paths, threads, [&](std::size_t i) {
    const auto path = path_of(i);
    return *std::max_element(path.begin(), path.end());
  });
  const auto clock = bachelier_clock(phi, *std::max_element(tops.begin(), tops.end()));
  const auto per_path = parallel_map(n_paths, threads, [&](std::size_t i) {
    const auto path = path_of(i);
    PathResult r;
    r.clamped = !clock.reached;
    for (auto stride : strides) {
      std::vector<double> coarse;
      coarse.reserve(path.size() / static_cast<std::size_t>(stride) + 1);
      for (std::size_t k = 0; k < path.size(); k += static_cast<std::size_t>(stride)) coarse.push_back(path[k]);
      const auto sol = bachelier_solve(coarse, phi, clock.v);
      double e = 0.0;
      for (std::size_t k = 0; k < coarse.size(); ++k) e = std::max(e, std::fabs(sol.y_euler[k] - sol.y_closed[k]));
      r.err.push_back(e);
      r.clamped = r.clamped || sol.clamped;
    }
    return r;
  });

  RefinementLadder out;
  out.dts.assign(dts.begin(), dts.end());
  out.errors.assign(dts.size(), std::vector<double>(n_paths));
  for (std::size_t i = 0; i < n_paths; ++i) {
    for (std::size_t l = 0; l < dts.size(); ++l) out.errors[l][i] = per_path[i].err[l];
    out.clamped = out.clamped || per_path[i].clamped;
  }
  for (std::size_t l = 0; l + 1 < dts.size(); ++l) {
    std::vector<double> ratios;
    for (std::size_t i = 0; i < n_paths; ++i) {
      if (out.errors[l][i] > 0.0) ratios.push_back(out.errors[l + 1][i] / out.errors[l][i]);
    }
    if (ratios.empty()) {
      out.median_ratio.push_back(std::numeric_limits<double>::quiet_NaN());
      continue;
    }
    const auto mid = ratios.begin() + static_cast<std::ptrdiff_t>(ratios.size() / 2);
    std::nth_element(ratios.begin(), mid, ratios.end());
    double med = *mid;
    if (ratios.size() % 2 == 0) med = 0.5 * (med + *std::max_element(ratios.begin(), mid));
    out.median_ratio.push_back(med);
  }
  return out;
}

}  // namespace sigmalab::fn
