// SPDX-License-Identifier: Apache-2.0
#include "embedding.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "errors.hpp"
#include "mc_stats.hpp"
#include "parallel.hpp"
#include "table_io.hpp"

namespace sigmalab::embed {

double PsiFunction::operator()(double x) const {
  if (x >= b_nu) return std::numeric_limits<double>::infinity();
  if (x <= a_nu) return 0.0;
  return table(x);
}

PsiFunction psi(const law::TargetLaw& law, std::int64_t n_quad) {
  PsiFunction out;
  out.a_nu = law.lower();
  out.b_nu = law.upper();
  const double x_hi = law.quantile(1.0 - kTailCut);
  if (!(x_hi > out.a_nu)) throw std::invalid_argument("psi: law has no mass above its lower support bound");
  if (n_quad == 0) n_quad = std::max<std::int64_t>(10000, static_cast<std::int64_t>(std::ceil(1e4 * (x_hi - out.a_nu))));
  const double h = (x_hi - out.a_nu) / static_cast<double>(n_quad);
  std::vector<double> knots{out.a_nu};
  std::vector<double> values{0.0};
  knots.reserve(static_cast<std::size_t>(n_quad) + 1);
  values.reserve(static_cast<std::size_t>(n_quad) + 1);
  double l_prev = law.log_tail_neg(out.a_nu);
  for (std::int64_t i = 1; i <= n_quad; ++i) {
    const double x = i == n_quad ? x_hi : out.a_nu + h * static_cast<double>(i);
    const double l = law.log_tail_neg(x);
    if (!std::isfinite(l)) break;  // tail vanished: keep the last reliable knot
    const double mid = x - 0.5 * (x - knots.back());
    knots.push_back(x);
    values.push_back(values.back() + mid * (l - l_prev));
    l_prev = l;
  }
  if (knots.size() < 2) throw std::invalid_argument("psi: tail vanishes immediately above the lower bound");
  out.x_hi = knots.back();
  out.table = MonotoneFn(std::move(knots), std::move(values));
  return out;
}

MonotoneFn phi_from_psi(const MonotoneFn& psi) {
  if (!psi.is_monotone()) throw std::invalid_argument("phi_from_psi: psi table is not monotone");
  const auto xs = psi.knots();
  const auto zs = psi.values();
  std::vector<double> z;
  std::vector<double> x;
  for (std::size_t i = 0; i < zs.size(); ++i) {
    // Flat stretches of psi collapse to their right end (right-continuous inverse).
    if (!z.empty() && zs[i] == z.back()) {
      x.back() = xs[i];
      continue;
    }
    z.push_back(zs[i]);
    x.push_back(xs[i]);
  }
  if (z.size() < 2) throw std::invalid_argument("phi_from_psi: psi is constant");
  return MonotoneFn(std::move(z), std::move(x));
}

MonotoneFn phi_from_psi(const PsiFunction& psi) { return phi_from_psi(psi.table); }

MonotoneFn clock_integral(const MonotoneFn& phi) {
  const auto z = phi.knots();
  std::vector<double> knots(z.begin(), z.end());
  std::vector<double> values(z.size(), 0.0);
  for (std::size_t i = 1; i < z.size(); ++i) {
    const double p = phi(0.5 * (z[i - 1] + z[i]));
    values[i] = values[i - 1] + (z[i] - z[i - 1]) / p;
  }
  return MonotoneFn(std::move(knots), std::move(values));
}

namespace {

stop::StoppingOutcome stored_stop(const sigma::SigmaPath& path, const std::function<bool(double, double)>& hit) {
  stop::StoppingOutcome out;
  // t = 0 is excluded: X_0 = 0 would meet a barrier that vanishes at A = 0.
  for (std::size_t k = 1; k < path.x.size(); ++k) {
    if (hit(path.x[k], path.a[k])) {
      out.stop_index = static_cast<std::int64_t>(k);
      out.x_at_stop = out.x_grid = path.x[k];
      out.a_at_stop = path.a[k];
      out.elapsed = path.grid.time(static_cast<std::int64_t>(k));
      return out;
    }
  }
  out.truncated = true;
  out.x_at_stop = out.x_grid = path.x.back();
  out.a_at_stop = path.a.back();
  out.elapsed = path.grid.t_max();
  return out;
}

}  // namespace

stop::StoppingOutcome stop_T_phi(const sigma::SigmaPath& path, const std::function<double(double)>& barrier) {
  return stored_stop(path, [&](double x, double a) { return x >= barrier(a); });
}

stop::StoppingOutcome stop_R_h(const sigma::SigmaPath& path, const std::function<double(double)>& h) {
  return stored_stop(path, [&](double x, double a) { return h(a) * x >= 1.0; });
}

namespace {

double weighted_fraction(const std::vector<stop::StoppingOutcome>& outcomes, const std::vector<double>& w) {
  double total = 0.0;
  double bad = 0.0;
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    total += w[i];
    if (outcomes[i].truncated) bad += w[i];
  }
  return total > 0.0 ? bad / total : 0.0;
}

}  // namespace

EmbedResult embed(const measure::WeightedEnsemble& ensemble, const law::TargetLaw& law, const EmbedOptions& opt) {
  EmbedResult r;
  r.law = law.name();
  r.t_max = ensemble.grid.t_max();
  const std::size_t n = ensemble.size();
  r.low_power = n < opt.low_power_below;

  const auto phi = phi_from_psi(psi(law, opt.n_quad));
  const double phi_top = phi.upper();
  const auto barrier = [&phi](double a) { return phi(a); };

  std::vector<stop::StoppingOutcome> outcomes(n);
  if (ensemble.grid.n_steps() < 2) {
    for (auto& o : outcomes) o.truncated = true;
    r.diagnostic = "degenerate grid: a single time step cannot resolve any stopping time";
  } else {
    outcomes = parallel_map(n, opt.threads, [&](std::size_t i) {
      return stop::scan_first_crossing(ensemble.driver_seed(i), ensemble.grid,
                                       static_cast<std::int64_t>(ensemble.records[i].g_bar_index), barrier, opt.scan);
    });
    r.truncated_fraction = weighted_fraction(outcomes, ensemble.weights);
    if (r.truncated_fraction >= opt.truncation_budget && opt.escalate) {
      const TimeGrid longer(ensemble.grid.dt(), ensemble.grid.n_steps() * 4);
      std::vector<std::size_t> redo;
      for (std::size_t i = 0; i < n; ++i) {
        if (outcomes[i].truncated) redo.push_back(i);
      }
      const auto again = parallel_map(redo.size(), opt.threads, [&](std::size_t j) {
        const std::size_t i = redo[j];
        return stop::scan_first_crossing(ensemble.driver_seed(i), longer,
                                         static_cast<std::int64_t>(ensemble.records[i].g_bar_index), barrier,
                                         opt.scan);
      });
      for (std::size_t j = 0; j < redo.size(); ++j) outcomes[redo[j]] = again[j];
      r.escalated = true;
      r.t_max = longer.t_max();
    }
  }
  r.truncated_fraction = weighted_fraction(outcomes, ensemble.weights);
  r.truncation_failed = r.truncated_fraction >= opt.truncation_budget;
  if (r.truncation_failed && r.diagnostic.empty()) {
    r.diagnostic = "weighted truncated fraction " + format_double(r.truncated_fraction) + " exceeds budget " +
                   format_double(opt.truncation_budget) + " at t_max " + format_double(r.t_max);
  }

  r.samples.resize(n);
  std::vector<double> xs;
  std::vector<double> ws;
  std::vector<double> d_phi;
  std::vector<double> d_inv;
  std::vector<double> w_inv;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& o = outcomes[i];
    auto& s = r.samples[i];
    s.weight = ensemble.weights[i];
    s.truncated = o.truncated;
    s.x = o.x_at_stop;
    s.a = o.a_at_stop;
    s.x_grid = o.x_grid;
    s.beyond_table = !o.truncated && o.a_at_stop > phi_top;
    if (s.beyond_table) ++r.beyond_table;
    if (o.truncated) continue;
    xs.push_back(s.x);
    ws.push_back(s.weight);
    const double p = phi(s.a);
    d_phi.push_back(std::fabs(s.x_grid - p));
    if (p > 0.0) {
      d_inv.push_back(std::fabs(s.x_grid - 1.0 / p));
      w_inv.push_back(s.weight);
    }
  }

  const double slack = 5.0 * std::sqrt(ensemble.grid.dt());
  if (!xs.empty()) {
    r.ks = stats::ks_weighted(xs, ws, [&law](double x) { return law.cdf(x); });
    r.support_low = *std::min_element(xs.begin(), xs.end());
    r.support_high = *std::max_element(xs.begin(), xs.end());
    r.support_ok = r.support_low >= law.lower() - slack && r.support_high <= law.upper() + slack;
    r.defect_phi = stats::weighted_mean_se(d_phi, ws).mean;
    r.defect_inverse = w_inv.empty() ? std::numeric_limits<double>::infinity()
                                     : stats::weighted_mean_se(d_inv, w_inv).mean;
    r.supported_identity = r.defect_phi <= r.defect_inverse ? "X_T = phi(A_T)" : "X_T = 1/phi(A_T)";
  }
  r.pass = !r.low_power && !r.truncation_failed && !xs.empty() && r.ks < opt.ks_threshold && r.support_ok;
  return r;
}

CrossingEstimate crossing_probability(const measure::WeightedEnsemble& ensemble,
                                      const std::function<double(double)>& barrier, double u,
                                      const stop::ScanOptions& scan, unsigned threads) {
  if (!(u > 0.0)) throw std::invalid_argument("crossing_probability: u must be positive");
  stop::ScanOptions opt = scan;
  opt.a_cap = u;
  const auto outcomes = parallel_map(ensemble.size(), threads, [&](std::size_t i) {
    return stop::scan_first_crossing(ensemble.driver_seed(i), ensemble.grid,
                                     static_cast<std::int64_t>(ensemble.records[i].g_bar_index), barrier, opt);
  });
  CrossingEstimate c;
  std::vector<double> ind;
  std::vector<double> w;
  double total = 0.0;
  double trunc = 0.0;
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    total += ensemble.weights[i];
    if (outcomes[i].truncated) {
      ++c.truncated;
      trunc += ensemble.weights[i];
      continue;
    }
    const bool crossed = outcomes[i].stop_index.has_value();
    c.crossed += crossed;
    c.capped += outcomes[i].capped;
    ind.push_back(crossed ? 1.0 : 0.0);
    w.push_back(ensemble.weights[i]);
  }
  c.truncated_fraction = total > 0.0 ? trunc / total : 0.0;
  if (!ind.empty()) {
    const auto m = stats::weighted_mean_se(ind, w);
    c.estimate = m.mean;
    c.se = m.se;
  }
  return c;
}

double LambdaFit::lambda_at(double x) const {
  if (bins.empty()) return std::numeric_limits<double>::quiet_NaN();
  if (x <= bins.front().a_mean) return bins.front().lambda;
  if (x >= bins.back().a_mean) return bins.back().lambda;
  for (std::size_t i = 1; i < bins.size(); ++i) {
    if (x <= bins[i].a_mean) {
      const double span = bins[i].a_mean - bins[i - 1].a_mean;
      if (!(span > 0.0)) return bins[i].lambda;
      const double w = (x - bins[i - 1].a_mean) / span;
      return bins[i - 1].lambda + w * (bins[i].lambda - bins[i - 1].lambda);
    }
  }
  return bins.back().lambda;
}

double LambdaFit::tail(double x) const {
  if (curve_x.empty()) return std::numeric_limits<double>::quiet_NaN();
  if (x <= curve_x.front()) return 1.0;
  if (x >= curve_x.back()) return curve_tail.back();
  const auto i = static_cast<std::size_t>(std::upper_bound(curve_x.begin(), curve_x.end(), x) - curve_x.begin());
  const double w = (x - curve_x[i - 1]) / (curve_x[i] - curve_x[i - 1]);
  return curve_tail[i - 1] + w * (curve_tail[i] - curve_tail[i - 1]);
}

LambdaFit conditional_lambda(std::span<const double> a_values, std::span<const double> x_values,
                             std::span<const double> weights, std::size_t n_bins) {
  if (n_bins < 5) throw std::invalid_argument("conditional_lambda: need at least 5 bins");
  if (a_values.size() != x_values.size() || a_values.size() != weights.size())
    throw std::invalid_argument("conditional_lambda: length mismatch");
  if (a_values.empty()) throw std::invalid_argument("conditional_lambda: empty sample");
  for (std::size_t i = 0; i < a_values.size(); ++i) {
    if (!std::isfinite(a_values[i]) || !std::isfinite(x_values[i]))
      throw std::invalid_argument("conditional_lambda: non-finite sample");
  }
  std::vector<std::size_t> order(a_values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return a_values[i] < a_values[j]; });
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (!(total > 0.0)) throw std::invalid_argument("conditional_lambda: weights sum to zero");

  std::vector<std::vector<std::size_t>> members(n_bins);
  double before = 0.0;
  for (std::size_t idx : order) {
    const auto b = std::min(n_bins - 1, static_cast<std::size_t>(before / total * static_cast<double>(n_bins)));
    members[b].push_back(idx);
    before += weights[idx];
  }
  LambdaFit fit;
  std::vector<double> xv;
  std::vector<double> wv;
  std::vector<double> av;
  for (const auto& m : members) {
    if (m.empty()) {
      ++fit.empty_bins;
      continue;
    }
    xv.clear();
    wv.clear();
    av.clear();
    for (std::size_t idx : m) {
      xv.push_back(x_values[idx]);
      wv.push_back(weights[idx]);
      av.push_back(a_values[idx]);
    }
    const auto lam = stats::weighted_mean_se(xv, wv);
    LambdaBin bin;
    bin.a_low = a_values[m.front()];
    bin.a_high = a_values[m.back()];
    bin.a_mean = stats::weighted_mean_se(av, wv).mean;
    bin.lambda = lam.mean;
    bin.se = lam.se;
    bin.mass = std::accumulate(wv.begin(), wv.end(), 0.0) / total;
    bin.count = m.size();
    fit.bins.push_back(bin);
  }

  const double top = a_values[order.back()];
  const std::size_t points = 4000;
  fit.curve_x.resize(points + 1);
  fit.curve_tail.resize(points + 1);
  double integral = 0.0;
  double prev_inv = 0.0;
  for (std::size_t i = 0; i <= points; ++i) {
    const double x = top * static_cast<double>(i) / static_cast<double>(points);
    const double lam = fit.lambda_at(x);
    const double inv = lam > 0.0 ? 1.0 / lam : std::numeric_limits<double>::infinity();
    if (i > 0) integral += 0.5 * (inv + prev_inv) * (x - fit.curve_x[i - 1]);
    prev_inv = inv;
    fit.curve_x[i] = x;
    fit.curve_tail[i] = std::exp(-integral);
  }
  if (!(top > 0.0)) {
    fit.curve_x = {0.0, 1.0};
    fit.curve_tail = {1.0, 1.0};
  }
  return fit;
}

}  // namespace sigmalab::embed
