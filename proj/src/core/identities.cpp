// SPDX-License-Identifier: Apache-2.0
#include "identities.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "embedding.hpp"
#include "errors.hpp"
#include "functionals.hpp"
#include "parallel.hpp"
#include "stopping.hpp"
#include "table_io.hpp"
#include "target_law.hpp"

namespace sigmalab {

nlohmann::ordered_json IdentityParams::to_json() const {
  nlohmann::ordered_json j;
  j["seed"] = seed;
  j["n_paths"] = n_paths;
  j["dt"] = dt;
  j["t_max"] = t_max;
  j["density"] = {{"model", density.name()}, {"d0", density.d0}, {"t_stop", density.t_stop}};
  j["driver"] = "brownian";
  j["bridge_correction"] = bridge;
  j["truncation_budget"] = truncation_budget;
  j["law"] = law;
  j["phi"] = phi;
  j["u"] = u;
  j["level"] = level;
  j["u0"] = u0;
  j["dts"] = dts;
  j["n_bins"] = n_bins;
  j["passage_dt"] = passage_dt;
  j["eps_g"] = eps_g;
  return j;
}

namespace {

using stats::Check;
using stats::IdentityReport;

constexpr double kSe = 4.0;

stop::ScanOptions scan_options(const IdentityParams& p) {
  stop::ScanOptions o;
  o.bridge_crossing = p.bridge;
  o.refine_threshold = p.bridge ? 4.0 : 0.0;
  return o;
}

measure::WeightedEnsemble ensemble_for(const IdentityParams& p, const measure::DensityModel& model) {
  return measure::build_ensemble(TimeGrid::covering(p.dt, p.t_max), p.seed, p.n_paths, model, p.threads);
}

Check mean_check(std::string name, double estimate, double target, double se, double extra = 0.0) {
  const double tol = kSe * se + extra;
  return {std::move(name), estimate, target, se, tol,
          extra > 0.0 ? "|estimate - target| <= 4 se + eps" : "|estimate - target| <= 4 se",
          std::fabs(estimate - target) <= tol};
}

Check bound_check(std::string name, double value, double bound, std::string rule) {
  return {std::move(name), value, 0.0, 0.0, bound, std::move(rule), value < bound};
}

Check at_most_check(std::string name, double value, double bound, std::string rule) {
  return {std::move(name), value, 0.0, 0.0, bound, std::move(rule), value <= bound};
}

Check no_decided_paths() {
  return {"decided_paths", 0.0, 0.0, 0.0, 0.0, "at least one path decided before the horizon", false};
}

IdentityReport base_report(const std::string& id, const IdentityParams& p) {
  IdentityReport r;
  r.id = id;
  r.statement = identity_info(id).statement;
  r.seed = p.seed;
  r.n_paths = p.n_paths;
  r.dt = p.dt;
  r.t_max = p.t_max;
  r.details["config"] = p.to_json();
  return r;
}

double weighted_quantile(std::span<const double> v, std::span<const double> w, double q) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return v[i] < v[j]; });
  const double total = std::accumulate(w.begin(), w.end(), 0.0);
  double acc = 0.0;
  for (std::size_t i : order) {
    acc += w[i];
    if (acc >= q * total) return v[i];
  }
  return v[order.back()];
}

// ---------------------------------------------------------------------------

IdentityReport run_embed_ks(const std::string& id, const IdentityParams& p) {
  auto r = base_report(id, p);
  const std::vector<std::string> laws =
      p.law.empty() ? std::vector<std::string>{"exp:1", "uniform:0,1"} : std::vector<std::string>{p.law};
  const auto ens = ensemble_for(p, p.density);
  embed::EmbedOptions opt;
  opt.scan = scan_options(p);
  opt.truncation_budget = p.truncation_budget;
  opt.threads = p.threads;
  const double slack = 5.0 * std::sqrt(p.dt);
  for (const auto& spec : laws) {
    const auto law = law::parse_law(spec);
    const auto e = embed::embed(ens, *law, opt);
    const std::string tag = "[" + spec + "]";
    if (e.low_power) {
      r.checks.push_back({"ks" + tag, e.ks, 0.0, 0.0, opt.ks_threshold, "low power: reported, not evaluated", true});
    } else {
      r.checks.push_back(bound_check("ks" + tag, e.ks, opt.ks_threshold, "ks < tolerance"));
    }
    r.checks.push_back(
        bound_check("truncated" + tag, e.truncated_fraction, p.truncation_budget, "weighted truncated fraction < budget"));
    const double excess = std::max({0.0, law->lower() - e.support_low, e.support_high - law->upper()});
    r.checks.push_back(at_most_check("support" + tag, excess, slack, "distance outside [a, b] <= 5 sqrt(dt)"));
    r.truncated_fraction = std::max(r.truncated_fraction, e.truncated_fraction);
    r.truncation_failed = r.truncation_failed || e.truncation_failed;
    r.t_max = std::max(r.t_max, e.t_max);
    r.details[spec] = {{"ks", e.ks},
                       {"low_power", e.low_power},
                       {"truncated_fraction", e.truncated_fraction},
                       {"escalated", e.escalated},
                       {"t_max_used", e.t_max},
                       {"beyond_table", e.beyond_table},
                       {"support_low", e.support_low},
                       {"support_high", e.support_high},
                       {"crossing_value_defect_phi", e.defect_phi},
                       {"crossing_value_defect_inverse", e.defect_inverse},
                       {"supported_identity", e.supported_identity},
                       {"diagnostic", e.diagnostic}};
  }
  return r;
}

IdentityReport run_crossing(const std::string& id, const IdentityParams& p) {
  auto r = base_report(id, p);
  const auto phi = fn::parse_function(p.phi);
  const auto clock = fn::primitive([&](double z) { return 1.0 / phi.f(z); }, p.u);
  const double target = 1.0 - std::exp(-clock.value_max());
  const auto sigma_h = p.density.kind == measure::DensityModel::Kind::brownian_stopped
                           ? p.density
                           : measure::DensityModel::brownian_stopped(1.0, 1.0);
  const std::pair<std::string, measure::DensityModel> scenarios[] = {
      {"constant_one", measure::DensityModel::constant_one()}, {"brownian_stopped", sigma_h}};
  for (const auto& [name, model] : scenarios) {
    const auto ens = ensemble_for(p, model);
    const auto c = embed::crossing_probability(ens, phi.f, p.u, scan_options(p), p.threads);
    r.checks.push_back(mean_check("crossing[" + name + "]", c.estimate, target, c.se));
    r.checks.push_back(bound_check("truncated[" + name + "]", c.truncated_fraction, p.truncation_budget,
                                   "weighted truncated fraction < budget"));
    r.truncated_fraction = std::max(r.truncated_fraction, c.truncated_fraction);
    r.truncation_failed = r.truncation_failed || c.truncated_fraction >= p.truncation_budget;
    r.details[name] = {{"estimate", c.estimate}, {"se", c.se},
                       {"crossed", c.crossed},   {"capped", c.capped},
                       {"truncated", c.truncated}, {"density_rejections", ens.rejected_total}};
  }
  r.details["target"] = target;
  return r;
}

struct StopSample {
  double a = 0.0;
  double x = 0.0;
  bool truncated = false;
};

std::vector<StopSample> level_stops(const measure::WeightedEnsemble& ens, double level,
                                    const stop::ScanOptions& scan, unsigned threads) {
  return parallel_map(ens.size(), threads, [&](std::size_t i) {
    const auto o = stop::scan_first_crossing(ens.driver_seed(i), ens.grid,
                                             static_cast<std::int64_t>(ens.records[i].g_bar_index),
                                             [level](double) { return level; }, scan);
    return StopSample{o.a_at_stop, o.x_at_stop, o.truncated};
  });
}

IdentityReport run_exp_tail(const std::string& id, const IdentityParams& p) {
  auto r = base_report(id, p);
  const double a = p.level;
  if (!(a > 0.0)) throw ConfigError("level must be positive");
  const auto ens = ensemble_for(p, p.density);
  const auto stops = level_stops(ens, a, scan_options(p), p.threads);
  std::vector<double> av, xv, wv;
  double total = 0.0;
  double trunc = 0.0;
  for (std::size_t i = 0; i < stops.size(); ++i) {
    total += ens.weights[i];
    if (stops[i].truncated) {
      trunc += ens.weights[i];
      continue;
    }
    av.push_back(stops[i].a);
    xv.push_back(stops[i].x);
    wv.push_back(ens.weights[i]);
  }
  r.truncated_fraction = trunc / total;
  r.truncation_failed = r.truncated_fraction >= p.truncation_budget;
  if (av.empty()) {
    r.checks.push_back(no_decided_paths());
    return r;
  }
  std::vector<double> grid;
  for (int k = 0; k <= 200; ++k) grid.push_back(0.01 * k);
  const auto tail = stats::weighted_tail(av, wv, grid);
  double sup = 0.0;
  for (std::size_t k = 0; k < grid.size(); ++k) sup = std::max(sup, std::fabs(tail[k] - std::exp(-grid[k] / a)));
  r.checks.push_back(bound_check("tail_sup_distance", sup, 0.02, "sup over [0, 2] of |tail - exp(-x/a)| < tol"));
  r.checks.push_back(bound_check("truncated", r.truncated_fraction, p.truncation_budget,
                                 "weighted truncated fraction < budget"));
  const auto fit = embed::conditional_lambda(av, xv, wv, p.n_bins);
  double lam_dev = 0.0;
  for (const auto& b : fit.bins) lam_dev = std::max(lam_dev, std::fabs(b.lambda - a));
  r.details["lambda_max_deviation"] = lam_dev;
  r.details["mean_A"] = stats::weighted_mean_se(av, wv).mean;
  return r;
}

IdentityReport run_selfconsistency(const std::string& id, const IdentityParams& p) {
  auto r = base_report(id, p);
  const auto ens = ensemble_for(p, p.density);
  // An unreachable barrier walks every path to the horizon, where it is frozen.
  const auto stops = level_stops(ens, std::numeric_limits<double>::infinity(), scan_options(p), p.threads);
  std::vector<double> av(stops.size()), xv(stops.size());
  for (std::size_t i = 0; i < stops.size(); ++i) {
    av[i] = stops[i].a;
    xv[i] = stops[i].x;
  }
  const auto fit = embed::conditional_lambda(av, xv, ens.weights, p.n_bins);
  const double lo = weighted_quantile(av, ens.weights, 0.05);
  const double hi = weighted_quantile(av, ens.weights, 0.95);
  std::vector<double> grid;
  for (int k = 0; k <= 200; ++k) grid.push_back(lo + (hi - lo) * k / 200.0);
  const auto tail = stats::weighted_tail(av, ens.weights, grid);
  double sup = 0.0;
  for (std::size_t k = 0; k < grid.size(); ++k) sup = std::max(sup, std::fabs(tail[k] - fit.tail(grid[k])));
  r.checks.push_back(bound_check("selfconsistency_sup_distance", sup, 0.03,
                                 "sup over central 90% of |tail - exp(-int dz / lambda-hat)| < tol"));
  r.checks.push_back({"empty_bins", static_cast<double>(fit.empty_bins), 0.0, 0.0, 0.0, "no empty bins",
                      fit.empty_bins == 0});
  auto bins = nlohmann::ordered_json::array();
  for (const auto& b : fit.bins) {
    bins.push_back({{"a_low", b.a_low}, {"a_high", b.a_high}, {"a_mean", b.a_mean},
                    {"lambda", b.lambda}, {"se", b.se}, {"mass", b.mass}});
  }
  r.details["bins"] = std::move(bins);
  r.details["range"] = {lo, hi};
  return r;
}

IdentityReport run_doob(const std::string& id, const IdentityParams& p) {
  auto r = base_report(id, p);
  if (!(p.u0 > 0.0 && p.u0 < 1.0)) throw ConfigError("u0 must lie in (0, 1)");
  const auto max_steps = static_cast<std::int64_t>(std::ceil(p.t_max / p.passage_dt));
  const auto res = parallel_map(p.n_paths, p.threads, [&](std::size_t i) {
    return stop::drifted_passage(PathSeed{p.seed, i, stream::driver}, p.passage_dt, 0, std::log(p.u0), -0.5, 0.0,
                                 std::log(p.eps_g), max_steps, p.bridge);
  });
  std::vector<double> ind;
  std::size_t undecided = 0;
  for (const auto& o : res) {
    if (o.undecided) {
      ++undecided;
      continue;
    }
    ind.push_back(o.hit ? 1.0 : 0.0);
  }
  r.truncated_fraction = static_cast<double>(undecided) / static_cast<double>(p.n_paths);
  r.truncation_failed = r.truncated_fraction >= p.truncation_budget;
  if (ind.empty()) {
    r.checks.push_back(no_decided_paths());
    return r;
  }
  const std::vector<double> w(ind.size(), 1.0);
  const auto m = stats::weighted_mean_se(ind, w);
  r.checks.push_back(mean_check("hit_probability", m.mean, p.u0, m.se));
  r.checks.push_back(bound_check("truncated", r.truncated_fraction, p.truncation_budget, "undecided fraction < budget"));
  r.details["misclassification_bound"] = p.eps_g;
  r.details["passage_dt"] = p.passage_dt;
  return r;
}

IdentityReport run_last_passage(const std::string& id, const IdentityParams& p) {
  auto r = base_report(id, p);
  const double times[] = {0.25, 1.0, 4.0};
  const auto max_steps = static_cast<std::int64_t>(std::ceil(p.t_max / p.passage_dt));
  struct Row {
    double ind[3];
    double min_m[3];
    bool undecided[3];
  };
  const auto rows = parallel_map(p.n_paths, p.threads, [&](std::size_t i) {
    const CounterRng exact(PathSeed{p.seed, i, stream::sample});
    Row row{};
    double b = 0.0;
    double t_prev = 0.0;
    for (std::size_t ti = 0; ti < 3; ++ti) {
      b += std::sqrt(times[ti] - t_prev) * exact.normal(ti);
      t_prev = times[ti];
      const double y = b - 0.5 * times[ti];
      row.min_m[ti] = std::min(1.0, std::exp(y));
      // g > t iff the martingale returns to 1 after t.
      const auto o = stop::drifted_passage(PathSeed{p.seed, i, stream::driver}, p.passage_dt,
                                           static_cast<std::uint64_t>(ti) << 40, y, -0.5, 0.0, std::log(p.eps_g),
                                           max_steps, p.bridge);
      row.ind[ti] = o.hit ? 1.0 : 0.0;
      row.undecided[ti] = o.undecided;
    }
    return row;
  });
  for (std::size_t ti = 0; ti < 3; ++ti) {
    std::vector<double> ind, mm;
    std::size_t undecided = 0;
    for (const auto& row : rows) {
      if (row.undecided[ti]) {
        ++undecided;
        continue;
      }
      ind.push_back(row.ind[ti]);
      mm.push_back(row.min_m[ti]);
    }
    const double frac = static_cast<double>(undecided) / static_cast<double>(p.n_paths);
    r.truncated_fraction = std::max(r.truncated_fraction, frac);
    if (ind.empty()) {
      r.checks.push_back(no_decided_paths());
      continue;
    }
    const std::vector<double> w(ind.size(), 1.0);
    const auto d = stats::weighted_paired_difference(ind, mm, w);
    const auto lhs = stats::weighted_mean_se(ind, w);
    const auto rhs = stats::weighted_mean_se(mm, w);
    const std::string tag = "[t=" + format_double(times[ti]) + "]";
    auto c = mean_check("last_passage" + tag, lhs.mean, rhs.mean, d.se, p.eps_g);
    r.checks.push_back(c);
    r.details[tag] = {{"p_hat", lhs.mean}, {"p_hat_se", lhs.se}, {"e_min", rhs.mean},
                      {"e_min_se", rhs.se},  {"paired_se", d.se},   {"undecided", undecided}};
  }
  r.truncation_failed = r.truncated_fraction >= p.truncation_budget;
  r.checks.push_back(bound_check("truncated", r.truncated_fraction, p.truncation_budget, "undecided fraction < budget"));
  return r;
}

IdentityReport run_azema_yor(const std::string& id, const IdentityParams& p) {
  auto r = base_report(id, p);
  const std::vector<std::string> specs = {"const:1", "exp_decay:1", "affine:1,1"};
  const double x_max = 10.0;
  std::vector<fn::NamedFn> fs;
  std::vector<MonotoneFn> Fs;
  for (const auto& s : specs) {
    fs.push_back(fn::parse_function(s));
    Fs.push_back(fn::primitive(fs.back().f, x_max));
  }
  struct Pair {
    std::size_t f, g;
    MonotoneFn G, GF;
  };
  std::vector<Pair> pairs;
  for (const auto& [fi, gi] : std::vector<std::pair<std::size_t, std::size_t>>{{2, 1}, {0, 1}, {1, 0}, {2, 2}}) {
    auto G = fn::primitive(fs[gi].f, Fs[fi].value_max());
    auto GF = fn::composed_primitive(fs[fi].f, fs[gi].f, Fs[fi], x_max);
    pairs.push_back({fi, gi, std::move(G), std::move(GF)});
  }
  const TimeGrid grid = TimeGrid::covering(p.dt, p.t_max);
  const auto steps = grid.n_steps();
  const std::vector<std::size_t> idx = {0, static_cast<std::size_t>(steps / 4), static_cast<std::size_t>(steps / 2),
                                        static_cast<std::size_t>(3 * steps / 4), static_cast<std::size_t>(steps)};
  const std::size_t n_comp = std::min<std::size_t>(p.n_paths, 1000);

  struct PathOut {
    std::vector<std::vector<double>> w;  // [f][index]
    std::vector<double> maxid;           // [f]
    std::vector<double> comp;            // [pair]
    double a_top = 0.0;
  };
  const auto outs = parallel_map(p.n_paths, p.threads, [&](std::size_t i) {
    const PathSeed seed{p.seed, i, stream::driver};
    const auto n = cumulate(gaussian_increments(seed, grid));
    const auto on_grid = sigma::reflect_from_driver(grid, n);
    const auto bridged = sigma::reflect_with_bridge_max(grid, n, CounterRng(seed.with_tag(stream::bridge_max)));
    PathOut o;
    o.a_top = bridged.a.back();
    for (std::size_t f = 0; f < fs.size(); ++f) {
      const auto w_grid = fn::azema_yor_transform(on_grid, fs[f].f, Fs[f]);
      o.maxid.push_back(fn::running_max_identity_check(w_grid, Fs[f], on_grid.a));
      std::vector<double> w_at;
      for (std::size_t k : idx) w_at.push_back(Fs[f](bridged.a[k]) - fs[f].f(bridged.a[k]) * bridged.x[k]);
      o.w.push_back(std::move(w_at));
    }
    if (i < n_comp) {
      for (const auto& pr : pairs) {
        o.comp.push_back(fn::composition_check(on_grid, fs[pr.f].f, fs[pr.g].f, Fs[pr.f], pr.G, pr.GF).defect);
      }
    }
    return o;
  });

  double a_top = 0.0;
  for (const auto& o : outs) a_top = std::max(a_top, o.a_top);
  const std::vector<double> w(p.n_paths, 1.0);
  std::vector<std::pair<std::size_t, std::size_t>> inc_pairs = {{0, 1}, {1, 2}, {2, 4}, {0, 4}};
  for (std::size_t f = 0; f < fs.size(); ++f) {
    std::vector<std::vector<double>> paths(p.n_paths);
    double maxid = 0.0;
    for (std::size_t i = 0; i < p.n_paths; ++i) {
      paths[i] = outs[i].w[f];
      maxid = std::max(maxid, outs[i].maxid[f]);
    }
    const auto t = stats::martingale_increment_test(paths, w, inc_pairs);
    const auto worst = *std::max_element(t.pairs.begin(), t.pairs.end(), [](const auto& x, const auto& y) {
      const double zx = x.se > 0 ? std::fabs(x.mean) / x.se : 0.0;
      const double zy = y.se > 0 ? std::fabs(y.mean) / y.se : 0.0;
      return zx < zy;
    });
    const std::string tag = "[" + specs[f] + "]";
    r.checks.push_back({"martingale" + tag, worst.mean, 0.0, worst.se, kSe * worst.se,
                        "|mean increment| <= 4 se for every index pair", t.pass});
    r.checks.push_back(at_most_check("max_identity" + tag, maxid, Fs[f].interpolation_tolerance(),
                                     "max defect <= interpolation tolerance"));
    auto pj = nlohmann::ordered_json::array();
    for (const auto& c : t.pairs) {
      pj.push_back({{"k1", idx[c.k1]}, {"k2", idx[c.k2]}, {"mean", c.mean}, {"se", c.se}, {"pass", c.pass}});
    }
    r.details["increments" + tag] = std::move(pj);
  }
  for (std::size_t q = 0; q < pairs.size(); ++q) {
    double defect = 0.0;
    for (std::size_t i = 0; i < n_comp; ++i) defect = std::max(defect, outs[i].comp[q]);
    const auto& pr = pairs[q];
    const double tol = pr.G.error_bound() + pr.GF.error_bound() + Fs[pr.f].error_bound();
    r.checks.push_back(at_most_check("composition[" + specs[pr.f] + "," + specs[pr.g] + "]", defect, 5.0 * tol,
                                     "max defect <= 5 x quadrature tolerance"));
  }
  r.details["max_A"] = a_top;
  r.details["table_range"] = x_max;
  r.details["composition_paths"] = n_comp;
  if (a_top > x_max) r.checks.push_back({"table_range", a_top, x_max, 0.0, x_max, "A stays inside the tables", false});
  return r;
}

IdentityReport run_bachelier(const std::string& id, const IdentityParams& p) {
  auto r = base_report(id, p);
  auto dts = p.dts;
  if (dts.size() < 2) throw ConfigError("bachelier needs at least two dt values");
  std::sort(dts.begin(), dts.end(), std::greater<>());
  const auto phi = fn::parse_function(p.phi);
  const auto ladder = fn::bachelier_refinement(phi.f, dts, p.t_max, p.n_paths, p.seed, p.threads);
  for (std::size_t l = 0; l < ladder.median_ratio.size(); ++l) {
    const double m = ladder.median_ratio[l];
    r.checks.push_back({"median_ratio[" + format_double(dts[l + 1]) + "/" + format_double(dts[l]) + "]", m, 0.5, 0.0,
                        0.0, "0.35 <= median error ratio <= 0.7", m >= 0.35 && m <= 0.7});
  }
  r.checks.push_back({"clock_range", ladder.clamped ? 1.0 : 0.0, 0.0, 0.0, 0.0, "clock covers every A", !ladder.clamped});

  // phi = 1 reproduces the driver; the closed form keeps its running max at U(A).
  const TimeGrid fine = TimeGrid::covering(dts.back(), p.t_max);
  const auto one = [](double) { return 1.0; };
  double top = 0.0;
  std::vector<std::vector<double>> drivers(p.n_paths);
  for (std::size_t i = 0; i < p.n_paths; ++i) {
    drivers[i] = cumulate(gaussian_increments(PathSeed{p.seed, i, stream::driver}, fine));
    top = std::max(top, *std::max_element(drivers[i].begin(), drivers[i].end()));
  }
  const auto unit_clock = fn::bachelier_clock(one, top);
  const auto clock = fn::bachelier_clock(phi.f, top);
  double unit_err = 0.0;
  double cont = 0.0;
  for (const auto& n : drivers) {
    const auto s1 = fn::bachelier_solve(n, one, unit_clock.v);
    for (std::size_t k = 0; k < n.size(); ++k) {
      unit_err = std::max({unit_err, std::fabs(s1.y_euler[k] - n[k]), std::fabs(s1.y_closed[k] - n[k])});
    }
    cont = std::max(cont, fn::bachelier_solve(n, phi.f, clock.v).max_identity_defect);
  }
  r.checks.push_back(at_most_check("unit_phi_reproduces_driver", unit_err, 1e-12, "max |Y - N| <= 1e-12"));
  r.checks.push_back(at_most_check("running_max_continuity", cont, clock.v.interpolation_tolerance(),
                                   "max |running max of Y - U(A)| <= interpolation tolerance"));
  auto errs = nlohmann::ordered_json::object();
  for (std::size_t l = 0; l < dts.size(); ++l) errs[format_double(dts[l])] = ladder.errors[l];
  r.details["sup_errors"] = std::move(errs);
  return r;
}

IdentityReport run_sign(const std::string& id, const IdentityParams& p) {
  auto r = base_report(id, p);
  const TimeGrid grid = TimeGrid::covering(p.dt, p.t_max);
  struct Out {
    double recon = 0.0;
    double offending = 0.0;
    double additivity = 0.0;
    bool pass = true;
    double tanaka = 0.0;
  };
  const double bound = 3.0;
  std::vector<double> k_exp(grid.n_points()), k_cos(grid.n_points()), k_const(grid.n_points(), 2.5);
  for (std::size_t k = 0; k < grid.n_points(); ++k) {
    k_exp[k] = std::exp(-grid.time(static_cast<std::int64_t>(k)));
    k_cos[k] = 2.0 * std::cos(static_cast<double>(k));
  }
  const auto outs = parallel_map(p.n_paths, p.threads, [&](std::size_t i) {
    const PathSeed seed{p.seed, i, stream::driver};
    const auto b = cumulate(gaussian_increments(seed, grid));
    Out o;
    const sigma::SignedPath signed_path{grid, b};
    const auto sb = sigma::sign_balayage(signed_path);
    for (std::size_t k = 0; k < b.size(); ++k) o.recon = std::max(o.recon, std::fabs(sb.reconstruction[k] - b[k]));
    o.tanaka = sigma::local_time_estimate(signed_path, 0.0).back();
    const auto s = sigma::reflect_from_driver(grid, b);
    for (const auto* kv : {&k_const, &k_exp, &k_cos}) {
      const auto y = sigma::balayage(s, *kv, 0.0, bound);
      const auto rep = sigma::sigma_class_check(y, 0.0, 0.0, {}, 1e-9);
      o.offending += rep.offending_mass;
      o.additivity = std::max(o.additivity, rep.additivity_defect);
      o.pass = o.pass && rep.pass;
    }
    return o;
  });
  double recon = 0.0;
  double offending = 0.0;
  double additivity = 0.0;
  bool all_pass = true;
  std::vector<double> tanaka;
  for (const auto& o : outs) {
    recon = std::max(recon, o.recon);
    offending += o.offending;
    additivity = std::max(additivity, o.additivity);
    all_pass = all_pass && o.pass;
    tanaka.push_back(o.tanaka);
  }
  r.checks.push_back(at_most_check("sign_reconstruction", recon, 0.0, "max |K_g |X| - X| == 0"));
  r.checks.push_back(at_most_check("balayage_offending_mass", offending, 0.0, "offending mass == 0"));
  r.checks.push_back({"balayage_class_check", all_pass ? 1.0 : 0.0, 1.0, 0.0, 0.0, "every balayage passes", all_pass});
  const auto lt = stats::weighted_mean_se(tanaka, std::vector<double>(tanaka.size(), 1.0));
  r.details["balayage_additivity_defect"] = additivity;
  r.details["local_time_mean"] = lt.mean;
  r.details["local_time_se"] = lt.se;
  r.details["local_time_target"] = std::sqrt(2.0 / M_PI) * std::sqrt(p.t_max);
  return r;
}

IdentityReport run_representation(const std::string& id, const IdentityParams& p) {
  auto r = base_report(id, p);
  const double a = p.level;
  if (!(a > 0.0)) throw ConfigError("level must be positive");
  const double times[] = {0.5, 1.0};
  const auto ens = ensemble_for(p, p.density);
  const double dt = ens.grid.dt();
  std::int64_t kt[2];
  for (int j = 0; j < 2; ++j) kt[j] = std::llround(times[j] / dt);
  struct Row {
    double x_t[2];
    double g_t[2];
    double g = 0.0;
    bool truncated = false;
  };
  const auto rows = parallel_map(ens.size(), p.threads, [&](std::size_t i) {
    Row row{};
    double last_zero = 0.0;
    double a_prev = 0.0;
    bool seen[2] = {false, false};
    const auto observe = [&](std::int64_t k, double n, double a_now) {
      if (a_now > a_prev) last_zero = (static_cast<double>(k) - 0.5) * dt;
      a_prev = a_now;
      for (int j = 0; j < 2; ++j) {
        if (k == kt[j]) {
          row.x_t[j] = a_now - n;
          row.g_t[j] = last_zero;
          seen[j] = true;
        }
      }
    };
    const auto o = stop::scan_first_crossing(ens.driver_seed(i), ens.grid,
                                             static_cast<std::int64_t>(ens.records[i].g_bar_index),
                                             [a](double) { return a; }, scan_options(p), observe);
    row.truncated = o.truncated;
    row.g = last_zero;
    for (int j = 0; j < 2; ++j) {
      if (!seen[j] || (o.stop_index && *o.stop_index <= kt[j])) {
        row.x_t[j] = a;
        row.g_t[j] = row.g;
      }
    }
    return row;
  });
  double total = 0.0;
  double trunc = 0.0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    total += ens.weights[i];
    if (rows[i].truncated) trunc += ens.weights[i];
  }
  r.truncated_fraction = trunc / total;
  r.truncation_failed = r.truncated_fraction >= p.truncation_budget;
  for (int j = 0; j < 2; ++j) {
    std::vector<double> lhs, rhs, w;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].truncated) continue;
      lhs.push_back(std::exp(-rows[i].g_t[j]) * rows[i].x_t[j]);
      rhs.push_back(rows[i].g < times[j] ? std::exp(-rows[i].g) * a : 0.0);
      w.push_back(ens.weights[i]);
    }
    if (w.empty()) {
      r.checks.push_back(no_decided_paths());
      break;
    }
    const auto d = stats::weighted_paired_difference(lhs, rhs, w);
    const auto l = stats::weighted_mean_se(lhs, w);
    const auto rr = stats::weighted_mean_se(rhs, w);
    const std::string tag = "[t=" + format_double(times[j]) + "]";
    r.checks.push_back(mean_check("representation" + tag, l.mean, rr.mean, d.se));
    r.details[tag] = {{"lhs", l.mean}, {"lhs_se", l.se}, {"rhs", rr.mean}, {"rhs_se", rr.se}, {"paired_se", d.se}};
  }
  r.checks.push_back(bound_check("truncated", r.truncated_fraction, p.truncation_budget,
                                 "weighted truncated fraction < budget"));
  return r;
}

using Runner = IdentityReport (*)(const std::string&, const IdentityParams&);

struct Entry {
  IdentityInfo info;
  Runner run;
};

IdentityParams with(std::size_t n, double dt, double t_max) {
  IdentityParams p;
  p.n_paths = n;
  p.dt = dt;
  p.t_max = t_max;
  return p;
}

const std::vector<Entry>& entries() {
  static const std::vector<Entry> table = [] {
    std::vector<Entry> e;
    {
      auto p = with(100000, 1e-3, 50.0);
      e.push_back({{"thm3.10-embed-ks", "X stopped at inf{t : X >= phi_nu(A)} has law nu", p}, run_embed_ks});
    }
    {
      auto p = with(100000, 1e-3, 5.0);
      p.phi = "const:0.2";
      p.u = 0.2;
      e.push_back({{"thm3.5-crossing",
                    "P'(X crosses phi(A) before A exceeds u) = 1 - exp(-int_0^u dz / phi(z))", p},
                   run_crossing});
    }
    {
      auto p = with(100000, 1e-3, 20.0);
      p.level = 0.5;
      e.push_back({{"cor3.9-exp-tail", "A at the first passage of X to level a is exponential with mean a", p},
                   run_exp_tail});
    }
    {
      auto p = with(100000, 1e-3, 1.0);
      e.push_back({{"lambda-selfconsistency",
                    "P'(A > x) = exp(-int_0^x dz / lambda(z)) with lambda(x) = E'[X | A = x], X frozen at t_max", p},
                   run_selfconsistency});
    }
    {
      auto p = with(100000, 1e-3, 100.0);
      p.u0 = 0.5;
      e.push_back({{"doob-maximal", "P(sup U >= 1) = U_0 for U = U_0 exp(B_t - t/2)", p}, run_doob});
    }
    {
      auto p = with(100000, 1e-3, 100.0);
      e.push_back({{"thm2.7-lastpassage", "P(g > t) = E[min(1, M_t)] for M = exp(B - t/2) and g its last time at 1", p},
                   run_last_passage});
    }
    {
      auto p = with(100000, 1e-3, 1.0);
      e.push_back({{"prop2.11-maxid",
                    "F(A) - f(A) X is a martingale whose running max is F(A); composition of such transforms", p},
                   run_azema_yor});
    }
    {
      auto p = with(100, 1e-3, 1.0);
      p.phi = "affine:1,1";
      p.dts = {4e-3, 1e-3};
      e.push_back({{"thm2.13-bachelier-order",
                    "Euler scheme for dY = phi(max Y) dN converges to U(A) - U'(A) X at strong order 1/2", p},
                   run_bachelier});
    }
    {
      auto p = with(1000, 1e-3, 1.0);
      e.push_back({{"sign-identity", "K_g |X| = X pathwise; balayage keeps reflected paths in the class", p},
                   run_sign});
    }
    {
      auto p = with(100000, 1e-3, 20.0);
      p.level = 1.0;
      e.push_back({{"cor2.9-representation",
                    "E[K_{g_t} X_t] = E[K_g X_inf 1{g < t}] for X stopped at level a and K_s = exp(-s)", p},
                   run_representation});
    }
    return e;
  }();
  return table;
}

}  // namespace

const std::vector<IdentityInfo>& identity_registry() {
  static const std::vector<IdentityInfo> infos = [] {
    std::vector<IdentityInfo> v;
    for (const auto& e : entries()) v.push_back(e.info);
    return v;
  }();
  return infos;
}

const IdentityInfo& identity_info(const std::string& id) {
  for (const auto& e : entries()) {
    if (e.info.id == id) return e.info;
  }
  throw ConfigError("unknown identity '" + id + "'");
}

stats::IdentityReport run_identity(const std::string& id, const IdentityParams& params) {
  for (const auto& e : entries()) {
    if (e.info.id == id) {
      if (params.n_paths == 0) throw ConfigError("n_paths must be positive");
      if (!(params.dt > 0.0) || !(params.t_max >= params.dt)) throw ConfigError("need 0 < dt <= t_max");
      auto report = e.run(id, params);
      report.finalize();
      return report;
    }
  }
  throw ConfigError("unknown identity '" + id + "'");
}

}  // namespace sigmalab
