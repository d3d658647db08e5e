// SPDX-License-Identifier: Apache-2.0
#include "mc_stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "table_io.hpp"

namespace sigmalab::stats {

namespace {

void require_same(std::size_t a, std::size_t b, const char* what) {
  if (a != b) throw std::invalid_argument(std::string(what) + ": values and weights differ in length");
}

}  // namespace

MeanSe weighted_mean_se(std::span<const double> values, std::span<const double> weights) {
  require_same(values.size(), weights.size(), "weighted_mean_se");
  if (values.empty()) throw std::invalid_argument("weighted_mean_se: empty sample");
  double sw = 0.0;
  double swv = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (weights[i] < 0.0) throw std::invalid_argument("weighted_mean_se: negative weight");
    sw += weights[i];
    swv += weights[i] * values[i];
  }
  if (!(sw > 0.0)) throw std::invalid_argument("weighted_mean_se: weights sum to zero");
  MeanSe r;
  r.mean = swv / sw;
  double acc = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double d = weights[i] * (values[i] - r.mean);
    acc += d * d;
  }
  r.se = std::sqrt(acc) / sw;
  return r;
}

MeanSe weighted_paired_difference(std::span<const double> a, std::span<const double> b,
                                  std::span<const double> weights) {
  if (a.size() != b.size()) throw std::invalid_argument("weighted_paired_difference: length mismatch");
  std::vector<double> d(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
  return weighted_mean_se(d, weights);
}

std::vector<double> weighted_tail(std::span<const double> values, std::span<const double> weights,
                                  std::span<const double> grid) {
  require_same(values.size(), weights.size(), "weighted_tail");
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return values[i] < values[j]; });
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (!(total > 0.0)) throw std::invalid_argument("weighted_tail: weights sum to zero");
  // suffix[i] = weight of order[i..]
  std::vector<double> suffix(order.size() + 1, 0.0);
  for (std::size_t i = order.size(); i-- > 0;) suffix[i] = suffix[i + 1] + weights[order[i]];
  std::vector<double> out(grid.size());
  for (std::size_t g = 0; g < grid.size(); ++g) {
    const auto it = std::upper_bound(order.begin(), order.end(), grid[g],
                                     [&](double x, std::size_t i) { return x < values[i]; });
    out[g] = std::min(1.0, suffix[static_cast<std::size_t>(it - order.begin())] / total);
  }
  return out;
}

double ks_weighted(std::span<const double> sample, std::span<const double> weights,
                   const std::function<double(double)>& cdf) {
  require_same(sample.size(), weights.size(), "ks_weighted");
  if (sample.empty()) throw std::invalid_argument("ks_weighted: empty sample");
  std::vector<std::size_t> order(sample.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return sample[i] < sample[j]; });
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (!(total > 0.0)) throw std::invalid_argument("ks_weighted: weights sum to zero");
  double below = 0.0;
  double d = 0.0;
  std::size_t i = 0;
  while (i < order.size()) {
    const double v = sample[order[i]];
    double mass = 0.0;
    std::size_t j = i;
    for (; j < order.size() && sample[order[j]] == v; ++j) mass += weights[order[j]];
    const double f = cdf(v);
    const double lo = below / total;
    below += mass;
    const double hi = below / total;
    d = std::max({d, std::fabs(f - lo), std::fabs(hi - f)});
    i = j;
  }
  return d;
}

MartingaleTest martingale_increment_test(const std::vector<std::vector<double>>& paths,
                                         std::span<const double> weights,
                                         std::span<const std::pair<std::size_t, std::size_t>> pairs, double k_se) {
  if (pairs.size() < 2) throw std::invalid_argument("martingale_increment_test: need at least two index pairs");
  require_same(paths.size(), weights.size(), "martingale_increment_test");
  MartingaleTest t;
  t.k_se = k_se;
  t.pass = true;
  std::vector<double> inc(paths.size());
  for (const auto& [k1, k2] : pairs) {
    for (std::size_t i = 0; i < paths.size(); ++i) inc[i] = paths[i].at(k2) - paths[i].at(k1);
    const auto m = weighted_mean_se(inc, weights);
    IncrementCheck c{k1, k2, m.mean, m.se, std::fabs(m.mean) <= k_se * m.se};
    t.pass = t.pass && c.pass;
    t.pairs.push_back(c);
  }
  return t;
}

void IdentityReport::finalize() {
  pass = !checks.empty() && !truncation_failed;
  for (const auto& c : checks) pass = pass && c.pass;
}

nlohmann::ordered_json to_json(const IdentityReport& r) {
  nlohmann::ordered_json j;
  j["identity"] = r.id;
  j["statement"] = r.statement;
  j["seed"] = r.seed;
  j["n_paths"] = r.n_paths;
  j["dt"] = r.dt;
  j["t_max"] = r.t_max;
  j["truncated_fraction"] = r.truncated_fraction;
  j["truncation_failed"] = r.truncation_failed;
  auto checks = nlohmann::ordered_json::array();
  for (const auto& c : r.checks) {
    nlohmann::ordered_json cj;
    cj["name"] = c.name;
    cj["estimate"] = c.estimate;
    cj["target"] = c.target;
    cj["se"] = c.se;
    cj["tolerance"] = c.tolerance;
    cj["rule"] = c.rule;
    cj["pass"] = c.pass;
    checks.push_back(std::move(cj));
  }
  j["checks"] = std::move(checks);
  j["details"] = r.details;
  j["pass"] = r.pass;
  return j;
}

std::string csv_header() { return "identity,estimate,target,se,pass\n"; }

std::string csv_rows(const IdentityReport& r) {
  std::string out;
  for (const auto& c : r.checks) {
    out += r.id + "/" + c.name + "," + format_double(c.estimate) + "," + format_double(c.target) + "," +
           format_double(c.se) + "," + (c.pass ? "true" : "false") + "\n";
  }
  return out;
}

}  // namespace sigmalab::stats
