// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace sigmalab::stats {

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
};

/// Self-normalized mean sum(w v) / sum(w) with the delta-method standard error
/// sqrt(sum w_i^2 (v_i - mean)^2) / sum(w). Unit weights give the usual mean and
/// sigma / sqrt(n) up to the n vs n - 1 factor. Throws when the weights sum to zero.
MeanSe weighted_mean_se(std::span<const double> values, std::span<const double> weights);

/// Paired difference a_i - b_i under common weights (SE of the difference).
MeanSe weighted_paired_difference(std::span<const double> a, std::span<const double> b,
                                  std::span<const double> weights);

/// Weighted P(value > x) at every x of `grid`.
std::vector<double> weighted_tail(std::span<const double> values, std::span<const double> weights,
                                  std::span<const double> grid);

/// sup_x |weighted empirical cdf - cdf|, evaluated on both sides of every sample point.
double ks_weighted(std::span<const double> sample, std::span<const double> weights,
                   const std::function<double(double)>& cdf);

struct IncrementCheck {
  std::size_t k1 = 0;
  std::size_t k2 = 0;
  double mean = 0.0;
  double se = 0.0;
  bool pass = false;
};

struct MartingaleTest {
  std::vector<IncrementCheck> pairs;
  double k_se = 4.0;
  bool pass = false;
};

/// For each (k1, k2): weighted mean of paths[i][k2] - paths[i][k1]; a pair passes when
/// |mean| <= k_se * SE. Needs at least two pairs.
MartingaleTest martingale_increment_test(const std::vector<std::vector<double>>& paths,
                                         std::span<const double> weights,
                                         std::span<const std::pair<std::size_t, std::size_t>> pairs,
                                         double k_se = 4.0);

/// One pass/fail line inside an identity report.
struct Check {
  std::string name;
  double estimate = 0.0;
  double target = 0.0;
  double se = 0.0;
  double tolerance = 0.0;  ///< pass iff |estimate - target| < tolerance (or estimate < tolerance for distances)
  std::string rule;
  bool pass = false;
};

struct IdentityReport {
  std::string id;
  std::string statement;  ///< one-line description of the identity
  std::uint64_t seed = 0;
  std::size_t n_paths = 0;
  double dt = 0.0;
  double t_max = 0.0;
  double truncated_fraction = 0.0;
  bool truncation_failed = false;
  std::vector<Check> checks;
  nlohmann::ordered_json details = nlohmann::ordered_json::object();
  bool pass = false;

  /// pass = every check passes and truncation stayed within budget.
  void finalize();
};

nlohmann::ordered_json to_json(const IdentityReport& r);

/// Summary rows: identity, estimate, target, se, pass (one row per check, named id/check).
std::string csv_header();
std::string csv_rows(const IdentityReport& r);

}  // namespace sigmalab::stats
