// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "mc_stats.hpp"
#include "signed_measure.hpp"

namespace sigmalab {

/// Fully resolved parameters of one identity run.
struct IdentityParams {
  std::uint64_t seed = 20240601;
  std::size_t n_paths = 100000;
  double dt = 1e-3;
  double t_max = 1.0;
  measure::DensityModel density = measure::DensityModel::constant_one();
  bool bridge = true;  ///< bridge crossing correction and sub-step refinement
  double truncation_budget = 0.005;
  unsigned threads = 0;
  std::string law;   ///< empty: the identity's own battery
  std::string phi;
  double u = 0.2;
  double level = 0.5;
  double u0 = 0.5;
  std::vector<double> dts;
  std::size_t n_bins = 25;
  double passage_dt = 1e-2;  ///< step for constant-level passages, where the bridge correction is exact
  double eps_g = 1e-3;

  nlohmann::ordered_json to_json() const;
};

struct IdentityInfo {
  std::string id;
  std::string statement;
  IdentityParams defaults;
};

/// All registered identities in canonical order.
const std::vector<IdentityInfo>& identity_registry();

/// Defaults for `id`; throws ConfigError for unknown ids.
const IdentityInfo& identity_info(const std::string& id);

/// Generation, transform, stopping and statistic for one identity. Deterministic in
/// (id, params) and independent of params.threads.
stats::IdentityReport run_identity(const std::string& id, const IdentityParams& params);

}  // namespace sigmalab
