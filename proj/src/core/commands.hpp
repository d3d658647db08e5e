// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>

#include "config.hpp"

namespace sigmalab::cmd {

/// Process exit status shared by every command.
enum class Status : int { pass = 0, failed = 1, config_error = 2, truncation = 3 };

struct Result {
  Status status = Status::pass;
  std::string summary;  ///< human-readable lines for the terminal
  std::string output_dir;
};

/// Runs one registered identity, or every identity when id == "all".
/// Writes <id>.json per identity, summary.csv, config.json and metadata.json.
Result verify(const std::string& id, const config::Overrides& cfg);

/// Embedding sample for cfg.law: samples.csv and diagnostics.json.
Result embed(const config::Overrides& cfg);

/// Psi and phi tables for cfg.law: psi.csv with columns x, psi, z, phi.
Result psi(const config::Overrides& cfg);

/// Euler vs closed form for cfg.phi over the cfg.dts ladder: errors.csv and ladder.json.
Result bachelier(const config::Overrides& cfg);

/// Weighted ensemble summary (ensemble.csv) and the first few full paths (paths.csv).
Result simulate(const config::Overrides& cfg);

/// Default parameters used by `command` when the config leaves a key unset.
IdentityParams command_defaults(const std::string& command);

}  // namespace sigmalab::cmd
