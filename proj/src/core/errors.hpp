// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace sigmalab {

/// Malformed or inconsistent experiment configuration (CLI exit code 2).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The weighted fraction of undetermined paths stayed above the budget after escalation.
class TruncationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Tabulated input that violates a monotonicity requirement; carries the offending row.
class MonotonicityError : public std::invalid_argument {
 public:
  MonotonicityError(const std::string& what, std::size_t row)
      : std::invalid_argument(what + " (row " + std::to_string(row) + ")"), row_(row) {}
  std::size_t row() const noexcept { return row_; }

 private:
  std::size_t row_;
};

}  // namespace sigmalab
