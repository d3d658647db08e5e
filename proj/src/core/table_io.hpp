// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

namespace sigmalab {

struct TwoColumnTable {
  std::vector<double> first;
  std::vector<double> second;
};

/// Reads a two-column numeric CSV. A first line that does not parse as numbers is taken
/// as a header. Throws ConfigError naming the file and data row on malformed input.
TwoColumnTable read_two_column_csv(const std::string& path);

/// Shortest decimal text that parses back to the same double.
std::string format_double(double v);

}  // namespace sigmalab
