// SPDX-License-Identifier: Apache-2.0
#include "table_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "errors.hpp"

namespace sigmalab {

namespace {

bool parse_number(std::string_view text, double& out) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r')) text.remove_suffix(1);
  if (text.empty()) return false;
  if (text.front() == '+') text.remove_prefix(1);
  const auto res = std::from_chars(text.data(), text.data() + text.size(), out);
  return res.ec == std::errc() && res.ptr == text.data() + text.size();
}

}  // namespace

TwoColumnTable read_two_column_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open table '" + path + "'");
  TwoColumnTable t;
  std::string line;
  std::size_t line_no = 0;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r" || line.front() == '#') continue;
    const auto comma = line.find(',');
    double a = 0.0;
    double b = 0.0;
    const bool ok = comma != std::string::npos &&
                    parse_number(std::string_view(line).substr(0, comma), a) &&
                    parse_number(std::string_view(line).substr(comma + 1), b);
    if (!ok) {
      if (row == 0 && t.first.empty() && line_no == 1) continue;  // header
      throw ConfigError("table '" + path + "': malformed data at row " + std::to_string(row));
    }
    if (!std::isfinite(a) || !std::isfinite(b))
      throw ConfigError("table '" + path + "': non-finite value at row " + std::to_string(row));
    t.first.push_back(a);
    t.second.push_back(b);
    ++row;
  }
  if (t.first.size() < 2) throw ConfigError("table '" + path + "' needs at least two data rows");
  return t;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace sigmalab
