// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "errors.hpp"
#include "table_io.hpp"

using namespace sigmalab;

TEST_CASE("format_double round-trips") {
  for (double v : {0.1, 1.0 / 3.0, 6.02214076e23, -2.5e-300, 0.0}) {
    const auto s = format_double(v);
    double back = 0.0;
    std::from_chars(s.data(), s.data() + s.size(), back);
    CHECK(back == v);
  }
  CHECK(format_double(2.0) == "2");
  CHECK(format_double(NAN) == "nan");
  CHECK(format_double(-INFINITY) == "-inf");
}

TEST_CASE("two-column csv with header and comments") {
  const auto path = std::filesystem::temp_directory_path() / "sigmalab_table_io.csv";
  {
    std::ofstream out(path);
    out << "x,cdf\n# comment\n0,0\n1,0.5\n2,1\n";
  }
  const auto t = read_two_column_csv(path.string());
  CHECK(t.first == std::vector<double>{0, 1, 2});
  CHECK(t.second == std::vector<double>{0, 0.5, 1});
  {
    std::ofstream out(path);
    out << "0,0\n1,oops\n";
  }
  CHECK_THROWS_AS(read_two_column_csv(path.string()), ConfigError);
  std::filesystem::remove(path);
  CHECK_THROWS_AS(read_two_column_csv("/nonexistent/table.csv"), ConfigError);
}
