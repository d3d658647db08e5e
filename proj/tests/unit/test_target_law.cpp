// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "errors.hpp"
#include "target_law.hpp"

using namespace sigmalab;
using namespace sigmalab::law;

TEST_CASE("quantile inverts the cdf") {
  for (const char* spec : {"exp:2", "uniform:0.5,3", "weibull:2,1.5", "halfnormal:0.7"}) {
    const auto l = parse_law(spec);
    for (double p : {1e-6, 0.01, 0.3, 0.5, 0.9, 0.999999}) {
      CHECK(l->cdf(l->quantile(p)) == doctest::Approx(p).epsilon(1e-9));
    }
    CHECK(l->name() == spec);
  }
}

TEST_CASE("tails and support") {
  const auto e = exponential(2.0);
  CHECK(e->tail(1.0) == doctest::Approx(std::exp(-2.0)));
  CHECK(e->lower() == 0.0);
  CHECK(std::isinf(e->upper()));
  CHECK(e->log_tail_neg(400.0) == doctest::Approx(800.0));
  const auto u = uniform(0.0, 1.0);
  CHECK(u->tail(0.25) == doctest::Approx(0.75));
  CHECK(u->upper() == 1.0);
  const auto h = half_normal(1.0);
  CHECK(h->tail(1.0) == doctest::Approx(std::erfc(1.0 / std::sqrt(2.0))));
  CHECK(h->quantile(0.5) == doctest::Approx(0.6744897501960817));
}

TEST_CASE("bad specs are config errors") {
  CHECK_THROWS_AS(parse_law("exp:-1"), ConfigError);
  CHECK_THROWS_AS(parse_law("uniform:1,0"), ConfigError);
  CHECK_THROWS_AS(parse_law("weibull:0.5,1"), ConfigError);
  CHECK_THROWS_AS(parse_law("cauchy:1"), ConfigError);
  CHECK_THROWS_AS(parse_law("exp"), ConfigError);
}

TEST_CASE("tabulated laws validate monotonicity") {
  const auto t = tabulated({0.0, 1.0, 2.0}, {0.0, 0.25, 1.0});
  CHECK(t->cdf(1.5) == doctest::Approx(0.625));
  CHECK(t->quantile(0.625) == doctest::Approx(1.5));
  try {
    tabulated({0.0, 1.0, 2.0, 3.0}, {0.0, 0.5, 0.4, 1.0});
    FAIL("expected MonotonicityError");
  } catch (const MonotonicityError& e) {
    CHECK(e.row() == 2);
  }
  CHECK_THROWS_AS(tabulated({0.0, 1.0}, {0.1, 1.0}), MonotonicityError);
  CHECK_THROWS_AS(tabulated({0.0, 1.0}, {0.0, 0.9}), MonotonicityError);

  const auto path = std::filesystem::temp_directory_path() / "sigmalab_law.csv";
  {
    std::ofstream out(path);
    out << "x,cdf\n0,0\n1,0.5\n2,1\n";
  }
  CHECK(parse_law("csv:" + path.string())->cdf(0.5) == doctest::Approx(0.25));
  std::filesystem::remove(path);
}
