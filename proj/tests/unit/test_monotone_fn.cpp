// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>

#include "errors.hpp"
#include "monotone_fn.hpp"

using namespace sigmalab;

TEST_CASE("interpolation, clamping and right-continuous inverse") {
  const MonotoneFn f({0.0, 1.0, 2.0, 3.0}, {0.0, 1.0, 1.0, 3.0});
  CHECK(f(0.5) == doctest::Approx(0.5));
  CHECK(f(2.5) == doctest::Approx(2.0));
  CHECK(f(-1.0) == 0.0);
  CHECK(f(9.0) == 3.0);
  CHECK(f.is_monotone());
  CHECK_FALSE(f.is_strictly_increasing());
  // flat stretch [1, 2] maps to its right end
  CHECK(f.inverse(1.0) == doctest::Approx(2.0));
  CHECK(f.inverse(0.5) == doctest::Approx(0.5));
  CHECK(f.inverse(2.0) == doctest::Approx(2.5));
}

TEST_CASE("knots must increase; the error names the row") {
  try {
    MonotoneFn({0.0, 1.0, 1.0}, {0.0, 1.0, 2.0});
    FAIL("expected MonotonicityError");
  } catch (const MonotonicityError& e) {
    CHECK(e.row() == 2);
  }
  CHECK_THROWS_AS(MonotoneFn({0.0}, {0.0}), std::invalid_argument);
  CHECK_THROWS_AS(MonotoneFn({0.0, 1.0}, {0.0, NAN}), std::invalid_argument);
}

TEST_CASE("inverse round trip and interpolation bound") {
  std::vector<double> x, y;
  for (int i = 0; i <= 1000; ++i) {
    x.push_back(i * 1e-3);
    y.push_back(std::exp(i * 1e-3));
  }
  const MonotoneFn f(x, y);
  for (double t : {0.0, 0.1234, 0.5, 0.999}) {
    CHECK(f.inverse(f(t)) == doctest::Approx(t).epsilon(1e-12));
    CHECK(std::fabs(f(t) - std::exp(t)) <= f.interpolation_tolerance() * 1.01 + 1e-15);
  }
  const auto g = f.inverted();
  CHECK(g(std::exp(0.3)) == doctest::Approx(0.3).epsilon(1e-6));
  CHECK_THROWS(MonotoneFn({0.0, 1.0, 2.0}, {1.0, 0.0, 2.0}).inverse(0.5));
}
