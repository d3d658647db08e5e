// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>

#include "embedding.hpp"
#include "signed_measure.hpp"

using namespace sigmalab;
using namespace sigmalab::embed;

TEST_CASE("Psi closed forms") {
  const auto e = psi(*law::exponential(1.0));
  CHECK(e(2.0) == doctest::Approx(2.0).epsilon(5e-5));  // theta x^2 / 2
  const auto e3 = psi(*law::exponential(3.0));
  CHECK(e3(1.0) == doctest::Approx(1.5).epsilon(5e-5));
  const auto u = psi(*law::uniform(0.0, 1.0));
  CHECK(std::fabs(u(0.5) - (-0.5 - std::log(0.5))) < 1e-4);  // -x - ln(1 - x)
  CHECK(std::isinf(u(1.0)));
  const auto shifted = psi(*law::uniform(0.5, 1.5));
  CHECK(shifted(0.3) == 0.0);
}

TEST_CASE("phi inverts Psi and starts at the lower support point") {
  const auto ps = psi(*law::exponential(1.0));
  const auto phi = phi_from_psi(ps);
  CHECK(phi(0.0) == doctest::Approx(0.0).epsilon(1e-9));
  for (double z : {0.1, 0.5, 2.0, 8.0}) CHECK(phi(z) == doctest::Approx(std::sqrt(2.0 * z)).epsilon(1e-4));
  const auto pu = phi_from_psi(psi(*law::uniform(0.5, 1.5)));
  CHECK(pu(0.0) == doctest::Approx(0.5).epsilon(1e-9));
  const auto clock = clock_integral(phi);
  CHECK(clock(2.0) == doctest::Approx(2.0).epsilon(1e-2));  // int dz / sqrt(2 z) = sqrt(2 z)
}

TEST_CASE("flat Psi stretches collapse to their right end") {
  const MonotoneFn flat({0.0, 1.0, 2.0, 3.0}, {0.0, 1.0, 1.0, 2.0});
  const auto phi = phi_from_psi(flat);
  CHECK(phi(1.0) == doctest::Approx(2.0));
  CHECK(phi(1.5) == doctest::Approx(2.5));
}

TEST_CASE("stopped-path rules on stored paths") {
  const TimeGrid grid(0.1, 5);
  sigma::SigmaPath s{grid, {0.0, 0.2, 0.6, 0.1, 0.9, 0.3}, {}, {0.0, 0.0, 0.0, 0.0, 0.0, 0.0}};
  s.m = s.x;
  const auto t = stop_T_phi(s, [](double) { return 0.5; });
  REQUIRE(t.stop_index.has_value());
  CHECK(*t.stop_index == 2);
  const auto r = stop_R_h(s, [](double) { return 1.0 / 0.8; });
  CHECK(*r.stop_index == 4);
  const auto never = stop_T_phi(s, [](double) { return 5.0; });
  CHECK(never.truncated);
}

TEST_CASE("embedding a uniform law at moderate n") {
  const auto ens = measure::build_ensemble(TimeGrid::covering(1e-3, 20.0), 20240601, 20000,
                                           measure::DensityModel::constant_one(), 0);
  EmbedOptions opt;
  opt.low_power_below = 1000;
  opt.ks_threshold = 0.03;
  const auto r = embed::embed(ens, *law::uniform(0.0, 1.0), opt);
  CHECK(r.truncated_fraction < 0.005);
  CHECK(r.ks < 0.03);
  CHECK(r.pass);
  CHECK(r.defect_phi < r.defect_inverse);
  for (const auto& s : r.samples) {
    if (!s.truncated) CHECK(s.x <= 1.0 + 1e-12);
  }
}

TEST_CASE("crossing identity with a constant barrier") {
  const auto ens = measure::build_ensemble(TimeGrid::covering(1e-3, 5.0), 99, 20000,
                                           measure::DensityModel::constant_one(), 0);
  const auto c = crossing_probability(ens, [](double) { return 0.2; }, 0.2, stop::ScanOptions{}, 0);
  CHECK(std::fabs(c.estimate - (1.0 - std::exp(-1.0))) < 4.0 * c.se);
  CHECK(c.truncated == 0);
}

TEST_CASE("conditional lambda on an exponential null") {
  const CounterRng r(PathSeed{5, 0, stream::sample});
  const std::size_t n = 50000;
  std::vector<double> a(n), x(n), w(n, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    a[i] = -0.5 * std::log(r.uniform(2 * i));
    x[i] = 0.5;
  }
  const auto fit = conditional_lambda(a, x, w, 20);
  CHECK(fit.empty_bins == 0);
  for (const auto& b : fit.bins) CHECK(b.lambda == doctest::Approx(0.5));
  CHECK(fit.tail(1.0) == doctest::Approx(std::exp(-2.0)).epsilon(1e-3));
  CHECK_THROWS(conditional_lambda(a, x, w, 3));
}
