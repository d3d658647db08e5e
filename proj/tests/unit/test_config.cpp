// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include "config.hpp"
#include "errors.hpp"

using namespace sigmalab;
using sigmalab::config::Overrides;

TEST_CASE("strict validation") {
  CHECK_THROWS_AS(Overrides::parse("{\"seed\": 1, \"colour\": 2}"), ConfigError);
  CHECK_THROWS_AS(Overrides::parse("{\"dt\": -1}"), ConfigError);
  CHECK_THROWS_AS(Overrides::parse("{\"n_paths\": 0}"), ConfigError);
  CHECK_THROWS_AS(Overrides::parse("{\"driver\": \"levy\"}"), ConfigError);
  CHECK_THROWS_AS(Overrides::parse("{\"density\": {\"model\": \"x\"}}"), ConfigError);
  CHECK_THROWS_AS(Overrides::parse("{\"density\": {\"t_stop\": 1, \"extra\": 0}}"), ConfigError);
  CHECK_THROWS_AS(Overrides::parse("{\"dts\": [0.001]}"), ConfigError);
  CHECK_THROWS_AS(Overrides::parse("{\"dt\": 0.1, \"t_max\": 0.01}"), ConfigError);
  CHECK_THROWS_AS(Overrides::parse("[1, 2]"), ConfigError);
  CHECK_THROWS_AS(Overrides::parse("{seed: 1}"), ConfigError);
  CHECK_THROWS_AS(Overrides::load("/nonexistent/config.json"), ConfigError);
}

TEST_CASE("overrides land on identity defaults") {
  auto o = Overrides::parse(R"({"seed": 5, "n_paths": 10, "density": {"model": "brownian_stopped", "d0": 2},
                                "bridge_correction": false, "law": "exp:2", "output_dir": "out"})");
  o.set("t_max", "3");
  o.set("phi", "affine:1,1");
  o.set("dts", "[0.004, 0.001]");
  const auto p = o.apply(identity_info("thm3.5-crossing").defaults);
  CHECK(p.seed == 5);
  CHECK(p.n_paths == 10);
  CHECK(p.t_max == 3.0);
  CHECK(p.density.name() == "brownian_stopped");
  CHECK(p.density.d0 == 2.0);
  CHECK_FALSE(p.bridge);
  CHECK(p.law == "exp:2");
  CHECK(p.phi == "affine:1,1");
  CHECK(p.dts.size() == 2);
  CHECK(p.u == 0.2);
  CHECK(o.output_dir("x") == "out");
  CHECK_THROWS_AS(o.set("n_paths", "-3"), ConfigError);
  CHECK_THROWS_AS(o.set("nope", "1"), ConfigError);
}

TEST_CASE("registry") {
  CHECK(identity_registry().size() == 10);
  CHECK(identity_info("doob-maximal").defaults.u0 == 0.5);
  CHECK_THROWS_AS(identity_info("thm9.9"), ConfigError);
}

TEST_CASE("identity reports are reproducible and thread independent") {
  auto p = identity_info("cor3.9-exp-tail").defaults;
  p.n_paths = 3000;
  p.threads = 1;
  const auto a = stats::to_json(run_identity("cor3.9-exp-tail", p)).dump();
  p.threads = 3;
  const auto b = stats::to_json(run_identity("cor3.9-exp-tail", p)).dump();
  CHECK(a == b);
}
