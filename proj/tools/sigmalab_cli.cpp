// SPDX-License-Identifier: Apache-2.0
#include <cstdint>
#include <cstdlib>
#include <iomanip>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sigmalab/sigmalab.h"

namespace {

struct ConfigDeleter {
  void operator()(sl_config* c) const { sl_config_free(c); }
};
using ConfigPtr = std::unique_ptr<sl_config, ConfigDeleter>;

struct CommonArgs {
  std::string config_path;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  std::optional<std::uint64_t> n;
  std::optional<double> dt;
  std::optional<double> t_max;
  bool no_bridge = false;
  std::vector<std::string> sets;
  std::string law;
  std::string phi;
  std::string dts;
};

void add_common(CLI::App* sub, CommonArgs& a) {
  sub->add_option("-c,--config", a.config_path, "JSON config file");
  sub->add_option("-o,--out", a.out, "output directory");
  sub->add_option("--seed", a.seed, "global seed (beats SIGMA_LAB_SEED and the config)");
  sub->add_option("--threads", a.threads, "worker threads (default: all cores)");
  sub->add_option("-n,--n", a.n, "number of paths");
  sub->add_option("--dt", a.dt, "time step");
  sub->add_option("--t-max", a.t_max, "horizon");
  sub->add_flag("--no-bridge", a.no_bridge, "disable the bridge crossing correction");
  sub->add_option("--set", a.sets, "extra config key=value (JSON value)");
}

std::string exact(double v) {
  std::ostringstream ss;
  ss << std::setprecision(17) << v;
  return ss.str();
}

int report_error(sl_status s) {
  std::cerr << "error: " << sl_last_error() << "\n";
  if (sl_last_error_row() >= 0) std::cerr << "offending row: " << sl_last_error_row() << "\n";
  return static_cast<int>(s);
}

// Config file, then SIGMA_LAB_SEED, then flags.
sl_status build_config(const CommonArgs& a, sl_config* cfg) {
  sl_status s = SL_OK;
  if (!a.config_path.empty() && (s = sl_config_merge_file(cfg, a.config_path.c_str())) != SL_OK) return s;
  if (const char* env = std::getenv("SIGMA_LAB_SEED"); env != nullptr && *env != '\0') {
    if ((s = sl_config_set(cfg, "seed", env)) != SL_OK) return s;
  }
  const auto set = [&](const char* key, const std::string& value) {
    if (s == SL_OK) s = sl_config_set(cfg, key, value.c_str());
  };
  if (a.seed) set("seed", std::to_string(*a.seed));
  if (a.threads) s = s == SL_OK ? sl_config_set_threads(cfg, *a.threads) : s;
  if (a.n) set("n_paths", std::to_string(*a.n));
  if (a.dt) set("dt", exact(*a.dt));
  if (a.t_max) set("t_max", exact(*a.t_max));
  if (a.no_bridge) set("bridge_correction", "false");
  if (!a.out.empty()) set("output_dir", a.out);
  if (!a.law.empty()) set("law", a.law);
  if (!a.phi.empty()) set("phi", a.phi);
  if (!a.dts.empty()) set("dts", "[" + a.dts + "]");
  for (const auto& kv : a.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) {
      if (s == SL_OK) {
        std::cerr << "error: --set expects key=value, got '" << kv << "'\n";
        return SL_ERR_CONFIG;
      }
    } else {
      set(kv.substr(0, eq).c_str(), kv.substr(eq + 1));
    }
  }
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Monte Carlo verification lab for class (Sigma) processes"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(sl_version()));

  CommonArgs args;
  std::string identity;
  auto* verify = app.add_subcommand("verify", "run a registered identity (or 'all') and write its reports");
  verify->add_option("identity", identity, "identity id or 'all'");
  verify->add_option("--law", args.law, "target law override");
  verify->add_option("--phi", args.phi, "function override");
  auto* embed = app.add_subcommand("embed", "embed a target law and write the stopped sample");
  embed->add_option("--law", args.law, "target law, e.g. exp:1, uniform:0,1, csv:path")->required();
  auto* psi = app.add_subcommand("psi", "tabulate Psi and its inverse phi for a law");
  psi->add_option("--law", args.law, "target law")->required();
  auto* bach = app.add_subcommand("bachelier", "Euler vs closed form over a dt ladder");
  bach->add_option("--phi", args.phi, "phi, e.g. affine:1,1");
  bach->add_option("--dts", args.dts, "comma-separated step sizes");
  auto* sim = app.add_subcommand("simulate", "simulate a weighted ensemble and export paths");
  auto* list = app.add_subcommand("list", "print the registered identity ids");
  for (auto* sub : {verify, embed, psi, bach, sim}) add_common(sub, args);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : static_cast<int>(SL_ERR_CONFIG);
  }

  if (list->parsed()) {
    for (std::size_t i = 0; i < sl_identity_count(); ++i) std::cout << sl_identity_id(i) << "\n";
    return 0;
  }

  sl_config* raw = nullptr;
  if (sl_config_new(&raw) != SL_OK) return report_error(SL_ERR_INTERNAL);
  ConfigPtr cfg(raw);
  if (const sl_status s = build_config(args, cfg.get()); s != SL_OK) return report_error(s);

  char* summary = nullptr;
  sl_status s = SL_OK;
  if (verify->parsed()) {
    s = sl_cmd_verify(cfg.get(), identity.empty() ? nullptr : identity.c_str(), &summary);
  } else if (embed->parsed()) {
    s = sl_cmd_embed(cfg.get(), &summary);
  } else if (psi->parsed()) {
    s = sl_cmd_psi(cfg.get(), &summary);
  } else if (bach->parsed()) {
    s = sl_cmd_bachelier(cfg.get(), &summary);
  } else {
    s = sl_cmd_simulate(cfg.get(), &summary);
  }
  if (summary == nullptr) return report_error(s);
  std::cout << summary;
  sl_string_free(summary);
  return static_cast<int>(s);
}
