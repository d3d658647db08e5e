// SPDX-License-Identifier: Apache-2.0
#include "commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "embedding.hpp"
#include "errors.hpp"
#include "functionals.hpp"
#include "parallel.hpp"
#include "stopping.hpp"
#include "table_io.hpp"
#include "target_law.hpp"

namespace sigmalab::cmd {

namespace {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

constexpr const char* kVersion = "0.1.0";

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

void write_json(const fs::path& path, const ojson& j) { write_text(path, j.dump(2) + "\n"); }

std::string utc_now() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

fs::path prepare_dir(const std::string& dir) {
  fs::path p(dir);
  std::error_code ec;
  fs::create_directories(p, ec);
  if (ec) throw ConfigError("cannot create output directory '" + dir + "': " + ec.message());
  return p;
}

// Everything but the timestamp is a pure function of the inputs.
void write_run_files(const fs::path& dir, const std::string& command, const ojson& resolved) {
  ojson cfg;
  cfg["command"] = command;
  cfg["version"] = kVersion;
  for (const auto& [k, v] : resolved.items()) cfg[k] = v;
  write_json(dir / "config.json", cfg);
  write_json(dir / "metadata.json", ojson{{"timestamp", utc_now()}});
}

// Parses every spec up front so that a bad config fails before any file is written.
void check_specs(const IdentityParams& p) {
  if (!p.law.empty()) law::parse_law(p.law);
  if (!p.phi.empty()) fn::parse_function(p.phi);
}

std::string status_word(bool pass) { return pass ? "PASS" : "FAIL"; }

}  // namespace

IdentityParams command_defaults(const std::string& command) {
  if (command == "embed") return identity_info("thm3.10-embed-ks").defaults;
  if (command == "bachelier") return identity_info("thm2.13-bachelier-order").defaults;
  IdentityParams p;
  if (command == "simulate") p.n_paths = 1000;
  return p;
}

Result verify(const std::string& id_arg, const config::Overrides& cfg) {
  const std::string id = id_arg.empty() ? cfg.identity() : id_arg;
  if (id.empty()) throw ConfigError("verify needs an identity id or 'all'");
  std::vector<std::string> ids;
  if (id == "all") {
    for (const auto& info : identity_registry()) ids.push_back(info.id);
  } else {
    ids.push_back(identity_info(id).id);
  }
  std::vector<IdentityParams> params;
  ojson resolved = ojson::object();
  for (const auto& i : ids) {
    params.push_back(cfg.apply(identity_info(i).defaults));
    check_specs(params.back());
    resolved[i] = params.back().to_json();
  }

  const auto dir = prepare_dir(cfg.output_dir("sigmalab-out/verify"));
  write_run_files(dir, "verify", ojson{{"identities", resolved}});

  Result res;
  res.output_dir = dir.string();
  std::string csv = stats::csv_header();
  bool any_fail = false;
  bool any_trunc = false;
  std::ostringstream log;
  for (std::size_t k = 0; k < ids.size(); ++k) {
    const auto report = run_identity(ids[k], params[k]);
    write_json(dir / (ids[k] + ".json"), stats::to_json(report));
    csv += stats::csv_rows(report);
    any_fail = any_fail || !report.pass;
    any_trunc = any_trunc || report.truncation_failed;
    log << status_word(report.pass) << "  " << ids[k];
    if (report.truncation_failed) log << "  (truncation budget exceeded)";
    log << "\n";
    for (const auto& c : report.checks) {
      log << "    " << (c.pass ? "ok   " : "FAIL ") << c.name << "  estimate=" << format_double(c.estimate)
          << " target=" << format_double(c.target) << " tol=" << format_double(c.tolerance) << "\n";
    }
  }
  write_text(dir / "summary.csv", csv);
  res.status = any_trunc ? Status::truncation : any_fail ? Status::failed : Status::pass;
  res.summary = log.str();
  return res;
}

Result embed(const config::Overrides& cfg) {
  const auto p = cfg.apply(command_defaults("embed"));
  if (p.law.empty()) throw ConfigError("embed needs a law (e.g. exp:1)");
  const auto target = law::parse_law(p.law);
  const auto dir = prepare_dir(cfg.output_dir("sigmalab-out/embed"));
  write_run_files(dir, "embed", p.to_json());

  const auto ens = measure::build_ensemble(TimeGrid::covering(p.dt, p.t_max), p.seed, p.n_paths, p.density, p.threads);
  embed::EmbedOptions opt;
  opt.scan.bridge_crossing = p.bridge;
  opt.scan.refine_threshold = p.bridge ? 4.0 : 0.0;
  opt.truncation_budget = p.truncation_budget;
  opt.threads = p.threads;
  const auto e = embed::embed(ens, *target, opt);

  std::string csv = "x_at_stop,weight,a_at_stop,truncated\n";
  for (const auto& s : e.samples) {
    csv += format_double(s.x) + "," + format_double(s.weight) + "," + format_double(s.a) + "," +
           (s.truncated ? "1" : "0") + "\n";
  }
  write_text(dir / "samples.csv", csv);

  ojson d;
  d["law"] = e.law;
  d["n_paths"] = e.samples.size();
  d["ks"] = e.ks;
  d["ks_threshold"] = opt.ks_threshold;
  d["low_power"] = e.low_power;
  d["pass"] = e.low_power ? ojson(nullptr) : ojson(e.pass);
  d["truncated_fraction"] = e.truncated_fraction;
  d["truncation_budget"] = p.truncation_budget;
  d["truncation_failed"] = e.truncation_failed;
  d["escalated"] = e.escalated;
  d["t_max_used"] = e.t_max;
  d["support"] = {e.support_low, e.support_high};
  d["support_ok"] = e.support_ok;
  d["beyond_table"] = e.beyond_table;
  d["crossing_value_defect"] = {{"x_equals_phi_of_a", e.defect_phi}, {"x_equals_inverse_phi_of_a", e.defect_inverse}};
  d["supported_identity"] = e.supported_identity;
  d["diagnostic"] = e.diagnostic;
  write_json(dir / "diagnostics.json", d);

  Result res;
  res.output_dir = dir.string();
  std::ostringstream log;
  log << (e.low_power ? "LOW-POWER" : status_word(e.pass)) << "  embed " << e.law << "  ks=" << format_double(e.ks)
      << " truncated=" << format_double(e.truncated_fraction) << "\n";
  res.summary = log.str();
  res.status = e.truncation_failed ? Status::truncation
               : (e.low_power || e.pass) ? Status::pass
                                         : Status::failed;
  return res;
}

Result psi(const config::Overrides& cfg) {
  const auto p = cfg.apply(command_defaults("psi"));
  if (p.law.empty()) throw ConfigError("psi needs a law (e.g. exp:1)");
  const auto target = law::parse_law(p.law);
  const auto dir = prepare_dir(cfg.output_dir("sigmalab-out/psi"));
  write_run_files(dir, "psi", ojson{{"law", p.law}});

  const auto ps = embed::psi(*target);
  const auto phi = embed::phi_from_psi(ps);
  constexpr double step = 0.01;
  const auto rows = static_cast<std::size_t>(std::floor(ps.x_hi / step + 1e-9)) + 1;
  const double z_top = ps(step * static_cast<double>(rows - 1));
  std::string csv = "x,psi,z,phi\n";
  for (std::size_t k = 0; k < rows; ++k) {
    const double x = step * static_cast<double>(k);
    const double z = rows > 1 ? z_top * static_cast<double>(k) / static_cast<double>(rows - 1) : 0.0;
    csv += format_double(x) + "," + format_double(ps(x)) + "," + format_double(z) + "," + format_double(phi(z)) + "\n";
  }
  write_text(dir / "psi.csv", csv);

  Result res;
  res.output_dir = dir.string();
  res.summary = "psi " + target->name() + ": " + std::to_string(rows) + " rows, x in [0, " +
                format_double(step * static_cast<double>(rows - 1)) + "]\n";
  return res;
}

Result bachelier(const config::Overrides& cfg) {
  auto p = cfg.apply(command_defaults("bachelier"));
  if (p.phi.empty()) throw ConfigError("bachelier needs phi (e.g. affine:1,1)");
  const auto phi = fn::parse_function(p.phi);
  if (p.dts.size() < 2) throw ConfigError("bachelier needs at least two dt values");
  std::sort(p.dts.begin(), p.dts.end(), std::greater<>());
  const auto dir = prepare_dir(cfg.output_dir("sigmalab-out/bachelier"));
  write_run_files(dir, "bachelier", p.to_json());

  const auto ladder = fn::bachelier_refinement(phi.f, p.dts, p.t_max, p.n_paths, p.seed, p.threads);
  std::string csv = "path,dt,sup_error\n";
  for (std::size_t i = 0; i < p.n_paths; ++i) {
    for (std::size_t l = 0; l < p.dts.size(); ++l) {
      csv += std::to_string(i) + "," + format_double(p.dts[l]) + "," + format_double(ladder.errors[l][i]) + "\n";
    }
  }
  write_text(dir / "errors.csv", csv);

  bool in_band = !ladder.clamped;
  for (double m : ladder.median_ratio) in_band = in_band && m >= 0.35 && m <= 0.7;
  ojson j;
  j["phi"] = p.phi;
  j["dts"] = p.dts;
  j["median_ratio"] = ladder.median_ratio;
  j["band"] = {0.35, 0.7};
  j["clock_clamped"] = ladder.clamped;
  j["pass"] = in_band;
  write_json(dir / "ladder.json", j);

  Result res;
  res.output_dir = dir.string();
  std::ostringstream log;
  log << status_word(in_band) << "  bachelier " << p.phi;
  for (double m : ladder.median_ratio) log << "  median_ratio=" << format_double(m);
  log << "\n";
  res.summary = log.str();
  res.status = in_band ? Status::pass : Status::failed;
  return res;
}

Result simulate(const config::Overrides& cfg) {
  const auto p = cfg.apply(command_defaults("simulate"));
  const TimeGrid grid = TimeGrid::covering(p.dt, p.t_max);
  const auto dir = prepare_dir(cfg.output_dir("sigmalab-out/simulate"));
  write_run_files(dir, "simulate", p.to_json());

  const auto ens = measure::build_ensemble(grid, p.seed, p.n_paths, p.density, p.threads);
  stop::ScanOptions scan;
  scan.bridge_crossing = false;
  scan.refine_threshold = 0.0;
  const auto ends = parallel_map(ens.size(), p.threads, [&](std::size_t i) {
    return stop::scan_first_crossing(ens.driver_seed(i), grid, static_cast<std::int64_t>(ens.records[i].g_bar_index),
                                     [](double) { return std::numeric_limits<double>::infinity(); }, scan);
  });
  std::string csv = "path,g_bar,d_terminal,weight,a_end,x_end\n";
  for (std::size_t i = 0; i < ens.size(); ++i) {
    csv += std::to_string(ens.records[i].path_index) + "," +
           format_double(grid.time(static_cast<std::int64_t>(ens.records[i].g_bar_index))) + "," +
           format_double(ens.records[i].d_terminal) + "," + format_double(ens.weights[i]) + "," +
           format_double(ends[i].a_at_stop) + "," + format_double(ends[i].x_at_stop) + "\n";
  }
  write_text(dir / "ensemble.csv", csv);

  const std::size_t shown = std::min<std::size_t>(ens.size(), 8);
  std::string paths = "path,t,d,a,x\n";
  for (std::size_t i = 0; i < shown; ++i) {
    const auto idx = ens.records[i].path_index;
    const auto sc = measure::simulate_density(p.density, PathSeed{p.seed, idx, stream::density}, grid);
    const auto s = measure::build_sigma_h(sc, PathSeed{p.seed, idx, stream::driver}, sigma::RunningMax::bridge);
    for (std::size_t k = 0; k < grid.n_points(); ++k) {
      paths += std::to_string(idx) + "," + format_double(grid.time(static_cast<std::int64_t>(k))) + "," +
               format_double(sc.d[k]) + "," + format_double(s.a[k]) + "," + format_double(s.x[k]) + "\n";
    }
  }
  write_text(dir / "paths.csv", paths);

  Result res;
  res.output_dir = dir.string();
  res.summary = "simulate " + p.density.name() + ": " + std::to_string(ens.size()) + " paths on " +
                std::to_string(grid.n_steps()) + " steps, " + std::to_string(ens.rejected_total) +
                " density resamples\n";
  return res;
}

}  // namespace sigmalab::cmd
