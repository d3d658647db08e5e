// SPDX-License-Identifier: Apache-2.0
// Acceptance suite: one line per criterion, exit 0 iff every criterion holds.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "embedding.hpp"
#include "identities.hpp"
#include "mc_stats.hpp"
#include "signed_measure.hpp"
#include "table_io.hpp"

using namespace sigmalab;

namespace {

struct Options {
  std::string out = "acceptance-reports";
  unsigned threads = 0;
};

struct Criterion {
  int number;
  std::string title;
  bool pass = false;
  std::string detail;
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

class Suite {
 public:
  explicit Suite(Options o) : opt_(std::move(o)) { std::filesystem::create_directories(opt_.out); }

  stats::IdentityReport run(const std::string& id) {
    auto p = identity_info(id).defaults;
    p.threads = opt_.threads;
    const auto t0 = std::chrono::steady_clock::now();
    auto r = run_identity(id, p);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::ofstream(std::filesystem::path(opt_.out) / (id + ".json")) << stats::to_json(r).dump(2) << "\n";
    csv_ += stats::csv_rows(r);
    std::cerr << "  ran " << id << " in " << fmt(secs) << " s\n";
    return r;
  }

  void record(Criterion c) {
    std::cout << (c.pass ? "PASS" : "FAIL") << "  criterion " << c.number << ": " << c.title;
    if (!c.detail.empty()) std::cout << " (" << c.detail << ")";
    std::cout << std::endl;
    all_ = all_ && c.pass;
  }

  bool finish() {
    std::ofstream(std::filesystem::path(opt_.out) / "summary.csv") << stats::csv_header() << csv_;
    return all_;
  }

  const Options& options() const { return opt_; }

 private:
  Options opt_;
  std::string csv_;
  bool all_ = true;
};

const stats::Check* find_check(const stats::IdentityReport& r, const std::string& name) {
  for (const auto& c : r.checks) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

std::string worst(const stats::IdentityReport& r) {
  std::string failing;
  for (const auto& c : r.checks) {
    if (!c.pass) failing += (failing.empty() ? "" : ", ") + c.name;
  }
  if (r.truncation_failed) failing += (failing.empty() ? "" : ", ") + std::string("truncation budget");
  return failing.empty() ? "" : "failing: " + failing;
}

Criterion identity_criterion(Suite& s, int number, const std::string& title, const std::vector<std::string>& ids,
                             const std::function<std::string(const std::vector<stats::IdentityReport>&)>& describe) {
  std::vector<stats::IdentityReport> reports;
  bool pass = true;
  std::string failing;
  for (const auto& id : ids) {
    reports.push_back(s.run(id));
    pass = pass && reports.back().pass;
    const auto w = worst(reports.back());
    if (!w.empty()) failing += id + " " + w + "; ";
  }
  return {number, title, pass, failing + describe(reports)};
}

// ---- criterion 10 ----------------------------------------------------------

Criterion degeneracy_and_determinism(const Options& opt) {
  std::string detail;
  bool pass = true;
  // D = 1 against the plain pipeline, bit for bit.
  const auto grid = TimeGrid::covering(1e-3, 20.0);
  const auto d1 = measure::build_ensemble(grid, 20240601, 4000, measure::DensityModel::constant_one(), opt.threads);
  const auto plain = measure::plain_ensemble(grid, 20240601, 4000);
  bool same = d1.weights == plain.weights && d1.size() == plain.size();
  for (std::size_t i = 0; same && i < d1.size(); ++i) {
    same = d1.records[i].g_bar_index == plain.records[i].g_bar_index &&
           d1.records[i].path_index == plain.records[i].path_index;
  }
  embed::EmbedOptions eo;
  eo.threads = opt.threads;
  const auto law = law::exponential(1.0);
  const auto e1 = embed::embed(d1, *law, eo);
  const auto e2 = embed::embed(plain, *law, eo);
  for (std::size_t i = 0; same && i < e1.samples.size(); ++i) {
    same = e1.samples[i].x == e2.samples[i].x && e1.samples[i].a == e2.samples[i].a &&
           e1.samples[i].weight == e2.samples[i].weight;
  }
  const auto short_grid = TimeGrid::covering(1e-3, 1.0);
  for (std::uint64_t i = 0; same && i < 200; ++i) {
    const auto sc = measure::simulate_density(measure::DensityModel::constant_one(), {7, i, stream::density}, short_grid);
    const auto s = measure::build_sigma_h(sc, {7, i, stream::driver});
    const auto r = sigma::reflect_from_driver(short_grid, cumulate(gaussian_increments({7, i, stream::driver}, short_grid)));
    same = s.x == r.x && s.a == r.a && s.m == r.m;
  }
  pass = pass && same;
  detail += same ? "D=1 equals plain" : "D=1 differs from plain";

  // Every identity, twice, with different worker counts.
  std::size_t reproducible = 0;
  for (const auto& info : identity_registry()) {
    auto p = info.defaults;
    p.n_paths = std::min<std::size_t>(p.n_paths, 2000);
    if (info.id == "thm3.10-embed-ks") p.t_max = 20.0;
    p.threads = 1;
    const auto a = stats::to_json(run_identity(info.id, p)).dump();
    p.threads = 3;
    const auto b = stats::to_json(run_identity(info.id, p)).dump();
    if (a == b) {
      ++reproducible;
    } else {
      detail += "; " + info.id + " not reproducible";
      pass = false;
    }
  }
  detail += "; " + std::to_string(reproducible) + "/" + std::to_string(identity_registry().size()) +
            " reports byte-identical across runs and thread counts";
  return {10, "degeneracy and determinism", pass, detail};
}

// ---- criterion 11 ----------------------------------------------------------

struct NullRule {
  std::string name;
  std::function<bool(std::uint64_t rep)> rejects;
};

Criterion calibration() {
  constexpr int reps = 100;
  constexpr std::size_t n = 100000;
  const auto draw = [](std::uint64_t rep, std::uint32_t tag) { return CounterRng(PathSeed{0xC0FFEEULL + rep, 0, tag}); };
  // P'-type weights |1 + Z|, independent of the values.
  const auto weights = [&](std::uint64_t rep) {
    const auto r = draw(rep, stream::weights);
    std::vector<double> w(n);
    for (std::size_t i = 0; i < n; ++i) w[i] = std::fabs(1.0 + r.normal(i));
    return w;
  };
  std::vector<NullRule> rules;
  rules.push_back({"mean 4se", [&](std::uint64_t rep) {
                     const auto r = draw(rep, stream::sample);
                     const double p = 1.0 - std::exp(-1.0);
                     std::vector<double> v(n);
                     for (std::size_t i = 0; i < n; ++i) v[i] = r.uniform(i) < p ? 1.0 : 0.0;
                     const auto m = stats::weighted_mean_se(v, weights(rep));
                     return std::fabs(m.mean - p) > 4.0 * m.se;
                   }});
  rules.push_back({"paired 4se", [&](std::uint64_t rep) {
                     const auto r = draw(rep, stream::sample);
                     std::vector<double> a(n), b(n), w(n, 1.0);
                     for (std::size_t i = 0; i < n; ++i) {
                       const double m = std::min(1.0, std::exp(r.normal(2 * i) - 0.5));
                       b[i] = m;
                       a[i] = r.uniform(2 * i + 1) < m ? 1.0 : 0.0;
                     }
                     const auto d = stats::weighted_paired_difference(a, b, w);
                     return std::fabs(d.mean) > 4.0 * d.se;
                   }});
  rules.push_back({"ks 0.02", [&](std::uint64_t rep) {
                     const auto r = draw(rep, stream::sample);
                     std::vector<double> x(n);
                     for (std::size_t i = 0; i < n; ++i) x[i] = -std::log(r.uniform(i));
                     return stats::ks_weighted(x, weights(rep), [](double t) { return 1.0 - std::exp(-t); }) >= 0.02;
                   }});
  rules.push_back({"tail sup 0.02", [&](std::uint64_t rep) {
                     const auto r = draw(rep, stream::sample);
                     std::vector<double> a(n), grid;
                     for (std::size_t i = 0; i < n; ++i) a[i] = -0.5 * std::log(r.uniform(i));
                     for (int k = 0; k <= 200; ++k) grid.push_back(0.01 * k);
                     const auto tail = stats::weighted_tail(a, weights(rep), grid);
                     double sup = 0.0;
                     for (std::size_t k = 0; k < grid.size(); ++k) sup = std::max(sup, std::fabs(tail[k] - std::exp(-grid[k] / 0.5)));
                     return sup >= 0.02;
                   }});
  rules.push_back({"self-consistency 0.03", [&](std::uint64_t rep) {
                     const auto r = draw(rep, stream::sample);
                     std::vector<double> a(n), x(n);
                     for (std::size_t i = 0; i < n; ++i) {
                       a[i] = -0.5 * std::log(r.uniform(2 * i));
                       x[i] = -0.5 * std::log(r.uniform(2 * i + 1));
                     }
                     const auto w = weights(rep);
                     const auto fit = embed::conditional_lambda(a, x, w, 25);
                     std::vector<double> sorted = a;
                     std::sort(sorted.begin(), sorted.end());
                     const double lo = sorted[n / 20], hi = sorted[n - n / 20];
                     std::vector<double> grid;
                     for (int k = 0; k <= 200; ++k) grid.push_back(lo + (hi - lo) * k / 200.0);
                     const auto tail = stats::weighted_tail(a, w, grid);
                     double sup = 0.0;
                     for (std::size_t k = 0; k < grid.size(); ++k) sup = std::max(sup, std::fabs(tail[k] - fit.tail(grid[k])));
                     return sup >= 0.03;
                   }});
  rules.push_back({"martingale 4se", [&](std::uint64_t rep) {
                     const auto r = draw(rep, stream::sample);
                     std::vector<std::vector<double>> paths(n, std::vector<double>(5, 0.0));
                     for (std::size_t i = 0; i < n; ++i) {
                       for (std::size_t k = 1; k < 5; ++k) paths[i][k] = paths[i][k - 1] + 0.5 * r.normal(4 * i + k - 1);
                     }
                     const std::vector<std::pair<std::size_t, std::size_t>> pairs{{0, 1}, {1, 2}, {2, 4}, {0, 4}};
                     return !stats::martingale_increment_test(paths, weights(rep), pairs).pass;
                   }});
  bool pass = true;
  std::string detail;
  for (const auto& rule : rules) {
    int rejected = 0;
    for (int rep = 0; rep < reps; ++rep) rejected += rule.rejects(static_cast<std::uint64_t>(rep));
    pass = pass && rejected <= 1;
    detail += (detail.empty() ? "" : ", ") + rule.name + " " + std::to_string(rejected) + "/" + std::to_string(reps);
  }
  return {11, "calibration under the null", pass, "rejections: " + detail};
}

}  // namespace

int main(int argc, char** argv) {
  Options opt;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--out" && i + 1 < argc) {
      opt.out = argv[++i];
    } else if (a == "--threads" && i + 1 < argc) {
      opt.threads = static_cast<unsigned>(std::stoul(argv[++i]));
    } else {
      std::cerr << "usage: sigmalab_acceptance [--out DIR] [--threads N]\n";
      return 2;
    }
  }
  Suite s(opt);

  s.record(identity_criterion(s, 1, "Skorokhod embedding of Exp(1) and Uniform(0,1)", {"thm3.10-embed-ks"},
                              [](const auto& r) {
                                return "ks exp=" + fmt(find_check(r[0], "ks[exp:1]")->estimate) +
                                       " uniform=" + fmt(find_check(r[0], "ks[uniform:0,1]")->estimate) +
                                       ", truncated max=" + fmt(r[0].truncated_fraction);
                              }));
  s.record(identity_criterion(s, 2, "crossing probability 1 - e^-1 under D = 1 and brownian_stopped(1,1)",
                              {"thm3.5-crossing"}, [](const auto& r) {
                                const auto* a = find_check(r[0], "crossing[constant_one]");
                                const auto* b = find_check(r[0], "crossing[brownian_stopped]");
                                return "D=1 " + fmt(a->estimate) + " se " + fmt(a->se) + ", Sigma(H) " +
                                       fmt(b->estimate) + " se " + fmt(b->se);
                              }));
  s.record(identity_criterion(s, 3, "law of A_inf: exponential tail and binned self-consistency",
                              {"cor3.9-exp-tail", "lambda-selfconsistency"}, [](const auto& r) {
                                return "tail sup " + fmt(r[0].checks[0].estimate) + ", self-consistency sup " +
                                       fmt(r[1].checks[0].estimate);
                              }));
  s.record(identity_criterion(s, 4, "Doob maximal identity from u0 = 0.5", {"doob-maximal"}, [](const auto& r) {
    return "p=" + fmt(r[0].checks[0].estimate) + " se " + fmt(r[0].checks[0].se);
  }));
  s.record(identity_criterion(s, 5, "last-passage law at t = 0.25, 1, 4", {"thm2.7-lastpassage"}, [](const auto& r) {
    std::string d;
    for (const auto& c : r[0].checks) {
      if (c.name.rfind("last_passage", 0) == 0) d += (d.empty() ? "" : ", ") + fmt(c.estimate - c.target);
    }
    return "differences " + d;
  }));
  s.record(identity_criterion(s, 6, "Azema-Yor battery for f = 1, e^-z, 1 + z", {"prop2.11-maxid"},
                              [](const auto& r) { return std::to_string(r[0].checks.size()) + " checks"; }));
  s.record(identity_criterion(s, 7, "Bachelier strong order and phi = 1 reproduction", {"thm2.13-bachelier-order"},
                              [](const auto& r) { return "median ratio " + fmt(r[0].checks[0].estimate); }));
  s.record(identity_criterion(s, 8, "sign identity and balayage class membership", {"sign-identity"},
                              [](const auto&) { return std::string("1000 paths"); }));
  s.record(identity_criterion(s, 9, "relative-martingale representation at t = 0.5, 1", {"cor2.9-representation"},
                              [](const auto& r) {
                                return "differences " + fmt(r[0].checks[0].estimate - r[0].checks[0].target) + ", " +
                                       fmt(r[0].checks[1].estimate - r[0].checks[1].target);
                              }));
  s.record(degeneracy_and_determinism(s.options()));
  s.record(calibration());
  return s.finish() ? 0 : 1;
}
