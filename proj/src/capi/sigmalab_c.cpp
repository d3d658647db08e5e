// SPDX-License-Identifier: Apache-2.0
#include "sigmalab/sigmalab.h"

#include <cstdlib>
#include <cstring>
#include <exception>
#include <new>
#include <string>

#include "commands.hpp"
#include "config.hpp"
#include "embedding.hpp"
#include "errors.hpp"
#include "grid_rng.hpp"
#include "identities.hpp"
#include "target_law.hpp"

struct sl_config {
  sigmalab::config::Overrides overrides;
};

struct sl_report {
  sigmalab::stats::IdentityReport report;
};

namespace {

thread_local std::string g_error;
thread_local long g_error_row = -1;

void clear_error() {
  g_error.clear();
  g_error_row = -1;
}

sl_status fail(sl_status s, const std::string& msg, long row = -1) {
  g_error = msg;
  g_error_row = row;
  return s;
}

char* dup(const std::string& s) {
  char* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (p == nullptr) throw std::bad_alloc();
  std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

template <class Fn>
sl_status guarded(Fn&& fn) {
  clear_error();
  try {
    return fn();
  } catch (const sigmalab::MonotonicityError& e) {
    return fail(SL_ERR_CONFIG, e.what(), static_cast<long>(e.row()));
  } catch (const sigmalab::ConfigError& e) {
    return fail(SL_ERR_CONFIG, e.what());
  } catch (const sigmalab::TruncationError& e) {
    return fail(SL_ERR_TRUNCATION, e.what());
  } catch (const std::invalid_argument& e) {
    return fail(SL_ERR_CONFIG, e.what());
  } catch (const std::domain_error& e) {
    return fail(SL_ERR_CONFIG, e.what());
  } catch (const std::exception& e) {
    return fail(SL_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(SL_ERR_INTERNAL, "unknown error");
  }
}

sl_status run_command(const sl_config* cfg, char** summary,
                      sigmalab::cmd::Result (*fn)(const sigmalab::config::Overrides&)) {
  if (summary != nullptr) *summary = nullptr;
  if (cfg == nullptr) return fail(SL_ERR_ARGUMENT, "null config");
  return guarded([&] {
    const auto r = fn(cfg->overrides);
    if (summary != nullptr) *summary = dup(r.summary);
    return static_cast<sl_status>(r.status);
  });
}

}  // namespace

extern "C" {

SL_API const char* sl_version(void) { return "0.1.0"; }
SL_API const char* sl_last_error(void) { return g_error.c_str(); }
SL_API long sl_last_error_row(void) { return g_error_row; }
SL_API void sl_string_free(char* s) { std::free(s); }

SL_API sl_status sl_config_new(sl_config** out) {
  if (out == nullptr) return fail(SL_ERR_ARGUMENT, "null output pointer");
  return guarded([&] {
    *out = new sl_config{};
    return SL_OK;
  });
}

SL_API void sl_config_free(sl_config* cfg) { delete cfg; }

SL_API sl_status sl_config_merge_json(sl_config* cfg, const char* json_text) {
  if (cfg == nullptr || json_text == nullptr) return fail(SL_ERR_ARGUMENT, "null argument");
  return guarded([&] {
    cfg->overrides.merge(sigmalab::config::Overrides::parse(json_text));
    return SL_OK;
  });
}

SL_API sl_status sl_config_merge_file(sl_config* cfg, const char* path) {
  if (cfg == nullptr || path == nullptr) return fail(SL_ERR_ARGUMENT, "null argument");
  return guarded([&] {
    cfg->overrides.merge(sigmalab::config::Overrides::load(path));
    return SL_OK;
  });
}

SL_API sl_status sl_config_set(sl_config* cfg, const char* key, const char* value) {
  if (cfg == nullptr || key == nullptr || value == nullptr) return fail(SL_ERR_ARGUMENT, "null argument");
  return guarded([&] {
    cfg->overrides.set(key, value);
    return SL_OK;
  });
}

SL_API sl_status sl_config_set_seed(sl_config* cfg, uint64_t seed) {
  if (cfg == nullptr) return fail(SL_ERR_ARGUMENT, "null config");
  return guarded([&] {
    cfg->overrides.set_json("seed", seed);
    return SL_OK;
  });
}

SL_API sl_status sl_config_set_threads(sl_config* cfg, unsigned threads) {
  if (cfg == nullptr) return fail(SL_ERR_ARGUMENT, "null config");
  return guarded([&] {
    cfg->overrides.set_json("threads", threads);
    return SL_OK;
  });
}

SL_API sl_status sl_config_to_json(const sl_config* cfg, char** out) {
  if (cfg == nullptr || out == nullptr) return fail(SL_ERR_ARGUMENT, "null argument");
  return guarded([&] {
    *out = dup(cfg->overrides.doc().dump());
    return SL_OK;
  });
}

SL_API size_t sl_identity_count(void) { return sigmalab::identity_registry().size(); }

SL_API const char* sl_identity_id(size_t i) {
  const auto& reg = sigmalab::identity_registry();
  return i < reg.size() ? reg[i].id.c_str() : nullptr;
}

SL_API sl_status sl_run_identity(const sl_config* cfg, const char* id, sl_report** out) {
  if (cfg == nullptr || id == nullptr || out == nullptr) return fail(SL_ERR_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] {
    const auto params = cfg->overrides.apply(sigmalab::identity_info(id).defaults);
    *out = new sl_report{sigmalab::run_identity(id, params)};
    return SL_OK;
  });
}

SL_API void sl_report_free(sl_report* r) { delete r; }
SL_API int sl_report_pass(const sl_report* r) { return r != nullptr && r->report.pass ? 1 : 0; }
SL_API int sl_report_truncation_failed(const sl_report* r) {
  return r != nullptr && r->report.truncation_failed ? 1 : 0;
}
SL_API double sl_report_truncated_fraction(const sl_report* r) {
  return r != nullptr ? r->report.truncated_fraction : 0.0;
}
SL_API size_t sl_report_check_count(const sl_report* r) { return r != nullptr ? r->report.checks.size() : 0; }

SL_API sl_status sl_report_check(const sl_report* r, size_t i, sl_check* out) {
  if (r == nullptr || out == nullptr) return fail(SL_ERR_ARGUMENT, "null argument");
  if (i >= r->report.checks.size()) return fail(SL_ERR_ARGUMENT, "check index out of range");
  const auto& c = r->report.checks[i];
  *out = sl_check{c.name.c_str(), c.estimate, c.target, c.se, c.tolerance, c.pass ? 1 : 0};
  return SL_OK;
}

SL_API sl_status sl_report_json(const sl_report* r, char** out) {
  if (r == nullptr || out == nullptr) return fail(SL_ERR_ARGUMENT, "null argument");
  return guarded([&] {
    *out = dup(sigmalab::stats::to_json(r->report).dump(2));
    return SL_OK;
  });
}

SL_API sl_status sl_report_csv(const sl_report* r, char** out) {
  if (r == nullptr || out == nullptr) return fail(SL_ERR_ARGUMENT, "null argument");
  return guarded([&] {
    *out = dup(sigmalab::stats::csv_header() + sigmalab::stats::csv_rows(r->report));
    return SL_OK;
  });
}

SL_API sl_status sl_cmd_verify(const sl_config* cfg, const char* id, char** summary) {
  if (summary != nullptr) *summary = nullptr;
  if (cfg == nullptr) return fail(SL_ERR_ARGUMENT, "null config");
  const std::string which = id != nullptr ? id : "";
  return guarded([&] {
    const auto r = sigmalab::cmd::verify(which, cfg->overrides);
    if (summary != nullptr) *summary = dup(r.summary);
    return static_cast<sl_status>(r.status);
  });
}

SL_API sl_status sl_cmd_embed(const sl_config* cfg, char** summary) {
  return run_command(cfg, summary, &sigmalab::cmd::embed);
}
SL_API sl_status sl_cmd_psi(const sl_config* cfg, char** summary) {
  return run_command(cfg, summary, &sigmalab::cmd::psi);
}
SL_API sl_status sl_cmd_bachelier(const sl_config* cfg, char** summary) {
  return run_command(cfg, summary, &sigmalab::cmd::bachelier);
}
SL_API sl_status sl_cmd_simulate(const sl_config* cfg, char** summary) {
  return run_command(cfg, summary, &sigmalab::cmd::simulate);
}

SL_API void sl_philox4x32(const uint32_t counter[4], const uint32_t key[2], uint32_t out[4]) {
  const auto r = sigmalab::philox4x32({counter[0], counter[1], counter[2], counter[3]}, {key[0], key[1]});
  for (int i = 0; i < 4; ++i) out[i] = r[static_cast<std::size_t>(i)];
}

SL_API sl_status sl_gaussian_increments(uint64_t seed, uint64_t path_index, double dt, int64_t n_steps, double* out) {
  if (out == nullptr && n_steps > 0) return fail(SL_ERR_ARGUMENT, "null output buffer");
  return guarded([&] {
    const sigmalab::TimeGrid grid(dt, n_steps);
    const auto inc = sigmalab::gaussian_increments({seed, path_index, sigmalab::stream::driver}, grid);
    std::copy(inc.begin(), inc.end(), out);
    return SL_OK;
  });
}

SL_API sl_status sl_psi_eval(const char* law_spec, const double* x, size_t n, double* out) {
  if (law_spec == nullptr || ((x == nullptr || out == nullptr) && n > 0)) return fail(SL_ERR_ARGUMENT, "null argument");
  return guarded([&] {
    const auto ps = sigmalab::embed::psi(*sigmalab::law::parse_law(law_spec));
    for (size_t i = 0; i < n; ++i) out[i] = ps(x[i]);
    return SL_OK;
  });
}

SL_API sl_status sl_phi_eval(const char* law_spec, const double* z, size_t n, double* out) {
  if (law_spec == nullptr || ((z == nullptr || out == nullptr) && n > 0)) return fail(SL_ERR_ARGUMENT, "null argument");
  return guarded([&] {
    const auto phi = sigmalab::embed::phi_from_psi(sigmalab::embed::psi(*sigmalab::law::parse_law(law_spec)));
    for (size_t i = 0; i < n; ++i) out[i] = phi(z[i]);
    return SL_OK;
  });
}

}  // extern "C"
