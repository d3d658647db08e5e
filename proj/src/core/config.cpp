// SPDX-License-Identifier: Apache-2.0
#include "config.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "errors.hpp"

namespace sigmalab::config {

namespace {

using json = nlohmann::json;

[[noreturn]] void bad(const std::string& key, const std::string& why) {
  throw ConfigError("config key '" + key + "': " + why);
}

double positive(const std::string& key, const json& v) {
  if (!v.is_number()) bad(key, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x) || !(x > 0.0)) bad(key, "must be positive and finite");
  return x;
}

void number(const std::string& key, const json& v) {
  if (!v.is_number() || !std::isfinite(v.get<double>())) bad(key, "expected a finite number");
}

void count(const std::string& key, const json& v) {
  if (!v.is_number_unsigned() || v.get<std::uint64_t>() == 0) bad(key, "expected a positive integer");
}

void text(const std::string& key, const json& v) {
  if (!v.is_string()) bad(key, "expected a string");
}

void unit_interval(const std::string& key, const json& v) {
  const double x = positive(key, v);
  if (!(x < 1.0)) bad(key, "must lie in (0, 1)");
}

void density(const std::string& key, const json& v) {
  if (!v.is_object()) bad(key, "expected an object {model, d0, t_stop}");
  for (const auto& [k, x] : v.items()) {
    if (k == "model") {
      text(key + ".model", x);
      measure::DensityModel::from_name(x.get<std::string>());
    } else if (k == "d0") {
      number(key + ".d0", x);
    } else if (k == "t_stop") {
      positive(key + ".t_stop", x);
    } else {
      bad(key + "." + k, "unknown key");
    }
  }
}

const std::map<std::string, std::function<void(const std::string&, const json&)>>& validators() {
  static const std::map<std::string, std::function<void(const std::string&, const json&)>> table = {
      {"seed",
       [](const std::string& k, const json& v) {
         if (!v.is_number_unsigned()) bad(k, "expected a non-negative integer");
       }},
      {"dt", [](const std::string& k, const json& v) { positive(k, v); }},
      {"t_max", [](const std::string& k, const json& v) { positive(k, v); }},
      {"n_paths", count},
      {"density", density},
      {"driver",
       [](const std::string& k, const json& v) {
         text(k, v);
         if (v.get<std::string>() != "brownian") bad(k, "only \"brownian\" is supported");
       }},
      {"bridge_correction",
       [](const std::string& k, const json& v) {
         if (!v.is_boolean()) bad(k, "expected true or false");
       }},
      {"truncation_budget", unit_interval},
      {"threads",
       [](const std::string& k, const json& v) {
         if (!v.is_number_unsigned()) bad(k, "expected a non-negative integer");
       }},
      {"output_dir", text},
      {"identity", text},
      {"law", text},
      {"phi", text},
      {"u", [](const std::string& k, const json& v) { positive(k, v); }},
      {"level", [](const std::string& k, const json& v) { positive(k, v); }},
      {"u0", unit_interval},
      {"dts",
       [](const std::string& k, const json& v) {
         if (!v.is_array() || v.size() < 2) bad(k, "expected an array of at least two step sizes");
         for (const auto& x : v) positive(k, x);
       }},
      {"n_bins",
       [](const std::string& k, const json& v) {
         if (!v.is_number_unsigned() || v.get<std::uint64_t>() < 5) bad(k, "expected an integer >= 5");
       }},
      {"passage_dt", [](const std::string& k, const json& v) { positive(k, v); }},
      {"eps_g", unit_interval},
  };
  return table;
}

}  // namespace

void validate(const nlohmann::json& doc) {
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  const auto& table = validators();
  for (const auto& [key, value] : doc.items()) {
    const auto it = table.find(key);
    if (it == table.end()) bad(key, "unknown key");
    it->second(key, value);
  }
  if (doc.contains("dt") && doc.contains("t_max") && doc["t_max"].get<double>() < doc["dt"].get<double>()) {
    throw ConfigError("config: t_max must be at least dt");
  }
}

Overrides Overrides::parse(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  validate(doc);
  Overrides o;
  o.doc_ = std::move(doc);
  return o;
}

Overrides Overrides::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

void Overrides::set_json(const std::string& key, const nlohmann::json& value) {
  json probe = json::object();
  probe[key] = value;
  validate(probe);
  doc_[key] = value;
}

void Overrides::set(const std::string& key, const std::string& value_text) {
  json value;
  try {
    value = json::parse(value_text);
  } catch (const json::parse_error&) {
    value = value_text;
  }
  // Numeric-looking law or phi specs stay strings.
  const auto it = validators().find(key);
  if (it != validators().end() && !value.is_string()) {
    try {
      it->second(key, value);
    } catch (const ConfigError&) {
      value = value_text;
    }
  }
  set_json(key, value);
}

void Overrides::merge(const Overrides& other) {
  for (const auto& [k, v] : other.doc_.items()) doc_[k] = v;
}

IdentityParams Overrides::apply(IdentityParams p) const {
  const auto& d = doc_;
  if (d.contains("seed")) p.seed = d["seed"].get<std::uint64_t>();
  if (d.contains("dt")) p.dt = d["dt"].get<double>();
  if (d.contains("t_max")) p.t_max = d["t_max"].get<double>();
  if (d.contains("n_paths")) p.n_paths = d["n_paths"].get<std::size_t>();
  if (d.contains("density")) {
    const auto& m = d["density"];
    const std::string model = m.value("model", p.density.name());
    p.density = measure::DensityModel::from_name(model, m.value("d0", p.density.d0), m.value("t_stop", p.density.t_stop));
  }
  if (d.contains("bridge_correction")) p.bridge = d["bridge_correction"].get<bool>();
  if (d.contains("truncation_budget")) p.truncation_budget = d["truncation_budget"].get<double>();
  if (d.contains("threads")) p.threads = d["threads"].get<unsigned>();
  if (d.contains("law")) p.law = d["law"].get<std::string>();
  if (d.contains("phi")) p.phi = d["phi"].get<std::string>();
  if (d.contains("u")) p.u = d["u"].get<double>();
  if (d.contains("level")) p.level = d["level"].get<double>();
  if (d.contains("u0")) p.u0 = d["u0"].get<double>();
  if (d.contains("dts")) p.dts = d["dts"].get<std::vector<double>>();
  if (d.contains("n_bins")) p.n_bins = d["n_bins"].get<std::size_t>();
  if (d.contains("passage_dt")) p.passage_dt = d["passage_dt"].get<double>();
  if (d.contains("eps_g")) p.eps_g = d["eps_g"].get<double>();
  if (p.t_max < p.dt) throw ConfigError("config: t_max must be at least dt");
  return p;
}

std::string Overrides::output_dir(const std::string& fallback) const {
  return doc_.contains("output_dir") ? doc_["output_dir"].get<std::string>() : fallback;
}

std::string Overrides::identity() const {
  return doc_.contains("identity") ? doc_["identity"].get<std::string>() : std::string{};
}

unsigned Overrides::threads() const { return doc_.contains("threads") ? doc_["threads"].get<unsigned>() : 0U; }

}  // namespace sigmalab::config
