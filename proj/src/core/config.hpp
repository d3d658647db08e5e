// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>

#include <json.hpp>

#include "identities.hpp"

namespace sigmalab::config {

/// Validated set of user overrides. Keys not present fall back to per-command or
/// per-identity defaults.
class Overrides {
 public:
  Overrides() = default;

  /// Parses and validates a JSON document (object). Throws ConfigError.
  static Overrides parse(const std::string& text);
  static Overrides load(const std::string& path);

  /// Sets one key from its JSON text (or a bare string for string-valued keys), validated.
  void set(const std::string& key, const std::string& value_text);
  void set_json(const std::string& key, const nlohmann::json& value);
  /// Merges `other` on top of this one.
  void merge(const Overrides& other);

  bool has(const std::string& key) const { return doc_.contains(key); }
  const nlohmann::json& doc() const { return doc_; }

  /// `base` with every present parameter key applied.
  IdentityParams apply(IdentityParams base) const;

  std::string output_dir(const std::string& fallback) const;
  std::string identity() const;
  unsigned threads() const;

 private:
  nlohmann::json doc_ = nlohmann::json::object();
};

/// Throws ConfigError when `doc` has an unknown key or a value of the wrong type/range.
void validate(const nlohmann::json& doc);

}  // namespace sigmalab::config
