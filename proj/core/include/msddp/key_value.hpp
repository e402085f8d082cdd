/*
 Copyright 2026 The msddp Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/

#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace msddp {

/// Parse failure; `key()` names the offending entry (or is empty for syntax
/// errors on a line without a key).
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& key, const std::string& what)
      : std::runtime_error(what), key_(key) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

/// Flat `key = value` text. Blank lines and `#` comments are ignored; later
/// entries override earlier ones.
class KeyValueFile {
 public:
  KeyValueFile() = default;

  static KeyValueFile parse(std::istream& in, const std::string& source = "<stream>");
  static KeyValueFile load(const std::filesystem::path& path);

  bool contains(const std::string& key) const { return entries_.count(key) != 0; }
  void set(const std::string& key, const std::string& value) { entries_[key] = value; }
  const std::map<std::string, std::string>& entries() const { return entries_; }

  double get_double(const std::string& key, double fallback) const;
  int get_int(const std::string& key, int fallback) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  /// Whitespace- or comma-separated list of numbers.
  std::vector<double> get_vector(const std::string& key, std::vector<double> fallback) const;

  /// Throws ConfigError for the first key that is neither in `known` nor
  /// starts with one of `known_prefixes`.
  void require_known(const std::set<std::string>& known,
                     const std::vector<std::string>& known_prefixes = {}) const;

  /// Entries whose key starts with `prefix`, with the prefix stripped.
  /// Errors raised by the scoped file name the full key.
  KeyValueFile scoped(const std::string& prefix) const;

  /// `key` with the prefixes stripped by scoped() restored.
  std::string qualified(const std::string& key) const { return prefix_ + key; }

 private:
  std::map<std::string, std::string> entries_;
  std::string prefix_;
};

}  // namespace msddp
