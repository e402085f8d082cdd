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

#include "msddp/key_value.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

namespace msddp {
namespace {

std::string trim(const std::string& s) {
  auto first = std::find_if_not(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); });
  auto last = std::find_if_not(s.rbegin(), s.rend(), [](unsigned char c) { return std::isspace(c); });
  if (first >= last.base()) return {};
  return std::string(first, last.base());
}

double parse_double(const std::string& key, const std::string& text) {
  std::istringstream in(text);
  in.imbue(std::locale::classic());
  double value = 0.0;
  in >> value;
  if (in.fail() || !(in >> std::ws).eof()) {
    throw ConfigError(key, "invalid number for key '" + key + "': '" + text + "'");
  }
  return value;
}

}  // namespace

KeyValueFile KeyValueFile::parse(std::istream& in, const std::string& source) {
  KeyValueFile kv;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      const std::string key = trim(line);
      throw ConfigError(key, source + ":" + std::to_string(line_no) + ": key '" + key +
                                 "' has no '=' separator");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) {
      throw ConfigError("", source + ":" + std::to_string(line_no) + ": empty key");
    }
    kv.entries_[key] = value;
  }
  return kv;
}

KeyValueFile KeyValueFile::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot open config file '" + path.string() + "'");
  return parse(in, path.string());
}

double KeyValueFile::get_double(const std::string& key, double fallback) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) return fallback;
  return parse_double(qualified(key), it->second);
}

int KeyValueFile::get_int(const std::string& key, int fallback) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) return fallback;
  const std::string& text = it->second;
  int value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    const std::string full = qualified(key);
    throw ConfigError(full, "invalid integer for key '" + full + "': '" + text + "'");
  }
  return value;
}

std::string KeyValueFile::get_string(const std::string& key, const std::string& fallback) const {
  auto it = entries_.find(key);
  return it == entries_.end() ? fallback : it->second;
}

std::vector<double> KeyValueFile::get_vector(const std::string& key,
                                             std::vector<double> fallback) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) return fallback;
  std::string text = it->second;
  std::replace(text.begin(), text.end(), ',', ' ');
  std::istringstream in(text);
  std::vector<double> out;
  std::string token;
  while (in >> token) out.push_back(parse_double(qualified(key), token));
  if (out.empty()) throw ConfigError(qualified(key), "empty list for key '" + qualified(key) + "'");
  return out;
}

void KeyValueFile::require_known(const std::set<std::string>& known,
                                 const std::vector<std::string>& known_prefixes) const {
  for (const auto& [key, value] : entries_) {
    if (known.count(key)) continue;
    const bool prefixed = std::any_of(known_prefixes.begin(), known_prefixes.end(),
                                      [&](const std::string& p) { return key.rfind(p, 0) == 0; });
    if (!prefixed) throw ConfigError(qualified(key), "unknown config key '" + qualified(key) + "'");
  }
}

KeyValueFile KeyValueFile::scoped(const std::string& prefix) const {
  KeyValueFile out;
  out.prefix_ = prefix_ + prefix;
  for (const auto& [key, value] : entries_) {
    if (key.rfind(prefix, 0) == 0) out.entries_[key.substr(prefix.size())] = value;
  }
  return out;
}

}  // namespace msddp
