// Copyright 2026 The spdc-design Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Flat "key = value" text with optional [section] headers. A key inside a
// section is stored as "section.key". '#' and ';' start comments. Values
// keep their inner whitespace; surrounding quotes are stripped.

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "spdc/errors.hpp"

namespace spdc {

struct KeyValueEntry {
  std::string value;
  int line = 0;
};

class KeyValueFile {
 public:
  static KeyValueFile parse(std::string_view text, std::string origin = "<text>") {
    KeyValueFile kv;
    kv.origin_ = std::move(origin);
    std::string section;
    int line_no = 0;
    std::istringstream in{std::string(text)};
    std::string raw;
    while (std::getline(in, raw)) {
      ++line_no;
      std::string line = strip_comment(raw);
      line = trim(line);
      if (line.empty()) continue;
      if (line.front() == '[') {
        if (line.back() != ']') kv.fail(line_no, "unterminated section header");
        section = trim(line.substr(1, line.size() - 2));
        if (section.empty()) kv.fail(line_no, "empty section name");
        continue;
      }
      auto eq = line.find('=');
      if (eq == std::string::npos) kv.fail(line_no, "expected 'key = value'");
      std::string key = trim(line.substr(0, eq));
      std::string value = unquote(trim(line.substr(eq + 1)));
      if (key.empty()) kv.fail(line_no, "empty key");
      if (!section.empty()) key = section + "." + key;
      if (kv.entries_.count(key)) {
        kv.fail(line_no, "duplicate key '" + key + "' (first defined on line " +
                             std::to_string(kv.entries_[key].line) + ")");
      }
      kv.entries_[key] = {value, line_no};
      kv.order_.push_back(key);
    }
    return kv;
  }

  static KeyValueFile load(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError(path + ": cannot open file");
    std::stringstream ss;
    ss << f.rdbuf();
    return parse(ss.str(), path);
  }

  const std::string& origin() const { return origin_; }
  bool has(const std::string& key) const { return entries_.count(key) != 0; }
  const std::vector<std::string>& keys() const { return order_; }

  const KeyValueEntry* find(const std::string& key) const {
    auto it = entries_.find(key);
    return it == entries_.end() ? nullptr : &it->second;
  }

  int line_of(const std::string& key) const {
    auto* e = find(key);
    return e ? e->line : 0;
  }

  std::optional<std::string> get_string(const std::string& key) const {
    if (auto* e = find(key)) return e->value;
    return std::nullopt;
  }

  std::optional<double> get_double(const std::string& key) const {
    auto* e = find(key);
    if (!e) return std::nullopt;
    return to_double(key, e->value, e->line);
  }

  std::optional<long> get_int(const std::string& key) const {
    auto* e = find(key);
    if (!e) return std::nullopt;
    long v = 0;
    const auto* first = e->value.data();
    const auto* last = first + e->value.size();
    auto [p, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || p != last) {
      fail(e->line, "key '" + key + "': expected an integer, got '" + e->value + "'");
    }
    return v;
  }

  std::optional<bool> get_bool(const std::string& key) const {
    auto* e = find(key);
    if (!e) return std::nullopt;
    if (e->value == "true" || e->value == "yes" || e->value == "1") return true;
    if (e->value == "false" || e->value == "no" || e->value == "0") return false;
    fail(e->line, "key '" + key + "': expected true/false, got '" + e->value + "'");
  }

  std::optional<std::vector<double>> get_doubles(const std::string& key) const {
    auto* e = find(key);
    if (!e) return std::nullopt;
    std::vector<double> out;
    for (const auto& item : split_list(e->value, true)) out.push_back(to_double(key, item, e->line));
    return out;
  }

  std::optional<std::vector<std::string>> get_strings(const std::string& key) const {
    auto* e = find(key);
    if (!e) return std::nullopt;
    return split_list(e->value);
  }

  /// Throws on the first key not in `known` and not matching one of `prefixes`.
  void reject_unknown(const std::set<std::string>& known,
                      const std::vector<std::string>& prefixes = {}) const {
    for (const auto& key : order_) {
      if (known.count(key)) continue;
      bool ok = false;
      for (const auto& p : prefixes) ok = ok || key.rfind(p, 0) == 0;
      if (!ok) fail(line_of(key), "unknown key '" + key + "'");
    }
  }

  [[noreturn]] void fail(int line, const std::string& msg) const {
    throw ConfigError(origin_ + ":" + std::to_string(line) + ": " + msg);
  }

  static std::vector<std::string> split_list(const std::string& value, bool keep_empty = false) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(value);
    while (std::getline(in, item, ',')) {
      item = trim(item);
      if (keep_empty || !item.empty()) out.push_back(item);
    }
    return out;
  }

  static std::string trim(std::string_view s) {
    const char* ws = " \t\r\n";
    auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos) return {};
    auto e = s.find_last_not_of(ws);
    return std::string(s.substr(b, e - b + 1));
  }

 private:
  static std::string strip_comment(const std::string& s) {
    bool quoted = false;
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (s[i] == '"') quoted = !quoted;
      if (!quoted && (s[i] == '#' || s[i] == ';')) return s.substr(0, i);
    }
    return s;
  }

  static std::string unquote(std::string s) {
    if (s.size() >= 2 && s.front() == '"' && s.back() == '"') return s.substr(1, s.size() - 2);
    return s;
  }

  double to_double(const std::string& key, const std::string& text, int line) const {
    double v = 0;
    const auto* first = text.data();
    const auto* last = first + text.size();
    auto [p, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || p != last || !std::isfinite(v)) {
      fail(line, "key '" + key + "': expected a number, got '" + text + "'");
    }
    return v;
  }

  std::string origin_;
  std::map<std::string, KeyValueEntry> entries_;
  std::vector<std::string> order_;
};

}  // namespace spdc
