// Copyright 2026 The skedmd Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "skedmd/spec_string.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include "skedmd/errors.hpp"

namespace skedmd {

namespace {

std::string trim(std::string_view s) {
  auto begin = s.find_first_not_of(" \t");
  if (begin == std::string_view::npos) return {};
  auto end = s.find_last_not_of(" \t");
  return std::string(s.substr(begin, end - begin + 1));
}

}  // namespace

SpecString SpecString::parse(std::string_view text) {
  SpecString out;
  auto colon = text.find(':');
  out.kind_ = trim(text.substr(0, colon));
  if (out.kind_.empty()) {
    throw ConfigError("empty kind in spec string '" + std::string(text) + "'");
  }
  if (colon == std::string_view::npos) return out;

  std::string_view rest = text.substr(colon + 1);
  while (!rest.empty()) {
    auto comma = rest.find(',');
    std::string item = trim(rest.substr(0, comma));
    rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
    if (item.empty()) continue;
    auto eq = item.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("expected key=value in spec string, got '" + item + "'");
    }
    std::string key = trim(std::string_view(item).substr(0, eq));
    std::string value = trim(std::string_view(item).substr(eq + 1));
    if (key.empty() || value.empty()) {
      throw ConfigError("malformed entry '" + item + "' in spec string");
    }
    if (!out.values_.emplace(key, value).second) {
      throw ConfigError("duplicate key '" + key + "' in spec string");
    }
  }
  return out;
}

const std::string& SpecString::raw(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) {
    throw ConfigError("missing key '" + key + "' for kind '" + kind_ + "'");
  }
  used_[key] = true;
  return it->second;
}

double SpecString::number(const std::string& key) const {
  const std::string& s = raw(key);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(value)) {
    throw ConfigError("key '" + key + "' expects a number, got '" + s + "'");
  }
  return value;
}

double SpecString::number_or(const std::string& key, double fallback) const {
  return has(key) ? number(key) : fallback;
}

long SpecString::integer(const std::string& key) const {
  const std::string& s = raw(key);
  long value = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw ConfigError("key '" + key + "' expects an integer, got '" + s + "'");
  }
  return value;
}

long SpecString::integer_or(const std::string& key, long fallback) const {
  return has(key) ? integer(key) : fallback;
}

std::string SpecString::text_or(const std::string& key, const std::string& fallback) const {
  return has(key) ? raw(key) : fallback;
}

void SpecString::reject_unused() const {
  std::string unknown;
  for (const auto& [key, value] : values_) {
    if (!used_.count(key)) unknown += (unknown.empty() ? "" : ", ") + key;
  }
  if (!unknown.empty()) {
    throw ConfigError("unknown key(s) for kind '" + kind_ + "': " + unknown);
  }
}

std::string format_number(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

}  // namespace skedmd
