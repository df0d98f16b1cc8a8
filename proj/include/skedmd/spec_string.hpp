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

#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace skedmd {

/// A parsed "kind:key=value,key=value" string, the format used for kernel
/// and sampler selection. Keys are unique; lookups record which keys were
/// consumed so leftovers can be reported as unknown.
class SpecString {
 public:
  static SpecString parse(std::string_view text);

  const std::string& kind() const { return kind_; }
  bool has(const std::string& key) const { return values_.count(key) != 0; }

  double number(const std::string& key) const;
  double number_or(const std::string& key, double fallback) const;
  long integer(const std::string& key) const;
  long integer_or(const std::string& key, long fallback) const;
  std::string text_or(const std::string& key, const std::string& fallback) const;

  /// Throws ConfigError naming every key that was never read.
  void reject_unused() const;

 private:
  const std::string& raw(const std::string& key) const;

  std::string kind_;
  std::map<std::string, std::string> values_;
  mutable std::map<std::string, bool> used_;
};

/// Shortest round-tripping decimal representation of a double.
std::string format_number(double value);

}  // namespace skedmd
