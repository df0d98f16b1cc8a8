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

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <numbers>
#include <random>
#include <vector>

namespace skedmd {

/// Stream tags mixed into derived seeds so ground-truth, training and
/// per-column streams never coincide.
enum class SeedStream : std::uint32_t {
  kGroundTruth = 0x7472u,
  kRealization = 0x7265u,
  kColumn = 0x636fu,
  kAuxiliary = 0x6178u,
};

/// Counter-based seed derivation: hashes (parent, stream, indices...) through
/// std::seed_seq, whose mixing is fully specified by the standard, so the
/// result is identical on every conforming platform.
inline std::uint64_t derive_seed(std::uint64_t parent, SeedStream stream,
                                 std::initializer_list<std::uint64_t> indices) {
  std::vector<std::uint32_t> words;
  words.reserve(3 + 2 * indices.size());
  words.push_back(static_cast<std::uint32_t>(parent));
  words.push_back(static_cast<std::uint32_t>(parent >> 32));
  words.push_back(static_cast<std::uint32_t>(stream));
  for (std::uint64_t i : indices) {
    words.push_back(static_cast<std::uint32_t>(i));
    words.push_back(static_cast<std::uint32_t>(i >> 32));
  }
  std::seed_seq seq(words.begin(), words.end());
  std::uint32_t out[2];
  seq.generate(out, out + 2);
  return (static_cast<std::uint64_t>(out[1]) << 32) | out[0];
}

/// mt19937_64 with fixed uniform and normal transforms. Uniforms take the top
/// 53 bits; normals use the Box-Muller transform and cache the second variate.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on the open interval (0, 1).
  double uniform_open() {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }

  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = uniform_open();
    const double u2 = uniform_open();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace skedmd
