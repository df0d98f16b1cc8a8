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

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "skedmd/errors.hpp"
#include "skedmd/random.hpp"

namespace skedmd {

/// Closed interval [lower, upper] used as the state space.
struct Interval {
  double lower = 0.0;
  double upper = 1.0;

  double width() const { return upper - lower; }
  bool contains(double x) const { return x >= lower && x <= upper; }
};

/// Folds x back into the interval by mirror reflection at the endpoints
/// (x < a -> 2a - x, x > b -> 2b - x) until it lies inside. Throws
/// IntegrationError for non-finite input.
double reflect_into(double x, const Interval& domain);

/// Scalar SDE dX = b(X) dt + sigma dW on an interval with reflecting walls.
struct SdeSpec {
  std::function<double(double)> drift;
  double sigma = 0.0;
  Interval domain;
  double horizon = 1.0;
  double dt = 1e-3;

  /// ceil(horizon / dt), ignoring round-off below 1e-9 steps.
  long steps() const;
  void validate() const;
};

/// Euler-Maruyama with per-step folding reflection. Uses steps() equal
/// substeps of size horizon / steps() and returns the state at the horizon.
double euler_maruyama_reflected(const SdeSpec& spec, double x0, RandomStream& rng);
double euler_maruyama_reflected(const SdeSpec& spec, double x0, std::uint64_t seed);

/// Full path (time, state) including the initial point, for debugging.
std::vector<std::pair<double, double>> euler_maruyama_path(const SdeSpec& spec, double x0,
                                                           std::uint64_t seed);
void write_path_csv(std::ostream& out, const std::vector<std::pair<double, double>>& path);

enum class SamplerKind { kReflectedSde, kTruncatedNormal, kDeterministicMap };

/// The transition kernel rho_x: draws i.i.d. samples of Y given X = x.
/// Implementations are stateless; sample() with identical arguments returns
/// identical vectors and may be called concurrently.
class ConditionalSampler {
 public:
  virtual ~ConditionalSampler() = default;

  virtual Eigen::VectorXd sample(double x, Eigen::Index m, std::uint64_t seed) const = 0;
  virtual SamplerKind kind() const = 0;
  virtual Interval domain() const = 0;
  /// Canonical spec string; parse_sampler(spec()) rebuilds an equivalent sampler.
  virtual std::string spec() const = 0;
};

using SamplerPtr = std::shared_ptr<const ConditionalSampler>;

class ReflectedSdeSampler final : public ConditionalSampler {
 public:
  ReflectedSdeSampler(SdeSpec sde, std::string spec);

  Eigen::VectorXd sample(double x, Eigen::Index m, std::uint64_t seed) const override;
  SamplerKind kind() const override { return SamplerKind::kReflectedSde; }
  Interval domain() const override { return sde_.domain; }
  std::string spec() const override { return spec_; }
  const SdeSpec& sde() const { return sde_; }

 private:
  SdeSpec sde_;
  std::string spec_;
};

/// Reflected Ornstein-Uhlenbeck process dX = -theta X dt + sigma dW.
SamplerPtr ou_sampler(double theta = 1.0, double sigma = 0.2, double horizon = 1.0,
                      Interval domain = {}, double dt = 1e-3);

/// Double-well drift mapped affinely onto (0, 1):
///   b(z) = ((4z - 2) - (4z - 2)^3) / 4,  diffusion sigma / 4.
double doublewell_drift(double z);
SamplerPtr doublewell_sampler(double sigma = 0.2, double horizon = 1.0, Interval domain = {},
                              double dt = 1e-3);

/// Normal(x, 1) conditioned on the interval; density G(x, y) / H(x) with
/// H(x) = F(b - x) - F(a - x).
class TruncatedNormalDensity {
 public:
  explicit TruncatedNormalDensity(double location, Interval domain = {});

  double operator()(double y) const;
  double normalizer() const { return normalizer_; }
  double location() const { return location_; }
  /// Inverse-CDF draw for u in (0, 1).
  double quantile(double u) const;

 private:
  double location_;
  Interval domain_;
  double cdf_lower_;
  double normalizer_;
};

class TruncatedNormalSampler final : public ConditionalSampler {
 public:
  explicit TruncatedNormalSampler(Interval domain = {}) : domain_(domain) {}

  Eigen::VectorXd sample(double x, Eigen::Index m, std::uint64_t seed) const override;
  SamplerKind kind() const override { return SamplerKind::kTruncatedNormal; }
  Interval domain() const override { return domain_; }
  std::string spec() const override;

 private:
  Interval domain_;
};

SamplerPtr truncated_normal_sampler(Interval domain = {});

/// Dirac transition rho_x = delta_{F(x)}.
class DeterministicSampler final : public ConditionalSampler {
 public:
  DeterministicSampler(std::function<double(double)> map, std::string name, Interval domain = {});

  Eigen::VectorXd sample(double x, Eigen::Index m, std::uint64_t seed) const override;
  SamplerKind kind() const override { return SamplerKind::kDeterministicMap; }
  Interval domain() const override { return domain_; }
  std::string spec() const override;
  double map(double x) const;

 private:
  std::function<double(double)> map_;
  std::string name_;
  Interval domain_;
};

/// Named maps: "identity", "square", "sqrt", "half".
SamplerPtr deterministic_sampler(std::string_view map_name, Interval domain = {});
SamplerPtr deterministic_sampler(std::function<double(double)> map, std::string name,
                                 Interval domain = {});

/// Builds a sampler from a spec string:
///   ou:theta=1,sigma=0.2,T=1,dt=0.001,a=0,b=1
///   doublewell:sigma=0.2,T=1,dt=0.001
///   truncated-normal:a=0,b=1
///   deterministic:map=square
SamplerPtr parse_sampler(std::string_view spec);

/// Composite Simpson rule on [a, b] with `nodes` points (rounded up to odd).
double simpson(const std::function<double(double)>& f, double a, double b, int nodes);

/// (K f)(x) = int f(y) p(x, y) dy for the truncated-normal transition,
/// by composite Simpson quadrature with the given node count.
double exact_koopman_quadrature(const std::function<double(double)>& f, double x, int nodes = 10001,
                                Interval domain = {});

}  // namespace skedmd
