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

#include "skedmd/sde.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>

#include <boost/math/distributions/normal.hpp>

#include "skedmd/errors.hpp"
#include "skedmd/spec_string.hpp"

namespace skedmd {

namespace {

const boost::math::normal_distribution<double> kStandardNormal{};

double standard_normal_cdf(double z) { return boost::math::cdf(kStandardNormal, z); }

void check_domain(const Interval& domain) {
  if (!(domain.lower < domain.upper) || !std::isfinite(domain.lower) || !std::isfinite(domain.upper)) {
    throw ConfigError("sampler domain must be a finite interval with a < b");
  }
}

std::string interval_suffix(const Interval& domain) {
  return ",a=" + format_number(domain.lower) + ",b=" + format_number(domain.upper);
}

}  // namespace

double reflect_into(double x, const Interval& domain) {
  if (!std::isfinite(x)) throw IntegrationError("non-finite state during SDE integration");
  const double a = domain.lower;
  const double b = domain.upper;
  for (int fold = 0; fold < 8; ++fold) {
    if (x < a) {
      x = 2.0 * a - x;
    } else if (x > b) {
      x = 2.0 * b - x;
    } else {
      return x;
    }
  }
  // Far outside: fold with period 2(b - a) directly.
  const double width = b - a;
  double y = std::fmod(x - a, 2.0 * width);
  if (y < 0) y += 2.0 * width;
  if (y > width) y = 2.0 * width - y;
  return a + y;
}

long SdeSpec::steps() const { return static_cast<long>(std::ceil(horizon / dt - 1e-9)); }

void SdeSpec::validate() const {
  if (!drift) throw ConfigError("SDE drift is not set");
  if (!(sigma >= 0) || !std::isfinite(sigma)) throw ConfigError("SDE diffusion sigma must be >= 0");
  if (!(horizon > 0)) throw ConfigError("SDE horizon T must be positive");
  if (!(dt > 0) || !(dt <= horizon)) throw ConfigError("SDE step dt must satisfy 0 < dt <= T");
  check_domain(domain);
}

double euler_maruyama_reflected(const SdeSpec& spec, double x0, RandomStream& rng) {
  if (!spec.domain.contains(x0)) throw ConfigError("initial state outside the SDE domain");
  const long n = spec.steps();
  const double h = spec.horizon / static_cast<double>(n);
  const double noise = spec.sigma * std::sqrt(h);
  double x = x0;
  if (noise == 0.0) {
    for (long k = 0; k < n; ++k) x = reflect_into(x + spec.drift(x) * h, spec.domain);
    return x;
  }
  for (long k = 0; k < n; ++k) {
    x = x + spec.drift(x) * h + noise * rng.normal();
    if (x < spec.domain.lower || x > spec.domain.upper || !std::isfinite(x)) {
      x = reflect_into(x, spec.domain);
    }
  }
  return x;
}

double euler_maruyama_reflected(const SdeSpec& spec, double x0, std::uint64_t seed) {
  RandomStream rng(seed);
  return euler_maruyama_reflected(spec, x0, rng);
}

std::vector<std::pair<double, double>> euler_maruyama_path(const SdeSpec& spec, double x0,
                                                           std::uint64_t seed) {
  if (!spec.domain.contains(x0)) throw ConfigError("initial state outside the SDE domain");
  RandomStream rng(seed);
  const long n = spec.steps();
  const double h = spec.horizon / static_cast<double>(n);
  const double noise = spec.sigma * std::sqrt(h);
  std::vector<std::pair<double, double>> path;
  path.reserve(static_cast<std::size_t>(n) + 1);
  double x = x0;
  path.emplace_back(0.0, x);
  for (long k = 0; k < n; ++k) {
    double dw = noise == 0.0 ? 0.0 : rng.normal();
    x = reflect_into(x + spec.drift(x) * h + noise * dw, spec.domain);
    path.emplace_back(static_cast<double>(k + 1) * h, x);
  }
  return path;
}

void write_path_csv(std::ostream& out, const std::vector<std::pair<double, double>>& path) {
  out << "time,state\n";
  out.precision(17);
  for (const auto& [t, x] : path) out << t << ',' << x << '\n';
}

ReflectedSdeSampler::ReflectedSdeSampler(SdeSpec sde, std::string spec)
    : sde_(std::move(sde)), spec_(std::move(spec)) {
  sde_.validate();
}

Eigen::VectorXd ReflectedSdeSampler::sample(double x, Eigen::Index m, std::uint64_t seed) const {
  if (m < 1) throw ConfigError("sample count m must be >= 1");
  RandomStream rng(seed);
  Eigen::VectorXd out(m);
  for (Eigen::Index l = 0; l < m; ++l) out(l) = euler_maruyama_reflected(sde_, x, rng);
  return out;
}

SamplerPtr ou_sampler(double theta, double sigma, double horizon, Interval domain, double dt) {
  SdeSpec sde{[theta](double x) { return -theta * x; }, sigma, domain, horizon, dt};
  std::string spec = "ou:theta=" + format_number(theta) + ",sigma=" + format_number(sigma) +
                     ",T=" + format_number(horizon) + ",dt=" + format_number(dt) +
                     interval_suffix(domain);
  return std::make_shared<ReflectedSdeSampler>(std::move(sde), std::move(spec));
}

double doublewell_drift(double z) {
  const double u = 4.0 * z - 2.0;
  return (u - u * u * u) / 4.0;
}

SamplerPtr doublewell_sampler(double sigma, double horizon, Interval domain, double dt) {
  SdeSpec sde{doublewell_drift, sigma / 4.0, domain, horizon, dt};
  std::string spec = "doublewell:sigma=" + format_number(sigma) + ",T=" + format_number(horizon) +
                     ",dt=" + format_number(dt) + interval_suffix(domain);
  return std::make_shared<ReflectedSdeSampler>(std::move(sde), std::move(spec));
}

TruncatedNormalDensity::TruncatedNormalDensity(double location, Interval domain)
    : location_(location), domain_(domain) {
  check_domain(domain);
  cdf_lower_ = standard_normal_cdf(domain.lower - location);
  normalizer_ = standard_normal_cdf(domain.upper - location) - cdf_lower_;
}

double TruncatedNormalDensity::operator()(double y) const {
  if (y < domain_.lower || y > domain_.upper) return 0.0;
  const double z = y - location_;
  return std::exp(-0.5 * z * z) / (std::sqrt(2.0 * std::numbers::pi) * normalizer_);
}

double TruncatedNormalDensity::quantile(double u) const {
  double y = location_ + boost::math::quantile(kStandardNormal, cdf_lower_ + u * normalizer_);
  // Round-off can land a hair outside the closed interval.
  return std::clamp(y, domain_.lower, domain_.upper);
}

Eigen::VectorXd TruncatedNormalSampler::sample(double x, Eigen::Index m, std::uint64_t seed) const {
  if (m < 1) throw ConfigError("sample count m must be >= 1");
  TruncatedNormalDensity density(x, domain_);
  RandomStream rng(seed);
  Eigen::VectorXd out(m);
  for (Eigen::Index l = 0; l < m; ++l) out(l) = density.quantile(rng.uniform_open());
  return out;
}

std::string TruncatedNormalSampler::spec() const {
  return "truncated-normal:a=" + format_number(domain_.lower) + ",b=" + format_number(domain_.upper);
}

SamplerPtr truncated_normal_sampler(Interval domain) {
  check_domain(domain);
  return std::make_shared<TruncatedNormalSampler>(domain);
}

DeterministicSampler::DeterministicSampler(std::function<double(double)> map, std::string name,
                                           Interval domain)
    : map_(std::move(map)), name_(std::move(name)), domain_(domain) {
  check_domain(domain);
}

double DeterministicSampler::map(double x) const {
  const double y = map_(x);
  if (!domain_.contains(y)) {
    throw ConfigError("deterministic map '" + name_ + "' sends " + format_number(x) + " to " +
                      format_number(y) + ", outside the domain");
  }
  return y;
}

Eigen::VectorXd DeterministicSampler::sample(double x, Eigen::Index m, std::uint64_t) const {
  if (m < 1) throw ConfigError("sample count m must be >= 1");
  return Eigen::VectorXd::Constant(m, map(x));
}

std::string DeterministicSampler::spec() const {
  return "deterministic:map=" + name_ + interval_suffix(domain_);
}

SamplerPtr deterministic_sampler(std::function<double(double)> map, std::string name, Interval domain) {
  return std::make_shared<DeterministicSampler>(std::move(map), std::move(name), domain);
}

SamplerPtr deterministic_sampler(std::string_view map_name, Interval domain) {
  std::function<double(double)> map;
  if (map_name == "identity") {
    map = [](double x) { return x; };
  } else if (map_name == "square") {
    map = [](double x) { return x * x; };
  } else if (map_name == "sqrt") {
    map = [](double x) { return std::sqrt(x); };
  } else if (map_name == "half") {
    map = [](double x) { return 0.5 * x; };
  } else {
    throw ConfigError("unknown deterministic map '" + std::string(map_name) +
                      "' (expected identity, square, sqrt or half)");
  }
  return deterministic_sampler(std::move(map), std::string(map_name), domain);
}

SamplerPtr parse_sampler(std::string_view text) {
  SpecString spec = SpecString::parse(text);
  Interval domain{spec.number_or("a", 0.0), spec.number_or("b", 1.0)};
  SamplerPtr out;
  if (spec.kind() == "ou") {
    out = ou_sampler(spec.number_or("theta", 1.0), spec.number_or("sigma", 0.2),
                     spec.number_or("T", 1.0), domain, spec.number_or("dt", 1e-3));
  } else if (spec.kind() == "doublewell") {
    out = doublewell_sampler(spec.number_or("sigma", 0.2), spec.number_or("T", 1.0), domain,
                             spec.number_or("dt", 1e-3));
  } else if (spec.kind() == "truncated-normal") {
    out = truncated_normal_sampler(domain);
  } else if (spec.kind() == "deterministic") {
    out = deterministic_sampler(spec.text_or("map", "identity"), domain);
  } else {
    throw ConfigError("unknown sampler kind '" + spec.kind() +
                      "' (expected ou, doublewell, truncated-normal or deterministic)");
  }
  spec.reject_unused();
  return out;
}

double simpson(const std::function<double(double)>& f, double a, double b, int nodes) {
  if (nodes < 3) nodes = 3;
  if (nodes % 2 == 0) ++nodes;
  const int intervals = nodes - 1;
  const double h = (b - a) / intervals;
  double odd = 0.0;
  double even = 0.0;
  for (int i = 1; i < intervals; ++i) {
    const double y = f(a + i * h);
    (i % 2 ? odd : even) += y;
  }
  return h / 3.0 * (f(a) + f(b) + 4.0 * odd + 2.0 * even);
}

double exact_koopman_quadrature(const std::function<double(double)>& f, double x, int nodes,
                                Interval domain) {
  TruncatedNormalDensity density(x, domain);
  return simpson([&](double y) { return f(y) * density(y); }, domain.lower, domain.upper, nodes);
}

}  // namespace skedmd
