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

#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "skedmd/kernels.hpp"

namespace skedmd {

// A-priori L-infinity error bounds for the stochastic kEDMD approximant.
// Constants C, C1 and the operator norm of the Koopman operator on the
// native space cannot be computed from data; they are inputs (default 1).
// All bounds are stated for observables with native-space norm <= 1.

inline double wendland_rate(int l) { return l + 0.5; }
inline double matern_rate(double nu) { return std::floor(nu); }

/// C (1 + opnorm) h^(l + 1/2).
double deterministic_bound_wendland(double c, double h, int l, double operator_norm = 1.0);
/// C (1 + opnorm) h^floor(nu).
double deterministic_bound_matern(double c, double h, double nu, double operator_norm = 1.0);
/// C (h^(l + 1/2) + sqrt(lambda)).
double regularized_deterministic_bound(double c, double h, int l, double lambda);
/// C (h^floor(nu) + sqrt(lambda)).
double regularized_deterministic_bound_matern(double c, double h, double nu, double lambda);

/// min(1, 2 d exp(-m eps^2 / (2 k_inf))).
double mc_failure_probability(long d, long m, double epsilon, double k_inf = 1.0);
/// Inverse of the above: eps = sqrt(2 k_inf ln(2d / delta) / m).
double epsilon_for_failure_probability(long d, long m, double delta, double k_inf = 1.0);
/// eps sqrt(k_inf) * stability.
double mc_bound(double epsilon, double k_inf, double stability);
/// eps sqrt(k_inf) sqrt(d / lambda).
double regularized_mc_bound(double epsilon, double k_inf, long d, double lambda);

/// Hilbert-space Hoeffding variant with d inside the exponent.
struct L2BoundResult {
  double bound = 0.0;                // eps * ||(K_X)^{-1} k_X(x)||_2
  double failure_probability = 0.0;  // min(1, 2 exp(-m eps^2 / (8 d k_inf)))
  double l2_factor = 0.0;
  double l1_factor = 0.0;            // ||(K_X)^{-1} k_X(x)||_1 >= l2_factor
};
L2BoundResult alternative_l2_bound(long m, double epsilon, double k_inf, const PointSet& points, double x);
double l2_failure_probability(long d, long m, double epsilon, double k_inf = 1.0);

enum class BoundKind { kPlain, kRegularized };

struct BoundRequest {
  BoundKind kind = BoundKind::kPlain;
  KernelFamily family = KernelFamily::kWendland;
  double fill_distance = 0.1;
  double smoothness = 1.0;  // l for Wendland, nu for Matern
  double lambda = 0.0;
  double epsilon = 0.0;
  long d = 1;
  long m = 1;
  /// Required for kPlain (see koopman stability_factor); ignored for kRegularized.
  std::optional<double> stability;
  double c1 = 1.0;
  double c2 = 1.0;  // sqrt(profile(0)); 1 for the normalized kernels
  double operator_norm = 1.0;
  double norm_scale = 1.0;  // ||f||_H multiplier
};

struct BoundReport {
  BoundRequest inputs;
  double rate = 0.0;
  double stability = 0.0;
  double deterministic_part = 0.0;
  double probabilistic_part = 0.0;
  double epsilon = 0.0;
  double failure_probability = 0.0;

  double total() const { return deterministic_part + probabilistic_part; }
  nlohmann::json to_json(const std::string& experiment_id = "") const;
  static std::string csv_header();
  std::string csv_row(const std::string& experiment_id = "") const;
};

/// Deterministic part + probabilistic part with the attached failure
/// probability 2 d exp(-m eps^2 / (2 c2^2)), clipped to 1.
BoundReport total_bound(const BoundRequest& request);

std::string to_string(BoundKind kind);
BoundKind parse_bound_kind(const std::string& text);
std::string to_string(KernelFamily family);
KernelFamily parse_kernel_family(const std::string& text);

}  // namespace skedmd
