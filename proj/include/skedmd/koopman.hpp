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
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "skedmd/kernels.hpp"
#include "skedmd/linalg.hpp"
#include "skedmd/sde.hpp"

namespace skedmd {

using Observable = std::function<double(double)>;

/// Monte Carlo estimate of the propagated kernel matrix,
///   entries(i, j) = (1/m) sum_l k(x_i, y_j^(l)),  y_j^(l) ~ rho_{x_j} i.i.d.
/// Column j is driven by column_seeds[j] alone.
struct PropagatedMatrix {
  Eigen::MatrixXd entries;
  Eigen::Index samples_per_column = 0;
  std::vector<std::uint64_t> column_seeds;
};

/// Seed of column j for a propagated matrix built from `seed`.
std::uint64_t column_seed(std::uint64_t seed, Eigen::Index column);

/// Draws m samples per design point (1-D points) and averages kernel vectors.
/// Columns may be filled concurrently; the result does not depend on `threads`.
PropagatedMatrix build_propagated_matrix(const PointSet& points, const ConditionalSampler& sampler,
                                         Eigen::Index m, std::uint64_t seed, int threads = 1);

/// K_{X,F(X)} = (k(x_i, F(x_j))), the exact propagated matrix of a deterministic map.
Eigen::MatrixXd map_propagated_matrix(const PointSet& points, const Observable& map);

/// Fitted approximant x -> f_X^T (K_X + lambda I)^{-1} K^MC (K_X + lambda I)^{-1} k_X(x),
/// stored through its weight vector w so that evaluation is w^T k_X(x).
class KoopmanApproximant {
 public:
  KoopmanApproximant(PointSet points, double lambda, PropagatedMatrix propagated,
                     Eigen::VectorXd observable_values, Eigen::VectorXd weights,
                     double condition_estimate);

  double operator()(double x) const;
  template <typename Derived>
  double operator()(const Eigen::MatrixBase<Derived>& x) const {
    return weights_.dot(kernel_vector(points_.kernel(), points_.points(), x));
  }
  /// Evaluation at every 1-D grid point; reuses w.
  Eigen::VectorXd evaluate(const Eigen::VectorXd& grid) const;

  const PointSet& point_set() const { return points_; }
  double lambda() const { return lambda_; }
  const PropagatedMatrix& propagated() const { return propagated_; }
  const Eigen::VectorXd& observable_values() const { return observable_values_; }
  const Eigen::VectorXd& weights() const { return weights_; }
  double condition_estimate() const { return condition_estimate_; }

  /// Matrix approximant K^MC (K_X + lambda I)^{-1}, for inspection only.
  Eigen::MatrixXd matrix_approximant() const;

  nlohmann::json to_json() const;
  static KoopmanApproximant from_json(const nlohmann::json& j);

 private:
  PointSet points_;
  double lambda_;
  PropagatedMatrix propagated_;
  Eigen::VectorXd observable_values_;
  Eigen::VectorXd weights_;
  double condition_estimate_;
};

/// Fits the (regularized) stochastic kEDMD approximant using two Cholesky solves:
///   w = (K_X + lambda I)^{-1} K^MC^T (K_X + lambda I)^{-1} f_X.
/// Throws IllConditionedError at lambda = 0 when the condition estimate of K_X
/// exceeds `condition_cap`.
KoopmanApproximant fit(const PointSet& points, const Eigen::VectorXd& observable_values,
                       PropagatedMatrix propagated, double lambda,
                       double condition_cap = kDefaultConditionCap);
KoopmanApproximant fit(const PointSet& points, const Observable& f, PropagatedMatrix propagated,
                       double lambda, double condition_cap = kDefaultConditionCap);

inline double evaluate(const KoopmanApproximant& approximant, double x) { return approximant(x); }

/// Kernel interpolant (lambda = 0) or ridge smoother (lambda > 0):
///   x -> g_X^T (K_X + lambda I)^{-1} k_X(x).
class Interpolant {
 public:
  Interpolant(PointSet points, Eigen::VectorXd coefficients, double lambda)
      : points_(std::move(points)), coefficients_(std::move(coefficients)), lambda_(lambda) {}

  double operator()(double x) const;
  template <typename Derived>
  double operator()(const Eigen::MatrixBase<Derived>& x) const {
    return coefficients_.dot(kernel_vector(points_.kernel(), points_.points(), x));
  }
  Eigen::VectorXd evaluate(const Eigen::VectorXd& grid) const;

  const Eigen::VectorXd& coefficients() const { return coefficients_; }
  double lambda() const { return lambda_; }
  const PointSet& point_set() const { return points_; }

 private:
  PointSet points_;
  Eigen::VectorXd coefficients_;
  double lambda_;
};

Interpolant interpolate(const PointSet& points, const Eigen::VectorXd& values, double lambda,
                        double condition_cap = kDefaultConditionCap);
Interpolant interpolate(const PointSet& points, const Observable& g, double lambda,
                        double condition_cap = kDefaultConditionCap);

/// (K_X + lambda I)^{-1} k_X(x): the cardinal-function weights at x.
Eigen::VectorXd lagrange_weights(const PointSet& points, double x, double lambda = 0.0,
                                 double condition_cap = kDefaultConditionCap);

enum class StabilityMode {
  kExact,                // sqrt(max over sign vectors v of v^T (K_X + lambda I)^{-1} v)
  kEigenvalueBound,      // sqrt(d / (lambda_min(K_X) + lambda))
  kRegularizationBound,  // sqrt(d / lambda), needs lambda > 0
};

inline constexpr Eigen::Index kDefaultExactStabilityCap = 20;

/// Noise amplification factor of the kernel solve. Exact mode enumerates the
/// 2^(d-1) sign vectors with v_1 = +1 (v and -v give the same quadratic form)
/// and is refused above `exact_cap` points.
double stability_factor(const Eigen::MatrixXd& kernel_matrix, double lambda, StabilityMode mode,
                        Eigen::Index exact_cap = kDefaultExactStabilityCap);
double stability_factor(const PointSet& points, double lambda, StabilityMode mode,
                        Eigen::Index exact_cap = kDefaultExactStabilityCap);

}  // namespace skedmd
