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

#include "skedmd/koopman.hpp"

#include <bit>
#include <cmath>

#include "skedmd/parallel.hpp"

namespace skedmd {

namespace {

void require_one_dimensional(const PointSet& points) {
  if (points.dimension() != 1) {
    throw ConfigError("conditional samplers are one-dimensional; point set has dimension " +
                      std::to_string(points.dimension()));
  }
}

Eigen::VectorXd values_at(const PointSet& points, const Observable& f) {
  require_one_dimensional(points);
  Eigen::VectorXd out(points.size());
  for (Eigen::Index i = 0; i < points.size(); ++i) out(i) = f(points.points()(i, 0));
  return out;
}

}  // namespace

std::uint64_t column_seed(std::uint64_t seed, Eigen::Index column) {
  return derive_seed(seed, SeedStream::kColumn, {static_cast<std::uint64_t>(column)});
}

PropagatedMatrix build_propagated_matrix(const PointSet& points, const ConditionalSampler& sampler,
                                         Eigen::Index m, std::uint64_t seed, int threads) {
  require_one_dimensional(points);
  if (m < 1) throw ConfigError("samples per column m must be >= 1");
  const Eigen::Index d = points.size();
  const Eigen::VectorXd x = points.coordinates();
  const Kernel& kernel = points.kernel();

  PropagatedMatrix out;
  out.entries.resize(d, d);
  out.samples_per_column = m;
  out.column_seeds.resize(static_cast<std::size_t>(d));
  for (Eigen::Index j = 0; j < d; ++j) out.column_seeds[j] = column_seed(seed, j);

  parallel_for(d, threads, [&](long j) {
    const Eigen::VectorXd y = sampler.sample(x(j), m, out.column_seeds[j]);
    // Running mean: exact when every sample gives the same kernel vector.
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(d);
    for (Eigen::Index l = 0; l < m; ++l) {
      const double weight = 1.0 / static_cast<double>(l + 1);
      for (Eigen::Index i = 0; i < d; ++i) mean(i) += (kernel(x(i), y(l)) - mean(i)) * weight;
    }
    out.entries.col(j) = mean;
  });
  return out;
}

Eigen::MatrixXd map_propagated_matrix(const PointSet& points, const Observable& map) {
  require_one_dimensional(points);
  const Eigen::VectorXd x = points.coordinates();
  Eigen::MatrixXd out(x.size(), x.size());
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    const double image = map(x(j));
    for (Eigen::Index i = 0; i < x.size(); ++i) out(i, j) = points.kernel()(x(i), image);
  }
  return out;
}

KoopmanApproximant::KoopmanApproximant(PointSet points, double lambda, PropagatedMatrix propagated,
                                       Eigen::VectorXd observable_values, Eigen::VectorXd weights,
                                       double condition_estimate)
    : points_(std::move(points)),
      lambda_(lambda),
      propagated_(std::move(propagated)),
      observable_values_(std::move(observable_values)),
      weights_(std::move(weights)),
      condition_estimate_(condition_estimate) {}

double KoopmanApproximant::operator()(double x) const {
  return weights_.dot(kernel_vector(points_.kernel(), points_.coordinates(), x));
}

Eigen::VectorXd KoopmanApproximant::evaluate(const Eigen::VectorXd& grid) const {
  require_one_dimensional(points_);
  return cross_kernel_matrix(points_.kernel(), points_.coordinates(), grid).transpose() * weights_;
}

Eigen::MatrixXd KoopmanApproximant::matrix_approximant() const {
  RegularizedCholeskyd factor(points_.kernel_matrix(), lambda_,
                              std::numeric_limits<double>::infinity());
  // K^MC A^{-1} = (A^{-1} K^MC^T)^T since A is symmetric.
  return factor.solve(propagated_.entries.transpose()).transpose();
}

nlohmann::json KoopmanApproximant::to_json() const {
  auto to_vec = [](const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); };
  nlohmann::json points = nlohmann::json::array();
  for (Eigen::Index i = 0; i < points_.size(); ++i) {
    points.push_back(to_vec(points_.points().row(i).transpose()));
  }
  nlohmann::json propagated = nlohmann::json::array();
  for (Eigen::Index i = 0; i < propagated_.entries.rows(); ++i) {
    propagated.push_back(to_vec(propagated_.entries.row(i).transpose()));
  }
  return {
      {"kernel", points_.kernel().spec()},
      {"points", points},
      {"lambda", lambda_},
      {"samples_per_column", propagated_.samples_per_column},
      {"column_seeds", propagated_.column_seeds},
      {"propagated", propagated},
      {"observable_values", to_vec(observable_values_)},
      {"weights", to_vec(weights_)},
      {"condition_estimate", condition_estimate_},
  };
}

KoopmanApproximant KoopmanApproximant::from_json(const nlohmann::json& j) {
  try {
    Kernel kernel = Kernel::parse(j.at("kernel").get<std::string>());
    const auto rows = j.at("points").get<std::vector<std::vector<double>>>();
    if (rows.empty()) throw ConfigError("approximant JSON has no points");
    Eigen::MatrixXd points(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows[0].size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].size() != rows[0].size()) throw ConfigError("ragged point array in approximant JSON");
      for (std::size_t a = 0; a < rows[i].size(); ++a) points(i, a) = rows[i][a];
    }
    auto to_eigen = [](const std::vector<double>& v) {
      return Eigen::VectorXd(Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size())));
    };
    PropagatedMatrix propagated;
    propagated.samples_per_column = j.at("samples_per_column").get<Eigen::Index>();
    propagated.column_seeds = j.at("column_seeds").get<std::vector<std::uint64_t>>();
    const auto prop_rows = j.at("propagated").get<std::vector<std::vector<double>>>();
    propagated.entries.resize(static_cast<Eigen::Index>(prop_rows.size()), static_cast<Eigen::Index>(prop_rows.size()));
    for (std::size_t i = 0; i < prop_rows.size(); ++i) {
      if (prop_rows[i].size() != prop_rows.size()) throw ConfigError("propagated matrix is not square");
      for (std::size_t c = 0; c < prop_rows[i].size(); ++c) propagated.entries(i, c) = prop_rows[i][c];
    }
    Eigen::VectorXd weights = to_eigen(j.at("weights").get<std::vector<double>>());
    if (weights.size() != points.rows()) throw ConfigError("weight count does not match point count");
    return KoopmanApproximant(PointSet(std::move(kernel), std::move(points)), j.at("lambda").get<double>(),
                              std::move(propagated),
                              to_eigen(j.at("observable_values").get<std::vector<double>>()),
                              std::move(weights), j.value("condition_estimate", 0.0));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed approximant JSON: ") + e.what());
  }
}

KoopmanApproximant fit(const PointSet& points, const Eigen::VectorXd& observable_values,
                       PropagatedMatrix propagated, double lambda, double condition_cap) {
  const Eigen::Index d = points.size();
  if (observable_values.size() != d || propagated.entries.rows() != d || propagated.entries.cols() != d) {
    throw ConfigError("fit: observable values and propagated matrix must match the point count");
  }
  RegularizedCholeskyd factor(points.kernel_matrix(), lambda, condition_cap);
  const Eigen::VectorXd inner = factor.solve(observable_values);
  Eigen::VectorXd weights = factor.solve(propagated.entries.transpose() * inner);
  return KoopmanApproximant(points, lambda, std::move(propagated), observable_values, std::move(weights),
                            factor.condition_estimate());
}

KoopmanApproximant fit(const PointSet& points, const Observable& f, PropagatedMatrix propagated,
                       double lambda, double condition_cap) {
  return fit(points, values_at(points, f), std::move(propagated), lambda, condition_cap);
}

double Interpolant::operator()(double x) const {
  return coefficients_.dot(kernel_vector(points_.kernel(), points_.coordinates(), x));
}

Eigen::VectorXd Interpolant::evaluate(const Eigen::VectorXd& grid) const {
  require_one_dimensional(points_);
  return cross_kernel_matrix(points_.kernel(), points_.coordinates(), grid).transpose() * coefficients_;
}

Interpolant interpolate(const PointSet& points, const Eigen::VectorXd& values, double lambda,
                        double condition_cap) {
  if (values.size() != points.size()) throw ConfigError("interpolate: value count does not match point count");
  RegularizedCholeskyd factor(points.kernel_matrix(), lambda, condition_cap);
  return Interpolant(points, factor.solve(values), lambda);
}

Interpolant interpolate(const PointSet& points, const Observable& g, double lambda, double condition_cap) {
  return interpolate(points, values_at(points, g), lambda, condition_cap);
}

Eigen::VectorXd lagrange_weights(const PointSet& points, double x, double lambda, double condition_cap) {
  RegularizedCholeskyd factor(points.kernel_matrix(), lambda, condition_cap);
  return factor.solve(kernel_vector(points.kernel(), points.coordinates(), x));
}

double stability_factor(const Eigen::MatrixXd& kernel_matrix, double lambda, StabilityMode mode,
                        Eigen::Index exact_cap) {
  const Eigen::Index d = kernel_matrix.rows();
  if (d == 0) throw ConfigError("stability factor of an empty kernel matrix");
  if (!(lambda >= 0)) throw ConfigError("stability factor needs lambda >= 0");

  switch (mode) {
    case StabilityMode::kRegularizationBound:
      if (!(lambda > 0)) throw ConfigError("regularization-bound stability factor needs lambda > 0");
      return std::sqrt(static_cast<double>(d) / lambda);

    case StabilityMode::kEigenvalueBound: {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(kernel_matrix, Eigen::EigenvaluesOnly);
      const double lambda_min = eig.eigenvalues().minCoeff() + lambda;
      if (!(lambda_min > 0)) {
        throw IllConditionedError("kernel matrix is not numerically positive definite", INFINITY);
      }
      return std::sqrt(static_cast<double>(d) / lambda_min);
    }

    case StabilityMode::kExact: {
      if (d > exact_cap) {
        throw ConfigError("exact stability factor enumerates 2^(d-1) sign vectors; d = " + std::to_string(d) +
                          " exceeds the cap of " + std::to_string(exact_cap) + ", use the eigenvalue bound");
      }
      RegularizedCholeskyd factor(kernel_matrix, lambda, std::numeric_limits<double>::infinity());
      const Eigen::MatrixXd inverse = factor.solve(Eigen::MatrixXd::Identity(d, d));
      // Gray-code walk over v with v_0 = +1 fixed; each step flips one sign.
      Eigen::VectorXd v = Eigen::VectorXd::Ones(d);
      Eigen::VectorXd bv = inverse * v;
      double q = v.dot(bv);
      double best = q;
      const std::uint64_t count = std::uint64_t{1} << (d - 1);
      for (std::uint64_t k = 1; k < count; ++k) {
        const Eigen::Index i = std::countr_zero(k) + 1;
        q += 4.0 * (inverse(i, i) - v(i) * bv(i));
        bv -= 2.0 * v(i) * inverse.col(i);
        v(i) = -v(i);
        best = std::max(best, q);
      }
      return std::sqrt(best);
    }
  }
  return 0.0;
}

double stability_factor(const PointSet& points, double lambda, StabilityMode mode, Eigen::Index exact_cap) {
  return stability_factor(points.kernel_matrix(), lambda, mode, exact_cap);
}

}  // namespace skedmd
