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

#include <cmath>
#include <random>
#include <vector>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <gtest/gtest.h>

#include "skedmd/koopman.hpp"

namespace skedmd {
namespace {

const Kernel kWendland = Kernel::parse("wendland:n=1,l=1");
const Kernel kMatern = Kernel::parse("matern:nu=1.5");

PointSet midpoints(const Kernel& k, int d) {
  Eigen::VectorXd x(d);
  for (int i = 0; i < d; ++i) x(i) = (2.0 * i + 1) / (2.0 * d);
  return PointSet(k, x);
}

PointSet random_points(const Kernel& k, int d, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Eigen::VectorXd x(d);
  for (int i = 0; i < d; ++i) x(i) = u(rng);
  return PointSet(k, x);
}

// Test-side oracle: every sign vector, explicit inverse.
double brute_force_stability(const Eigen::MatrixXd& K, double lambda) {
  const Eigen::Index d = K.rows();
  const Eigen::MatrixXd inv = (K + lambda * Eigen::MatrixXd::Identity(d, d)).inverse();
  double best = -INFINITY;
  for (long mask = 0; mask < (1L << d); ++mask) {
    Eigen::VectorXd v(d);
    for (Eigen::Index i = 0; i < d; ++i) v(i) = (mask >> i) & 1 ? 1.0 : -1.0;
    best = std::max(best, v.dot(inv * v));
  }
  return std::sqrt(best);
}

TEST(PropagatedMatrix, DeterministicSamplerIsExact) {
  const PointSet ps = midpoints(kWendland, 7);
  const SamplerPtr s = deterministic_sampler("square");
  const Eigen::MatrixXd exact = map_propagated_matrix(ps, [](double x) { return x * x; });
  for (Eigen::Index m : {1, 4, 9}) {
    const PropagatedMatrix p = build_propagated_matrix(ps, *s, m, 17);
    EXPECT_EQ(p.entries, exact);
    EXPECT_EQ(p.samples_per_column, m);
  }
  for (Eigen::Index i = 0; i < 7; ++i) {
    for (Eigen::Index j = 0; j < 7; ++j) {
      const double fx = ps.coordinates()(j) * ps.coordinates()(j);
      EXPECT_EQ(exact(i, j), kWendland(ps.coordinates()(i), fx));
    }
  }
}

TEST(PropagatedMatrix, ColumnSeedsAreRecordedAndDistinct) {
  const PointSet ps = midpoints(kWendland, 6);
  const PropagatedMatrix p = build_propagated_matrix(ps, *ou_sampler(1, 0.2, 1, {}, 1e-2), 5, 3);
  ASSERT_EQ(p.column_seeds.size(), 6u);
  for (std::size_t j = 0; j < 6; ++j) {
    EXPECT_EQ(p.column_seeds[j], column_seed(3, static_cast<Eigen::Index>(j)));
    for (std::size_t k = 0; k < j; ++k) EXPECT_NE(p.column_seeds[j], p.column_seeds[k]);
  }
}

TEST(PropagatedMatrix, IndependentOfThreadCount) {
  const PointSet ps = midpoints(kMatern, 9);
  const SamplerPtr s = ou_sampler(1, 0.2, 1, {}, 1e-2);
  EXPECT_EQ(build_propagated_matrix(ps, *s, 20, 5, 1).entries, build_propagated_matrix(ps, *s, 20, 5, 4).entries);
}

TEST(PropagatedMatrix, EntriesWithinKernelRange) {
  const PointSet ps = midpoints(kWendland, 5);
  const PropagatedMatrix p = build_propagated_matrix(ps, *ou_sampler(1, 0.2, 1, {}, 1e-2), 50, 8);
  EXPECT_GE(p.entries.minCoeff(), 0.0);
  EXPECT_LE(p.entries.maxCoeff(), 1.0);
  const PointSet one = midpoints(kWendland, 1);
  const double e = build_propagated_matrix(one, *truncated_normal_sampler(), 100, 1).entries(0, 0);
  EXPECT_GE(e, 0.0);
  EXPECT_LE(e, 1.0);
}

TEST(PropagatedMatrix, ConvergesToQuadrature) {
  const PointSet ps = midpoints(kWendland, 3);
  const SamplerPtr s = truncated_normal_sampler();
  const Eigen::Index m = 1000000;
  const PropagatedMatrix p = build_propagated_matrix(ps, *s, m, 21);
  const Eigen::VectorXd x = ps.coordinates();
  for (Eigen::Index j = 0; j < 3; ++j) {
    const Eigen::VectorXd y = s->sample(x(j), m, p.column_seeds[static_cast<std::size_t>(j)]);
    const TruncatedNormalDensity density(x(j));
    for (Eigen::Index i = 0; i < 3; ++i) {
      Eigen::VectorXd k(m);
      for (Eigen::Index l = 0; l < m; ++l) k(l) = kWendland(x(i), y(l));
      const double se = std::sqrt((k.array() - k.mean()).square().sum() / (m - 1) / m);
      const double exact = simpson([&](double t) { return kWendland(x(i), t) * density(t); }, 0, 1, 20001);
      EXPECT_NEAR(p.entries(i, j), exact, 3 * se) << i << "," << j;
    }
  }
}

TEST(PropagatedMatrix, RejectsZeroSamples) {
  EXPECT_THROW(build_propagated_matrix(midpoints(kWendland, 3), *truncated_normal_sampler(), 0, 1), ConfigError);
}

TEST(Fit, DeterministicLimitEqualsKernelEdmd) {
  const PointSet ps = midpoints(kWendland, 9);
  const auto f = [](double x) { return std::exp(x); };
  const Eigen::VectorXd x = ps.coordinates();
  Eigen::VectorXd fx(9);
  for (int i = 0; i < 9; ++i) fx(i) = f(x(i));
  const Eigen::MatrixXd Kinv = ps.kernel_matrix().inverse();
  const Eigen::MatrixXd KF = map_propagated_matrix(ps, [](double t) { return t * t; });
  const Eigen::VectorXd grid = Eigen::VectorXd::LinSpaced(101, 0, 1);
  for (Eigen::Index m : {1, 5}) {
    const KoopmanApproximant a =
        fit(ps, f, build_propagated_matrix(ps, *deterministic_sampler("square"), m, 4), 0.0);
    const Eigen::VectorXd pred = a.evaluate(grid);
    for (Eigen::Index l = 0; l < grid.size(); ++l) {
      const double oracle = fx.dot(Kinv * KF * Kinv * kernel_vector(kWendland, x, grid(l)));
      EXPECT_NEAR(pred(l), oracle, 1e-12);
    }
  }
}

TEST(Fit, IdentityMapReproducesObservableOnDesign) {
  for (const Kernel& k : {kWendland, kMatern}) {
    const PointSet ps = midpoints(k, 8);
    const auto f = [](double x) { return std::cos(2 * x) + x; };
    const KoopmanApproximant a = fit(ps, f, build_propagated_matrix(ps, *deterministic_sampler("identity"), 3, 1), 0.0);
    for (Eigen::Index j = 0; j < 8; ++j) EXPECT_NEAR(a(ps.coordinates()(j)), f(ps.coordinates()(j)), 1e-8);
  }
}

TEST(Fit, HugeRegularizationShrinksToZero) {
  const PointSet ps = midpoints(kWendland, 6);
  const KoopmanApproximant a =
      fit(ps, [](double x) { return std::exp(x); }, build_propagated_matrix(ps, *truncated_normal_sampler(), 50, 2), 1e12);
  EXPECT_LT(a.weights().norm(), 1e-20);
  EXPECT_LT(std::abs(a(0.4)), 1e-20);
}

TEST(Fit, LinearInObservable) {
  const PointSet ps = midpoints(kMatern, 7);
  const PropagatedMatrix p = build_propagated_matrix(ps, *truncated_normal_sampler(), 40, 6);
  const auto f1 = [](double x) { return std::exp(x); };
  const auto f2 = [](double x) { return std::sin(5 * x); };
  const KoopmanApproximant a1 = fit(ps, f1, p, 1e-6);
  const KoopmanApproximant a2 = fit(ps, f2, p, 1e-6);
  const KoopmanApproximant a12 = fit(ps, [&](double x) { return 2 * f1(x) - 3 * f2(x); }, p, 1e-6);
  for (double x : {0.0, 0.13, 0.5, 0.91}) EXPECT_NEAR(a12(x), 2 * a1(x) - 3 * a2(x), 1e-9);
}

TEST(Fit, ZeroOutsideWendlandSupports) {
  const PointSet ps = midpoints(kWendland, 4);
  const KoopmanApproximant a =
      fit(ps, [](double x) { return 1 + x; }, build_propagated_matrix(ps, *truncated_normal_sampler(), 10, 1), 0.0);
  EXPECT_EQ(a(3.0), 0.0);
  EXPECT_EQ(a(-2.0), 0.0);
}

TEST(Fit, WeightsUseTransposedPropagatedMatrix) {
  // Column j of K^MC belongs to x_j, so w = A^{-1} K^MC^T A^{-1} f_X.
  const PointSet ps = midpoints(kWendland, 5);
  const PropagatedMatrix p = build_propagated_matrix(ps, *ou_sampler(1, 0.2, 1, {}, 1e-2), 30, 12);
  const double lambda = 1e-3;
  const Eigen::MatrixXd A = ps.kernel_matrix() + lambda * Eigen::MatrixXd::Identity(5, 5);
  Eigen::VectorXd fx = ps.coordinates().array().exp();
  const KoopmanApproximant a = fit(ps, fx, p, lambda);
  const Eigen::VectorXd expected = A.inverse() * p.entries.transpose() * A.inverse() * fx;
  EXPECT_LT((a.weights() - expected).norm(), 1e-10 * expected.norm());
  EXPECT_LT((a.matrix_approximant() - p.entries * A.inverse()).norm(), 1e-10);
}

TEST(Fit, IllConditionedWithoutRegularization) {
  const PointSet ps = midpoints(kMatern, 30);
  const PropagatedMatrix p = build_propagated_matrix(ps, *deterministic_sampler("identity"), 1, 0);
  try {
    fit(ps, [](double x) { return x; }, p, 0.0, 10.0);
    FAIL() << "expected IllConditionedError";
  } catch (const IllConditionedError& e) {
    EXPECT_GT(e.condition_estimate(), 10.0);
    EXPECT_NE(std::string(e.what()).find("lambda > 0"), std::string::npos);
  }
  EXPECT_NO_THROW(fit(ps, [](double x) { return x; }, p, 1e-3, 10.0));
}

TEST(Fit, SizeMismatchRejected) {
  const PointSet ps = midpoints(kWendland, 4);
  const PropagatedMatrix p = build_propagated_matrix(ps, *deterministic_sampler("identity"), 1, 0);
  EXPECT_THROW(fit(ps, Eigen::VectorXd::Ones(3), p, 0.0), ConfigError);
}

TEST(Fit, JsonRoundTrip) {
  const PointSet ps = midpoints(kMatern, 6);
  const KoopmanApproximant a =
      fit(ps, [](double x) { return std::exp(x); }, build_propagated_matrix(ps, *truncated_normal_sampler(), 25, 31), 1e-5);
  const KoopmanApproximant b = KoopmanApproximant::from_json(nlohmann::json::parse(a.to_json().dump()));
  EXPECT_EQ(b.lambda(), a.lambda());
  EXPECT_EQ(b.weights(), a.weights());
  EXPECT_EQ(b.propagated().column_seeds, a.propagated().column_seeds);
  for (double x : {0.05, 0.5, 0.77}) EXPECT_EQ(b(x), a(x));
  EXPECT_THROW(KoopmanApproximant::from_json(nlohmann::json::object()), ConfigError);
}

TEST(Fit, MonteCarloVarianceScalesInverselyWithM) {
  const PointSet ps = midpoints(kWendland, 6);
  const SamplerPtr s = truncated_normal_sampler();
  const auto f = [](double x) { return std::exp(x); };
  std::vector<double> log_m, log_var;
  for (Eigen::Index m : {100, 1000, 10000}) {
    Eigen::VectorXd values(50);
    for (int r = 0; r < 50; ++r) values(r) = fit(ps, f, build_propagated_matrix(ps, *s, m, 1000 + r), 1e-6)(0.5);
    log_m.push_back(std::log(static_cast<double>(m)));
    log_var.push_back(std::log((values.array() - values.mean()).square().sum() / 49));
  }
  const double slope = (log_var.back() - log_var.front()) / (log_m.back() - log_m.front());
  EXPECT_GT(slope, -1.2);
  EXPECT_LT(slope, -0.8);
}

TEST(Interpolate, ReproducesDesignValues) {
  for (const Kernel& k : {kWendland, kMatern}) {
    const PointSet ps = midpoints(k, 12);
    const Interpolant s = interpolate(ps, [](double x) { return std::sin(3 * x); }, 0.0);
    for (Eigen::Index j = 0; j < 12; ++j) EXPECT_NEAR(s(ps.coordinates()(j)), std::sin(3 * ps.coordinates()(j)), 1e-8);
  }
}

TEST(Interpolate, KernelTranslateGivesUnitVector) {
  const PointSet ps = midpoints(kMatern, 6);
  const double x1 = ps.coordinates()(0);
  const Interpolant s = interpolate(ps, [&](double x) { return kMatern(x1, x); }, 0.0);
  EXPECT_LT((s.coefficients() - Eigen::VectorXd::Unit(6, 0)).norm(), 1e-10);
}

TEST(Interpolate, RidgeShrinks) {
  const PointSet ps = midpoints(kWendland, 10);
  const auto g = [](double x) { return std::cos(4 * x); };
  const Interpolant exact = interpolate(ps, g, 0.0);
  const Interpolant ridge = interpolate(ps, g, 10.0);
  EXPECT_LT(ridge.evaluate(ps.coordinates()).norm(), 0.5 * exact.evaluate(ps.coordinates()).norm());
}

TEST(Linalg, SolveCorrectness) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> n01;
  std::uniform_real_distribution<double> jitter(-0.3, 0.3);
  for (double lambda : {0.0, 1e-8, 1e-3}) {
    Eigen::VectorXd nodes(15);
    for (int i = 0; i < 15; ++i) nodes(i) = (i + 0.5 + jitter(rng)) / 15.0;
    const PointSet ps(kMatern, nodes);
    const RegularizedCholeskyd chol(ps.kernel_matrix(), lambda);
    const Eigen::MatrixXd A = ps.kernel_matrix() + lambda * Eigen::MatrixXd::Identity(15, 15);
    Eigen::VectorXd b(15);
    for (Eigen::Index i = 0; i < 15; ++i) b(i) = n01(rng);
    const Eigen::VectorXd x = chol.solve(b);
    EXPECT_LT((A * x - b).norm(), 1e-10 * b.norm()) << "lambda=" << lambda;
  }
}

TEST(Linalg, RegularizationLiftsSmallestEigenvalue) {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 20; ++trial) {
    const PointSet ps = random_points(trial % 2 ? kMatern : kWendland, 25, rng);
    for (double lambda : {1e-6, 1e-3, 1.0}) {
      const Eigen::MatrixXd A = ps.kernel_matrix() + lambda * Eigen::MatrixXd::Identity(25, 25);
      EXPECT_GE(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(A).eigenvalues()(0), lambda * (1 - 1e-9));
    }
  }
}

TEST(Linalg, RejectsNegativeLambda) {
  EXPECT_THROW(RegularizedCholeskyd(Eigen::MatrixXd::Identity(2, 2), -1.0), ConfigError);
}

TEST(Stability, IdentityKernelMatrix) {
  Eigen::VectorXd x(4);
  x << 0.0, 1.0, 2.0, 3.0;
  const PointSet ps(kWendland, x);
  EXPECT_DOUBLE_EQ(stability_factor(ps, 0.0, StabilityMode::kExact), 2.0);
  EXPECT_DOUBLE_EQ(stability_factor(ps, 0.0, StabilityMode::kEigenvalueBound), 2.0);
}

TEST(Stability, SinglePoint) {
  const PointSet ps = midpoints(kMatern, 1);
  for (double lambda : {0.0, 0.5}) {
    EXPECT_DOUBLE_EQ(stability_factor(ps, lambda, StabilityMode::kExact), std::sqrt(1 / (1 + lambda)));
  }
}

TEST(Stability, ExactMatchesBruteForceAndRespectsBounds) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 40; ++trial) {
    const int d = 2 + trial % 9;
    const PointSet ps = random_points(trial % 2 ? kMatern : kWendland, d, rng);
    const double lambda = trial % 3 == 0 ? 0.0 : 1e-4;
    const double exact = stability_factor(ps, lambda, StabilityMode::kExact);
    EXPECT_NEAR(exact, brute_force_stability(ps.kernel_matrix(), lambda), 1e-9 * exact);
    EXPECT_LE(exact, stability_factor(ps, lambda, StabilityMode::kEigenvalueBound) * (1 + 1e-12));
    if (lambda > 0) {
      EXPECT_LE(stability_factor(ps, lambda, StabilityMode::kEigenvalueBound),
                stability_factor(ps, lambda, StabilityMode::kRegularizationBound));
    }
  }
}

TEST(Stability, SignFlipInvariance) {
  std::mt19937_64 rng(12);
  const PointSet ps = random_points(kMatern, 6, rng);
  const Eigen::MatrixXd inv = ps.kernel_matrix().inverse();
  for (long mask = 0; mask < 64; ++mask) {
    Eigen::VectorXd v(6);
    for (int i = 0; i < 6; ++i) v(i) = (mask >> i) & 1 ? 1.0 : -1.0;
    EXPECT_NEAR(v.dot(inv * v), (-v).dot(inv * (-v)), 1e-9 * std::abs(v.dot(inv * v)));
  }
}

TEST(Stability, Errors) {
  const PointSet ps = midpoints(kWendland, 21);
  EXPECT_THROW(stability_factor(ps, 0.0, StabilityMode::kExact), ConfigError);
  EXPECT_NO_THROW(stability_factor(ps, 0.0, StabilityMode::kExact, 21));
  EXPECT_THROW(stability_factor(ps, 0.0, StabilityMode::kRegularizationBound), ConfigError);
  EXPECT_DOUBLE_EQ(stability_factor(ps, 1e-4, StabilityMode::kRegularizationBound), std::sqrt(21 / 1e-4));
}

}  // namespace
}  // namespace skedmd
