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
#include <gtest/gtest.h>

#include "skedmd/kernels.hpp"

namespace skedmd {
namespace {

double closed_form_wendland11(double r) { return r >= 1 ? 0.0 : std::pow(1 - r, 3) * (3 * r + 1); }

// Matern profile from the Bessel form with alpha = 1.
double matern_bessel(double nu, double r) {
  if (r == 0) return 1.0;
  const double z = std::sqrt(2 * nu) * r;
  return std::pow(2.0, 1 - nu) / std::tgamma(nu) * std::pow(z, nu) * std::cyl_bessel_k(nu, z);
}

std::vector<Eigen::VectorXd> random_point_sets(int count, int max_size, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<int> size(2, max_size);
  std::vector<Eigen::VectorXd> sets;
  for (int s = 0; s < count; ++s) {
    Eigen::VectorXd x(size(rng));
    for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = u(rng);
    sets.push_back(x);
  }
  return sets;
}

TEST(WendlandProfile, DegreeZeroSmoothnessIsHat) {
  const WendlandProfile p = wendland_profile(1, 0);
  ASSERT_EQ(p.normalized.degree(), 1);
  EXPECT_EQ(p.normalized.coefficients()[0], Rational(1));
  EXPECT_EQ(p.normalized.coefficients()[1], Rational(-1));
}

TEST(WendlandProfile, N1L1MatchesClosedFormExactly) {
  const WendlandProfile p = wendland_profile(1, 1);
  const std::vector<Rational> expected = {1, 0, -6, 8, -3};
  EXPECT_EQ(p.normalized.coefficients(), expected);
  EXPECT_EQ(p.scale, Rational(1, 12));
}

TEST(WendlandProfile, N1L1FloatEvaluationAgrees) {
  const WendlandKernel k(1, 1);
  for (int i = 0; i <= 1000; ++i) {
    const double r = i / 1000.0;
    EXPECT_NEAR(k.profile(r), closed_form_wendland11(r), 1e-12) << "r = " << r;
  }
}

TEST(WendlandProfile, DegreeFormula) {
  for (int n = 1; n <= 5; ++n) {
    for (int l = 0; l <= 3; ++l) {
      const WendlandProfile p = wendland_profile(n, l);
      EXPECT_EQ(p.normalized.degree(), n / 2 + 3 * l + 1) << "n=" << n << " l=" << l;
      EXPECT_EQ(p.normalized.exact_at(0), Rational(1));
      EXPECT_EQ(p.normalized.exact_at(1), Rational(0));
    }
  }
}

TEST(WendlandProfile, N3L1HasCompactSupport) {
  const WendlandKernel k(3, 1);
  EXPECT_EQ(k.polynomial().degree(), 5);
  EXPECT_EQ(k.profile(1.0), 0.0);
  EXPECT_EQ(k.profile(1.5), 0.0);
  EXPECT_NEAR(k.profile(0.999999), 0.0, 1e-12);
  EXPECT_GT(k.profile(0.5), 0.0);
}

TEST(WendlandKernel, FactoredFormMatchesExpandedPolynomial) {
  for (int n = 1; n <= 5; ++n) {
    for (int l = 0; l <= 3; ++l) {
      const WendlandKernel k(n, l);
      EXPECT_EQ(k.support_power(), n / 2 + 2 * l + 1) << "n=" << n << " l=" << l;
      EXPECT_NE(k.cofactor().exact_at(1), Rational(0));
      for (int i = 0; i <= 50; ++i) EXPECT_NEAR(k.profile(i / 50.0), k.polynomial()(i / 50.0), 1e-12);
      EXPECT_GE(k.profile(1.0 - 1e-9), 0.0);
    }
  }
}

TEST(WendlandProfile, RejectsInvalidParameters) {
  EXPECT_THROW(wendland_profile(0, 1), ConfigError);
  EXPECT_THROW(wendland_profile(1, -1), ConfigError);
}

TEST(WendlandKernel, Metadata) {
  const WendlandKernel k(1, 1);
  EXPECT_DOUBLE_EQ(k.sobolev_order(), 2.0);
  EXPECT_DOUBLE_EQ(k.fill_distance_rate(), 1.5);
}

TEST(MaternKernel, ClosedForms) {
  const MaternKernel m32(1.5);
  const MaternKernel m12(0.5);
  for (double r : {0.0, 0.1, 0.5, 1.0, 2.0}) {
    const double s3 = std::sqrt(3.0) * r;
    EXPECT_NEAR(m32.profile(r), (1 + s3) * std::exp(-s3), 1e-15);
    EXPECT_NEAR(m12.profile(r), std::exp(-r), 1e-15);
  }
  EXPECT_EQ(m32.profile(0.0), 1.0);
}

TEST(MaternKernel, AgreesWithBesselForm) {
  for (double nu : {0.5, 1.5, 2.5, 3.5}) {
    const MaternKernel k(nu);
    for (double r : {0.1, 1.0, 2.0}) {
      EXPECT_NEAR(k.profile(r), matern_bessel(nu, r), 1e-12) << "nu=" << nu << " r=" << r;
    }
  }
}

TEST(MaternKernel, LengthScale) {
  const MaternKernel k(1.5, 2.0);
  const double s3 = std::sqrt(3.0) * 0.4 / 2.0;
  EXPECT_NEAR(k.profile(0.4), (1 + s3) * std::exp(-s3), 1e-15);
}

TEST(MaternKernel, FarFieldIsTiny) {
  const Kernel k = Kernel::parse("matern:nu=1.5");
  Eigen::VectorXd x(1);
  x << 0.0;
  EXPECT_LT(kernel_vector(k, x, 10.0)(0), 1e-6);
}

TEST(MaternKernel, RejectsUnsupportedSmoothness) {
  EXPECT_THROW(MaternKernel(1.0), ConfigError);
  EXPECT_THROW(MaternKernel(-0.5), ConfigError);
  EXPECT_THROW(MaternKernel(1.5, 0.0), ConfigError);
}

TEST(Kernel, ParseAndSpecRoundTrip) {
  for (const char* spec : {"wendland:n=1,l=1", "wendland:n=3,l=2", "matern:nu=1.5", "matern:nu=2.5,alpha=0.5"}) {
    const Kernel k = Kernel::parse(spec);
    const Kernel again = Kernel::parse(k.spec());
    for (double r : {0.0, 0.3, 0.9}) EXPECT_EQ(k.profile(r), again.profile(r));
  }
  EXPECT_EQ(Kernel::parse("wendland").spec(), Kernel::parse("wendland:n=1,l=1").spec());
  EXPECT_EQ(Kernel::parse("matern").family(), KernelFamily::kMatern);
  EXPECT_THROW(Kernel::parse("gaussian:sigma=1"), ConfigError);
  EXPECT_THROW(Kernel::parse("wendland:n=1,l=1,q=2"), ConfigError);
}

TEST(KernelMatrix, TwoPointWendland) {
  const Kernel k = Kernel::parse("wendland:n=1,l=1");
  Eigen::VectorXd x(2);
  x << 0.2, 0.8;
  const Eigen::MatrixXd K = kernel_matrix(k, x);
  EXPECT_EQ(K(0, 0), 1.0);
  EXPECT_EQ(K(1, 1), 1.0);
  EXPECT_NEAR(K(0, 1), 0.1792, 1e-15);
  EXPECT_EQ(K(0, 1), K(1, 0));
}

TEST(KernelMatrix, SinglePointIsOne) {
  for (const char* spec : {"wendland:n=1,l=1", "matern:nu=1.5"}) {
    Eigen::VectorXd x(1);
    x << 0.37;
    const Eigen::MatrixXd K = kernel_matrix(Kernel::parse(spec), x);
    ASSERT_EQ(K.rows(), 1);
    EXPECT_EQ(K(0, 0), 1.0);
  }
}

TEST(KernelMatrix, SupportBoundaryGivesIdentity) {
  Eigen::VectorXd x(2);
  x << 0.0, 1.0;
  EXPECT_EQ(kernel_matrix(Kernel::parse("wendland:n=1,l=1"), x), Eigen::MatrixXd::Identity(2, 2));
}

TEST(KernelMatrix, DuplicatePointsRejected) {
  Eigen::VectorXd x(3);
  x << 0.1, 0.5, 0.1;
  EXPECT_THROW(kernel_matrix(Kernel::parse("matern:nu=1.5"), x), ConfigError);
}

TEST(KernelMatrix, PositiveDefiniteOnRandomSets) {
  for (const char* spec : {"wendland:n=1,l=1", "matern:nu=1.5"}) {
    const Kernel k = Kernel::parse(spec);
    for (const Eigen::VectorXd& x : random_point_sets(50, 30, 7)) {
      const Eigen::MatrixXd K = kernel_matrix(k, x);
      EXPECT_EQ(K, K.transpose());
      const double lambda_min = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(K).eigenvalues()(0);
      EXPECT_GT(lambda_min, 0.0) << spec << " d=" << x.size();
    }
  }
}

TEST(KernelMatrix, CompactSupportGivesExactZeros) {
  const Kernel k = Kernel::parse("wendland:n=1,l=1");
  Eigen::VectorXd x(4);
  x << -1.0, 0.0, 0.5, 1.7;
  const Eigen::MatrixXd K = kernel_matrix(k, x);
  for (Eigen::Index i = 0; i < 4; ++i) {
    for (Eigen::Index j = 0; j < 4; ++j) {
      if (std::abs(x(i) - x(j)) >= 1.0) EXPECT_EQ(K(i, j), 0.0);
    }
  }
}

TEST(KernelMatrix, MultiDimensionalPoints) {
  const Kernel k = Kernel::parse("wendland:n=3,l=1");
  Eigen::MatrixXd x(3, 2);
  x << 0, 0, 0.3, 0.4, 1, 1;
  const Eigen::MatrixXd K = kernel_matrix(k, x);
  EXPECT_DOUBLE_EQ(K(0, 1), k.profile(0.5));
  EXPECT_EQ(K(0, 2), 0.0);
}

TEST(KernelVector, MatchesMatrixColumn) {
  const Kernel k = Kernel::parse("matern:nu=2.5");
  Eigen::VectorXd x(4);
  x << 0.1, 0.35, 0.6, 0.95;
  const Eigen::MatrixXd K = kernel_matrix(k, x);
  for (Eigen::Index j = 0; j < 4; ++j) EXPECT_EQ(kernel_vector(k, x, x(j)), K.col(j));
}

TEST(KernelVector, MidpointValue) {
  Eigen::VectorXd x(2);
  x << 0.0, 0.5;
  const Eigen::VectorXd v = kernel_vector(Kernel::parse("wendland:n=1,l=1"), x, 0.25);
  EXPECT_NEAR(v(0), 0.73828125, 1e-15);
  EXPECT_NEAR(v(1), 0.73828125, 1e-15);
}

TEST(KernelVector, CrossMatrixColumns) {
  const Kernel k = Kernel::parse("wendland:n=1,l=1");
  Eigen::VectorXd x(3), q(2);
  x << 0.1, 0.5, 0.9;
  q << 0.2, 0.77;
  const Eigen::MatrixXd C = cross_kernel_matrix(k, x, q);
  ASSERT_EQ(C.rows(), 3);
  ASSERT_EQ(C.cols(), 2);
  for (Eigen::Index l = 0; l < 2; ++l) EXPECT_EQ(C.col(l), kernel_vector(k, x, q(l)));
}

TEST(Profiles, NonIncreasing) {
  for (const char* spec : {"wendland:n=1,l=0", "wendland:n=1,l=1", "wendland:n=3,l=2", "matern:nu=0.5",
                           "matern:nu=1.5", "matern:nu=2.5"}) {
    const Kernel k = Kernel::parse(spec);
    double previous = k.profile(0.0);
    for (int i = 1; i <= 3000; ++i) {
      const double value = k.profile(i / 1000.0);
      EXPECT_LE(value, previous + 1e-15) << spec << " r=" << i / 1000.0;
      previous = value;
    }
  }
}

TEST(FillDistance, EquispacedMidpoints) {
  for (int d : {1, 5, 10}) {
    Eigen::VectorXd x(d);
    for (int i = 0; i < d; ++i) x(i) = (2.0 * i + 1) / (2.0 * d);
    EXPECT_NEAR(fill_distance(x, Box::interval(0, 1)), 0.5 / d, 1e-4) << "d=" << d;
  }
}

TEST(FillDistance, SingleCentralPoint) {
  Eigen::VectorXd x(1);
  x << 0.5;
  EXPECT_NEAR(fill_distance(x, Box::interval(0, 1)), 0.5, 1e-12);
}

TEST(FillDistance, ShrinksWithDensity) {
  Eigen::VectorXd x = Eigen::VectorXd::LinSpaced(1001, 0.0, 1.0);
  EXPECT_LT(fill_distance(x, Box::interval(0, 1)), 1e-3);
}

TEST(FillDistance, Errors) {
  EXPECT_THROW(fill_distance(Eigen::MatrixXd(0, 1), Box::interval(0, 1)), ConfigError);
  Eigen::VectorXd x(1);
  x << 0.5;
  EXPECT_THROW(fill_distance(x, Box::interval(0, 1), 1), ConfigError);
}

TEST(PointSet, CachesKernelMatrix) {
  Eigen::VectorXd x(3);
  x << 0.1, 0.5, 0.9;
  const PointSet ps(Kernel::parse("wendland:n=1,l=1"), x, 1.0 / 6.0);
  EXPECT_EQ(ps.size(), 3);
  EXPECT_EQ(ps.kernel_matrix(), kernel_matrix(ps.kernel(), x));
  EXPECT_EQ(ps.kernel_matrix().diagonal(), Eigen::VectorXd::Ones(3));
  EXPECT_DOUBLE_EQ(*ps.fill_distance(), 1.0 / 6.0);
  EXPECT_EQ(ps.coordinates(), x);
}

}  // namespace
}  // namespace skedmd
