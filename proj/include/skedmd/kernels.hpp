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
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "skedmd/errors.hpp"
#include "skedmd/polynomial.hpp"

namespace skedmd {

/// Normalized Wendland profile p_{n,l} together with the raw scale of the
/// recursion, so that raw = scale * normalized.
struct WendlandProfile {
  Polynomial normalized;
  Rational scale;
};

/// Runs the integral-operator recursion beta_{n,l} = I^l (1 - r)_+^{floor(n/2)+l+1}
/// exactly in rational arithmetic and normalizes the result to value 1 at r = 0.
WendlandProfile wendland_profile(int n, int l);

/// Compactly supported Wendland kernel on R^n with support radius 1.
class WendlandKernel {
 public:
  WendlandKernel(int n, int l);

  int dimension() const { return n_; }
  int smoothness() const { return l_; }
  const Polynomial& polynomial() const { return profile_.normalized; }
  const Rational& raw_scale() const { return profile_.scale; }
  /// Order (n+1)/2 + l of the Sobolev space generated by the kernel.
  double sobolev_order() const { return (n_ + 1) / 2.0 + l_; }
  /// Exponent of h in the interpolation error bound.
  double fill_distance_rate() const { return l_ + 0.5; }

  /// normalized(r) = (1 - r)^support_power() * cofactor()(r), with
  /// cofactor()(1) != 0.
  int support_power() const { return support_power_; }
  const Polynomial& cofactor() const { return cofactor_; }

  /// Evaluated in factored form, so values near r = 1 keep full relative
  /// accuracy and never turn negative.
  template <typename Scalar>
  Scalar profile(Scalar r) const {
    using std::abs;
    r = abs(r);
    if (r >= Scalar(1)) return Scalar(0);
    const Scalar s = Scalar(1) - r;
    Scalar power = Scalar(1);
    for (int k = 0; k < support_power_; ++k) power *= s;
    return power * cofactor_(r);
  }

 private:
  int n_;
  int l_;
  WendlandProfile profile_;
  int support_power_ = 0;
  Polynomial cofactor_;
};

/// Matern kernel for half-integer smoothness nu = s + 1/2, closed form
///   exp(-z) * s!/(2s)! * sum_i (s+i)!/(i!(s-i)!) (2z)^(s-i),  z = sqrt(2 nu) r / alpha.
class MaternKernel {
 public:
  explicit MaternKernel(double nu, double alpha = 1.0);

  double nu() const { return nu_; }
  double alpha() const { return alpha_; }
  double fill_distance_rate() const { return std::floor(nu_); }

  template <typename Scalar>
  Scalar profile(Scalar r) const {
    using std::abs;
    using std::exp;
    Scalar z = Scalar(scale_) * abs(r);
    Scalar acc = Scalar(terms_.back());
    for (auto it = terms_.rbegin() + 1; it != terms_.rend(); ++it) acc = acc * z + Scalar(*it);
    return acc * exp(-z);
  }

 private:
  double nu_;
  double alpha_;
  double scale_;
  std::vector<double> terms_;  // polynomial in z, ascending
};

enum class KernelFamily { kWendland, kMatern };

/// Radial kernel selected from a spec string such as "wendland:n=1,l=1" or
/// "matern:nu=1.5". Immutable; cheap to copy.
class Kernel {
 public:
  Kernel(WendlandKernel k) : impl_(std::move(k)) {}  // NOLINT
  Kernel(MaternKernel k) : impl_(std::move(k)) {}    // NOLINT

  static Kernel parse(std::string_view spec);
  std::string spec() const;

  KernelFamily family() const {
    return std::holds_alternative<WendlandKernel>(impl_) ? KernelFamily::kWendland
                                                         : KernelFamily::kMatern;
  }
  const WendlandKernel* wendland() const { return std::get_if<WendlandKernel>(&impl_); }
  const MaternKernel* matern() const { return std::get_if<MaternKernel>(&impl_); }

  template <typename Scalar>
  Scalar profile(Scalar r) const {
    return std::visit([r](const auto& k) { return k.template profile<Scalar>(r); }, impl_);
  }

  double operator()(double x, double y) const { return profile(x - y); }

  template <typename DerivedA, typename DerivedB>
  typename DerivedA::Scalar operator()(const Eigen::MatrixBase<DerivedA>& x,
                                       const Eigen::MatrixBase<DerivedB>& y) const {
    return profile((x - y).norm());
  }

  /// sup_x k(x, x) = profile(0); 1 for every normalized kernel here.
  double sup_norm() const { return profile(0.0); }
  /// Exponent of the deterministic error rate in the fill distance.
  double fill_distance_rate() const {
    return std::visit([](const auto& k) { return k.fill_distance_rate(); }, impl_);
  }
  bool compact_support() const { return family() == KernelFamily::kWendland; }

 private:
  std::variant<WendlandKernel, MaternKernel> impl_;
};

/// Symmetric kernel matrix (k(x_i, x_j)) for points stored row-wise. Each
/// pair is evaluated once and mirrored, so the result equals its transpose
/// bit-exactly. Throws ConfigError on duplicate points.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> kernel_matrix(
    const Kernel& kernel, const Eigen::MatrixBase<Derived>& points) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index d = points.rows();
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> K(d, d);
  for (Eigen::Index j = 0; j < d; ++j) {
    K(j, j) = kernel.profile(Scalar(0));
    for (Eigen::Index i = j + 1; i < d; ++i) {
      Scalar r = (points.row(i) - points.row(j)).norm();
      if (r == Scalar(0)) {
        throw ConfigError("duplicate design points at rows " + std::to_string(j) + " and " +
                          std::to_string(i) + "; kernel matrix would be singular");
      }
      K(i, j) = K(j, i) = kernel.profile(r);
    }
  }
  return K;
}

/// k_X(x) = (k(x_1, x), ..., k(x_d, x))^T.
template <typename Derived, typename DerivedX>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> kernel_vector(
    const Kernel& kernel, const Eigen::MatrixBase<Derived>& points,
    const Eigen::MatrixBase<DerivedX>& x) {
  using Scalar = typename Derived::Scalar;
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> k(points.rows());
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    k(i) = kernel.profile((points.row(i) - x.transpose().template cast<Scalar>()).norm());
  }
  return k;
}

/// One-dimensional convenience: points is a column of scalars.
Eigen::VectorXd kernel_vector(const Kernel& kernel, const Eigen::VectorXd& points, double x);

/// Matrix whose column l is k_X(query_l) for 1-D design points and queries.
Eigen::MatrixXd cross_kernel_matrix(const Kernel& kernel, const Eigen::VectorXd& points,
                                    const Eigen::VectorXd& queries);

/// Axis-aligned box [lower, upper] in R^n.
struct Box {
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;

  static Box interval(double a, double b) {
    return Box{Eigen::VectorXd::Constant(1, a), Eigen::VectorXd::Constant(1, b)};
  }
};

/// Grid approximation of the fill distance sup_{z in box} min_i |z - x_i|:
/// the maximum over `resolution` uniform points per axis (endpoints included)
/// of the distance to the nearest design point. Underestimates the supremum
/// by at most half a grid diagonal.
double fill_distance(const Eigen::MatrixXd& points, const Box& domain, int resolution = 10001);

/// Design points together with their kernel and kernel matrix K_X.
/// Holds no factorization; RegularizedCholesky (linalg.hpp) is built per
/// lambda so the object stays immutable.
class PointSet {
 public:
  PointSet(Kernel kernel, Eigen::MatrixXd points,
           std::optional<double> fill_distance = std::nullopt);

  const Kernel& kernel() const { return kernel_; }
  const Eigen::MatrixXd& points() const { return points_; }
  /// First coordinate of every point; the 1-D view used by samplers.
  Eigen::VectorXd coordinates() const { return points_.col(0); }
  Eigen::Index size() const { return points_.rows(); }
  Eigen::Index dimension() const { return points_.cols(); }
  const Eigen::MatrixXd& kernel_matrix() const { return kernel_matrix_; }
  std::optional<double> fill_distance() const { return fill_distance_; }

 private:
  Kernel kernel_;
  Eigen::MatrixXd points_;
  Eigen::MatrixXd kernel_matrix_;
  std::optional<double> fill_distance_;
};

}  // namespace skedmd
