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

#include <string>

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include "skedmd/errors.hpp"
#include "skedmd/spec_string.hpp"

namespace skedmd {

/// Default cap on the condition estimate of K_X when no regularization is used.
inline constexpr double kDefaultConditionCap = 1e12;

/// Cholesky factorization of K + lambda I. Never forms an inverse; all
/// products with (K + lambda I)^{-1} go through triangular solves.
///
/// At lambda = 0 the reciprocal condition estimate is checked against
/// `condition_cap` and IllConditionedError is thrown when exceeded. A failed
/// factorization (matrix not numerically positive definite) throws for any
/// lambda.
template <typename Scalar>
class RegularizedCholesky {
 public:
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  RegularizedCholesky(const Matrix& K, Scalar lambda, Scalar condition_cap = Scalar(kDefaultConditionCap))
      : lambda_(lambda) {
    if (!(lambda >= Scalar(0))) throw ConfigError("regularization lambda must be >= 0");
    Matrix shifted = K;
    shifted.diagonal().array() += lambda;
    llt_.compute(shifted);
    const Scalar rcond = llt_.info() == Eigen::Success ? llt_.rcond() : Scalar(0);
    condition_ = rcond > Scalar(0) ? Scalar(1) / rcond : std::numeric_limits<Scalar>::infinity();
    if (llt_.info() != Eigen::Success || (lambda == Scalar(0) && condition_ > condition_cap)) {
      throw IllConditionedError(
          "kernel matrix factorization failed: condition estimate " +
              format_number(static_cast<double>(condition_)) + " at lambda = " +
              format_number(static_cast<double>(lambda)) + " (cap " +
              format_number(static_cast<double>(condition_cap)) + "); use a regularization lambda > 0",
          static_cast<double>(condition_));
    }
  }

  template <typename Rhs>
  auto solve(const Eigen::MatrixBase<Rhs>& b) const {
    return llt_.solve(b);
  }

  Scalar lambda() const { return lambda_; }
  Scalar condition_estimate() const { return condition_; }
  Eigen::Index size() const { return llt_.rows(); }
  const Eigen::LLT<Matrix>& llt() const { return llt_; }

 private:
  Scalar lambda_;
  Scalar condition_;
  Eigen::LLT<Matrix> llt_;
};

using RegularizedCholeskyd = RegularizedCholesky<double>;

}  // namespace skedmd
