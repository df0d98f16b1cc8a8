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
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace skedmd {

using Rational = boost::multiprecision::cpp_rational;

/// Univariate polynomial with exact rational coefficients in the monomial
/// basis, ascending degree. Trailing zeros are trimmed on construction so
/// degree() == coefficients().size() - 1 (the zero polynomial has degree 0).
class Polynomial {
 public:
  Polynomial() : exact_{Rational(0)}, approx_{0.0} {}
  explicit Polynomial(std::vector<Rational> coefficients);

  /// (1 - r)^power expanded in the monomial basis.
  static Polynomial one_minus_r_pow(int power);

  int degree() const { return static_cast<int>(exact_.size()) - 1; }
  const std::vector<Rational>& coefficients() const { return exact_; }
  const std::vector<double>& coefficients_double() const { return approx_; }

  Rational exact_at(const Rational& r) const;

  /// Horner evaluation on the double coefficients.
  template <typename Scalar>
  Scalar operator()(Scalar r) const {
    Scalar acc = Scalar(approx_.back());
    for (auto it = approx_.rbegin() + 1; it != approx_.rend(); ++it) {
      acc = acc * r + Scalar(*it);
    }
    return acc;
  }

  /// Antiderivative P with P(0) = 0.
  Polynomial antiderivative() const;
  /// r * p(r).
  Polynomial times_r() const;
  Polynomial scaled(const Rational& factor) const;
  Polynomial operator-(const Polynomial& other) const;

  /// Coefficients as "c0, c1, ..." with exact fractions.
  std::string to_string() const;

 private:
  std::vector<Rational> exact_;
  std::vector<double> approx_;
};

}  // namespace skedmd
