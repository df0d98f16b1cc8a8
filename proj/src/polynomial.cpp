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

#include "skedmd/polynomial.hpp"

#include <algorithm>
#include <sstream>

namespace skedmd {

Polynomial::Polynomial(std::vector<Rational> coefficients) : exact_(std::move(coefficients)) {
  while (exact_.size() > 1 && exact_.back() == 0) exact_.pop_back();
  if (exact_.empty()) exact_.emplace_back(0);
  approx_.reserve(exact_.size());
  for (const auto& c : exact_) approx_.push_back(static_cast<double>(c));
}

Polynomial Polynomial::one_minus_r_pow(int power) {
  // Binomial expansion: sum_k C(power, k) (-r)^k.
  std::vector<Rational> coeffs(static_cast<std::size_t>(power) + 1);
  boost::multiprecision::cpp_int binom = 1;
  for (int k = 0; k <= power; ++k) {
    coeffs[k] = Rational(k % 2 == 0 ? binom : -binom);
    binom = binom * (power - k) / (k + 1);
  }
  return Polynomial(std::move(coeffs));
}

Rational Polynomial::exact_at(const Rational& r) const {
  Rational acc = exact_.back();
  for (auto it = exact_.rbegin() + 1; it != exact_.rend(); ++it) acc = acc * r + *it;
  return acc;
}

Polynomial Polynomial::antiderivative() const {
  std::vector<Rational> out(exact_.size() + 1);
  out[0] = 0;
  for (std::size_t k = 0; k < exact_.size(); ++k) out[k + 1] = exact_[k] / Rational(k + 1);
  return Polynomial(std::move(out));
}

Polynomial Polynomial::times_r() const {
  std::vector<Rational> out(exact_.size() + 1);
  out[0] = 0;
  std::copy(exact_.begin(), exact_.end(), out.begin() + 1);
  return Polynomial(std::move(out));
}

Polynomial Polynomial::scaled(const Rational& factor) const {
  std::vector<Rational> out = exact_;
  for (auto& c : out) c *= factor;
  return Polynomial(std::move(out));
}

Polynomial Polynomial::operator-(const Polynomial& other) const {
  std::vector<Rational> out(std::max(exact_.size(), other.exact_.size()), Rational(0));
  for (std::size_t k = 0; k < exact_.size(); ++k) out[k] += exact_[k];
  for (std::size_t k = 0; k < other.exact_.size(); ++k) out[k] -= other.exact_[k];
  return Polynomial(std::move(out));
}

std::string Polynomial::to_string() const {
  std::ostringstream os;
  for (std::size_t k = 0; k < exact_.size(); ++k) {
    if (k) os << ", ";
    os << exact_[k];
  }
  return os.str();
}

}  // namespace skedmd
