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

#include "skedmd/kernels.hpp"

#include <cmath>
#include <limits>

#include "skedmd/spec_string.hpp"

namespace skedmd {

WendlandProfile wendland_profile(int n, int l) {
  if (n < 1 || l < 0) {
    throw ConfigError("Wendland kernel needs n >= 1 and l >= 0, got n=" + std::to_string(n) +
                      ", l=" + std::to_string(l));
  }
  Polynomial beta = Polynomial::one_minus_r_pow(n / 2 + l + 1);
  // beta lives on [0, 1], so I beta(r) = P(1) - P(r) with P' = t * beta(t).
  for (int step = 0; step < l; ++step) {
    Polynomial primitive = beta.times_r().antiderivative();
    Polynomial at_one({primitive.exact_at(Rational(1))});
    beta = at_one - primitive;
  }
  Rational scale = beta.exact_at(Rational(0));
  return WendlandProfile{beta.scaled(Rational(1) / scale), scale};
}

WendlandKernel::WendlandKernel(int n, int l) : n_(n), l_(l), profile_(wendland_profile(n, l)) {
  // Synthetic division by (r - 1) while r = 1 is a root.
  std::vector<Rational> c = profile_.normalized.coefficients();
  while (c.size() > 1 && Polynomial(c).exact_at(1) == 0) {
    std::vector<Rational> q(c.size() - 1);
    Rational carry = 0;
    for (std::size_t k = c.size() - 1; k >= 1; --k) {
      carry += c[k];
      q[k - 1] = carry;
    }
    for (Rational& v : q) v = -v;  // p = (r - 1) q' = (1 - r)(-q')
    c = std::move(q);
    ++support_power_;
  }
  cofactor_ = Polynomial(std::move(c));
}

MaternKernel::MaternKernel(double nu, double alpha) : nu_(nu), alpha_(alpha) {
  const double s_real = nu - 0.5;
  const long s = std::lround(s_real);
  if (!(nu > 0) || s < 0 || std::abs(s_real - static_cast<double>(s)) > 1e-12) {
    throw ConfigError("Matern kernel supports half-integer nu (0.5, 1.5, 2.5, ...), got nu=" +
                      format_number(nu));
  }
  if (!(alpha > 0)) throw ConfigError("Matern length scale alpha must be positive");
  scale_ = std::sqrt(2.0 * nu) / alpha;

  // Coefficient of z^(s-i) is s!/(2s)! * (s+i)!/(i!(s-i)!) * 2^(s-i).
  auto factorial = [](long k) { return std::tgamma(static_cast<double>(k) + 1.0); };
  terms_.assign(static_cast<std::size_t>(s) + 1, 0.0);
  const double lead = factorial(s) / factorial(2 * s);
  for (long i = 0; i <= s; ++i) {
    terms_[static_cast<std::size_t>(s - i)] =
        lead * factorial(s + i) / (factorial(i) * factorial(s - i)) * std::ldexp(1.0, static_cast<int>(s - i));
  }
}

Kernel Kernel::parse(std::string_view spec) {
  SpecString parsed = SpecString::parse(spec);
  if (parsed.kind() == "wendland") {
    long n = parsed.integer_or("n", 1);
    long l = parsed.integer_or("l", 1);
    parsed.reject_unused();
    return Kernel(WendlandKernel(static_cast<int>(n), static_cast<int>(l)));
  }
  if (parsed.kind() == "matern") {
    double nu = parsed.number_or("nu", 1.5);
    double alpha = parsed.number_or("alpha", 1.0);
    parsed.reject_unused();
    return Kernel(MaternKernel(nu, alpha));
  }
  throw ConfigError("unknown kernel kind '" + parsed.kind() + "' (expected wendland or matern)");
}

std::string Kernel::spec() const {
  if (const auto* w = wendland()) {
    return "wendland:n=" + std::to_string(w->dimension()) + ",l=" + std::to_string(w->smoothness());
  }
  const auto* m = matern();
  std::string out = "matern:nu=" + format_number(m->nu());
  if (m->alpha() != 1.0) out += ",alpha=" + format_number(m->alpha());
  return out;
}

Eigen::VectorXd kernel_vector(const Kernel& kernel, const Eigen::VectorXd& points, double x) {
  Eigen::VectorXd k(points.size());
  for (Eigen::Index i = 0; i < points.size(); ++i) k(i) = kernel(points(i), x);
  return k;
}

Eigen::MatrixXd cross_kernel_matrix(const Kernel& kernel, const Eigen::VectorXd& points,
                                    const Eigen::VectorXd& queries) {
  Eigen::MatrixXd out(points.size(), queries.size());
  for (Eigen::Index l = 0; l < queries.size(); ++l) {
    for (Eigen::Index i = 0; i < points.size(); ++i) out(i, l) = kernel(points(i), queries(l));
  }
  return out;
}

double fill_distance(const Eigen::MatrixXd& points, const Box& domain, int resolution) {
  if (points.rows() == 0) throw ConfigError("fill distance of an empty point set");
  if (resolution < 2) throw ConfigError("fill distance needs resolution >= 2 per axis");
  const Eigen::Index n = points.cols();
  if (domain.lower.size() != n || domain.upper.size() != n) {
    throw ConfigError("fill distance domain dimension does not match the points");
  }

  // Odometer over the tensor grid.
  std::vector<int> index(static_cast<std::size_t>(n), 0);
  Eigen::VectorXd z(n);
  double worst = 0.0;
  while (true) {
    for (Eigen::Index a = 0; a < n; ++a) {
      z(a) = domain.lower(a) +
             (domain.upper(a) - domain.lower(a)) * index[a] / static_cast<double>(resolution - 1);
    }
    double nearest = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < points.rows(); ++i) {
      nearest = std::min(nearest, (points.row(i).transpose() - z).squaredNorm());
    }
    worst = std::max(worst, nearest);

    Eigen::Index a = 0;
    while (a < n && ++index[a] == resolution) index[a++] = 0;
    if (a == n) break;
  }
  return std::sqrt(worst);
}

PointSet::PointSet(Kernel kernel, Eigen::MatrixXd points, std::optional<double> fill_distance)
    : kernel_(std::move(kernel)),
      points_(std::move(points)),
      kernel_matrix_(skedmd::kernel_matrix(kernel_, points_)),
      fill_distance_(fill_distance) {
  if (points_.rows() == 0) throw ConfigError("point set must contain at least one point");
}

}  // namespace skedmd
