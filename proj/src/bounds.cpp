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

#include "skedmd/bounds.hpp"

#include <cmath>
#include <sstream>

#include "skedmd/koopman.hpp"
#include "skedmd/spec_string.hpp"

namespace skedmd {

namespace {

void require_positive(double value, const char* name) {
  if (!(value > 0)) throw ConfigError(std::string(name) + " must be positive");
}
void require_non_negative(double value, const char* name) {
  if (!(value >= 0)) throw ConfigError(std::string(name) + " must be >= 0");
}

double clip_probability(double p) { return std::min(1.0, p); }

}  // namespace

double deterministic_bound_wendland(double c, double h, int l, double operator_norm) {
  require_positive(h, "fill distance h");
  return c * (1.0 + operator_norm) * std::pow(h, wendland_rate(l));
}

double deterministic_bound_matern(double c, double h, double nu, double operator_norm) {
  require_positive(h, "fill distance h");
  return c * (1.0 + operator_norm) * std::pow(h, matern_rate(nu));
}

double regularized_deterministic_bound(double c, double h, int l, double lambda) {
  require_positive(h, "fill distance h");
  require_non_negative(lambda, "lambda");
  return c * (std::pow(h, wendland_rate(l)) + std::sqrt(lambda));
}

double regularized_deterministic_bound_matern(double c, double h, double nu, double lambda) {
  require_positive(h, "fill distance h");
  require_non_negative(lambda, "lambda");
  return c * (std::pow(h, matern_rate(nu)) + std::sqrt(lambda));
}

double mc_failure_probability(long d, long m, double epsilon, double k_inf) {
  if (d < 1 || m < 1) throw ConfigError("failure probability needs d >= 1 and m >= 1");
  require_non_negative(epsilon, "epsilon");
  require_positive(k_inf, "k_inf");
  return clip_probability(2.0 * static_cast<double>(d) *
                          std::exp(-static_cast<double>(m) * epsilon * epsilon / (2.0 * k_inf)));
}

double epsilon_for_failure_probability(long d, long m, double delta, double k_inf) {
  if (d < 1 || m < 1) throw ConfigError("epsilon inversion needs d >= 1 and m >= 1");
  if (!(delta > 0 && delta < 2.0 * d)) throw ConfigError("target failure probability must lie in (0, 2d)");
  return std::sqrt(2.0 * k_inf * std::log(2.0 * static_cast<double>(d) / delta) / static_cast<double>(m));
}

double mc_bound(double epsilon, double k_inf, double stability) {
  require_non_negative(epsilon, "epsilon");
  return epsilon * std::sqrt(k_inf) * stability;
}

double regularized_mc_bound(double epsilon, double k_inf, long d, double lambda) {
  require_positive(lambda, "lambda");
  return mc_bound(epsilon, k_inf, std::sqrt(static_cast<double>(d) / lambda));
}

double l2_failure_probability(long d, long m, double epsilon, double k_inf) {
  if (d < 1 || m < 1) throw ConfigError("failure probability needs d >= 1 and m >= 1");
  require_non_negative(epsilon, "epsilon");
  return clip_probability(2.0 * std::exp(-static_cast<double>(m) * epsilon * epsilon /
                                         (8.0 * static_cast<double>(d) * k_inf)));
}

L2BoundResult alternative_l2_bound(long m, double epsilon, double k_inf, const PointSet& points, double x) {
  const Eigen::VectorXd weights = lagrange_weights(points, x);
  L2BoundResult out;
  out.l2_factor = weights.norm();
  out.l1_factor = weights.lpNorm<1>();
  out.bound = epsilon * out.l2_factor;
  out.failure_probability = l2_failure_probability(static_cast<long>(points.size()), m, epsilon, k_inf);
  return out;
}

BoundReport total_bound(const BoundRequest& request) {
  const BoundRequest& r = request;
  require_positive(r.fill_distance, "fill distance h");
  require_non_negative(r.lambda, "lambda");
  require_non_negative(r.epsilon, "epsilon");
  require_positive(r.norm_scale, "norm scale");

  BoundReport report;
  report.inputs = r;
  report.epsilon = r.epsilon;
  report.rate = r.family == KernelFamily::kWendland ? wendland_rate(static_cast<int>(std::lround(r.smoothness)))
                                                    : matern_rate(r.smoothness);
  const double h_term = std::pow(r.fill_distance, report.rate);

  if (r.kind == BoundKind::kPlain) {
    if (!r.stability) throw ConfigError("plain bound needs the stability factor");
    report.stability = *r.stability;
    report.deterministic_part = r.c1 * (1.0 + r.operator_norm) * h_term;
  } else {
    require_positive(r.lambda, "lambda (regularized bound)");
    report.stability = std::sqrt(static_cast<double>(r.d) / r.lambda);
    report.deterministic_part = r.c1 * (h_term + std::sqrt(r.lambda));
  }
  report.probabilistic_part = r.epsilon * r.c2 * report.stability;
  report.deterministic_part *= r.norm_scale;
  report.probabilistic_part *= r.norm_scale;
  report.failure_probability = mc_failure_probability(r.d, r.m, r.epsilon, r.c2 * r.c2);
  return report;
}

nlohmann::json BoundReport::to_json(const std::string& experiment_id) const {
  nlohmann::json j = {
      {"kind", to_string(inputs.kind)},
      {"family", to_string(inputs.family)},
      {"deterministic_part", deterministic_part},
      {"probabilistic_part", probabilistic_part},
      {"total", total()},
      {"epsilon", epsilon},
      {"failure_probability", failure_probability},
      {"inputs",
       {{"h", inputs.fill_distance},
        {"d", inputs.d},
        {"m", inputs.m},
        {"lambda", inputs.lambda},
        {"smoothness", inputs.smoothness},
        {"rate", rate},
        {"stability", stability},
        {"c1", inputs.c1},
        {"c2", inputs.c2},
        {"operator_norm", inputs.operator_norm},
        {"norm_scale", inputs.norm_scale}}},
  };
  if (!experiment_id.empty()) j["experiment_id"] = experiment_id;
  return j;
}

std::string BoundReport::csv_header() {
  return "experiment_id,kind,family,h,d,m,lambda,smoothness,rate,stability,c1,c2,operator_norm,"
         "norm_scale,epsilon,deterministic_part,probabilistic_part,total,failure_probability";
}

std::string BoundReport::csv_row(const std::string& experiment_id) const {
  std::ostringstream os;
  auto num = [](double v) { return format_number(v); };
  os << experiment_id << ',' << to_string(inputs.kind) << ',' << to_string(inputs.family) << ','
     << num(inputs.fill_distance) << ',' << inputs.d << ',' << inputs.m << ',' << num(inputs.lambda) << ','
     << num(inputs.smoothness) << ',' << num(rate) << ',' << num(stability) << ',' << num(inputs.c1) << ','
     << num(inputs.c2) << ',' << num(inputs.operator_norm) << ',' << num(inputs.norm_scale) << ','
     << num(epsilon) << ',' << num(deterministic_part) << ',' << num(probabilistic_part) << ','
     << num(total()) << ',' << num(failure_probability);
  return os.str();
}

std::string to_string(BoundKind kind) { return kind == BoundKind::kPlain ? "plain" : "regularized"; }

BoundKind parse_bound_kind(const std::string& text) {
  if (text == "plain") return BoundKind::kPlain;
  if (text == "regularized") return BoundKind::kRegularized;
  throw ConfigError("bound kind must be 'plain' or 'regularized', got '" + text + "'");
}

std::string to_string(KernelFamily family) {
  return family == KernelFamily::kWendland ? "wendland" : "matern";
}

KernelFamily parse_kernel_family(const std::string& text) {
  if (text == "wendland") return KernelFamily::kWendland;
  if (text == "matern") return KernelFamily::kMatern;
  throw ConfigError("kernel family must be 'wendland' or 'matern', got '" + text + "'");
}

}  // namespace skedmd
