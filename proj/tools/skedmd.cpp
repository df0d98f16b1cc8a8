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

// Command-line front end: fit, experiment, sweep, bounds, kernel-info.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "skedmd/bounds.hpp"
#include "skedmd/errors.hpp"
#include "skedmd/harness.hpp"
#include "skedmd/kernels.hpp"
#include "skedmd/koopman.hpp"
#include "skedmd/spec_string.hpp"

namespace {

using nlohmann::json;
using namespace skedmd;

constexpr int kExitOk = 0;
constexpr int kExitNumerical = 1;
constexpr int kExitConfig = 2;

struct CommonOptions {
  std::string config_path;
  std::string out_path;
  std::string format = "auto";
  std::optional<std::uint64_t> seed;
  int threads = 0;
  std::vector<std::string> overrides;
};

/// Current stage, named in numerical-failure diagnostics.
std::string g_stage = "startup";

void add_common(CLI::App* cmd, CommonOptions& o, bool needs_config) {
  auto* config = cmd->add_option("--config", o.config_path, "Config file (JSON or key=value lines)");
  if (needs_config) config->required();
  cmd->add_option("--out", o.out_path, "Output file (default: standard output)");
  cmd->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"auto", "csv", "json"}));
  cmd->add_option("--seed", o.seed, "Master seed (overrides the config)");
  cmd->add_option("--threads", o.threads, "Worker threads (0: all logical cores)");
  cmd->add_option("overrides", o.overrides, "key=value config overrides");
}

std::string resolve_format(const CommonOptions& o, const std::string& fallback) {
  return o.format == "auto" ? fallback : o.format;
}

json load_config_json(const CommonOptions& o) {
  json j = o.config_path.empty() ? json::object() : read_config_file(o.config_path);
  for (const std::string& assignment : o.overrides) apply_override(j, assignment);
  if (o.seed) j["master_seed"] = *o.seed;
  return j;
}

void write_output(const CommonOptions& o, const std::string& text) {
  if (o.out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(o.out_path, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + o.out_path + "'");
  out << text;
}

/// "<stem>.<tag>.csv" next to the --out file.
std::string sidecar_path(const std::string& out, const std::string& tag) {
  std::filesystem::path p(out);
  return (p.parent_path() / (p.stem().string() + "." + tag + ".csv")).string();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + path + "'");
  out << text;
}

int run_fit(const CommonOptions& o) {
  g_stage = "config";
  const ExperimentConfig config = parse_experiment_config(load_config_json(o));
  const ResolvedExperiment r = resolve(config);
  g_stage = "propagated matrix";
  PropagatedMatrix propagated = build_propagated_matrix(r.points, *r.sampler, r.m_train,
                                                        realization_seed(config.master_seed, 0), o.threads);
  g_stage = "fit";
  const KoopmanApproximant approx = fit(r.points, r.observable, std::move(propagated), r.lambda, config.condition_cap);
  g_stage = "output";
  if (resolve_format(o, "json") == "json") {
    json j = approx.to_json();
    j["experiment_id"] = config.experiment_id;
    j["sampler"] = config.sampler;
    j["observable"] = config.observable;
    write_output(o, j.dump(2) + "\n");
  } else {
    const Eigen::VectorXd prediction = approx.evaluate(r.grid);
    std::string text = "x,prediction\n";
    for (Eigen::Index l = 0; l < r.grid.size(); ++l) {
      text += csv_number(r.grid(l)) + "," + csv_number(prediction(l)) + "\n";
    }
    write_output(o, text);
  }
  return kExitOk;
}

int run_experiment_verb(const CommonOptions& o) {
  g_stage = "config";
  const ExperimentConfig config = parse_experiment_config(load_config_json(o));
  g_stage = "experiment";
  const ExperimentResult result = run_experiment(config, o.threads);
  std::cerr << config.experiment_id << ": d=" << result.d << " m=" << result.m_train
            << " lambda=" << format_number(result.lambda) << " mean=" << format_number(result.mean)
            << " std=" << format_number(result.std) << " (" << format_number(std::round(result.wall_time_seconds * 100) / 100)
            << " s)\n";
  g_stage = "output";
  if (resolve_format(o, "csv") == "json") {
    write_output(o, result_to_json(result).dump(2) + "\n");
    return kExitOk;
  }
  write_output(o, results_csv_header() + "\n" + results_csv_row(result) + "\n");
  std::string sidecar = realizations_csv_header() + "\n";
  for (const std::string& row : realizations_csv_rows(result)) sidecar += row + "\n";
  if (!o.out_path.empty()) write_file(sidecar_path(o.out_path, "realizations"), sidecar);
  return kExitOk;
}

int run_sweep_verb(const CommonOptions& o, std::string axis_text, std::vector<double> values) {
  g_stage = "config";
  json j = load_config_json(o);
  if (j.contains("sweep")) {
    const json& s = j.at("sweep");
    if (!s.is_object()) throw ConfigError("sweep: expected {\"axis\": ..., \"values\": [...]}");
    if (axis_text.empty() && s.contains("axis")) axis_text = s.at("axis").get<std::string>();
    if (values.empty() && s.contains("values")) values = s.at("values").get<std::vector<double>>();
    j.erase("sweep");
  }
  if (axis_text.empty()) throw ConfigError("sweep: no axis given (--axis or config key sweep.axis)");
  const SweepAxis axis = parse_sweep_axis(axis_text);
  // Cells override the swept field, so the base needs a placeholder when it is absent.
  if (axis == SweepAxis::kFillDistance && !j.contains("h") && !j.contains("d") && !values.empty()) {
    j["h"] = values.front();
  }
  if (axis == SweepAxis::kTrainingSamples && !j.contains("m_train") && !values.empty()) {
    j["m_train"] = values.front();
  }
  const ExperimentConfig base = parse_experiment_config(j);
  const std::vector<ExperimentConfig> configs = expand_sweep(base, axis, values);
  g_stage = "sweep";
  const std::vector<SweepCell> cells = sweep(configs, o.threads, &std::cerr);

  g_stage = "output";
  bool any_failed = false;
  if (resolve_format(o, "csv") == "json") {
    json out = json::array();
    for (const SweepCell& cell : cells) {
      if (cell.result) {
        out.push_back(result_to_json(*cell.result));
      } else {
        out.push_back({{"experiment_id", cell.config.experiment_id}, {"error", cell.error}});
        any_failed = true;
      }
    }
    write_output(o, out.dump(2) + "\n");
  } else {
    std::string text = results_csv_header() + "\n";
    std::string sidecar = realizations_csv_header() + "\n";
    std::string failures = failures_csv_header() + "\n";
    for (const SweepCell& cell : cells) {
      if (cell.result) {
        text += results_csv_row(*cell.result) + "\n";
        for (const std::string& row : realizations_csv_rows(*cell.result)) sidecar += row + "\n";
      } else {
        failures += failure_csv_row(cell) + "\n";
        any_failed = true;
      }
    }
    write_output(o, text);
    if (!o.out_path.empty()) {
      write_file(sidecar_path(o.out_path, "realizations"), sidecar);
      if (any_failed) write_file(sidecar_path(o.out_path, "failures"), failures);
    }
  }
  return any_failed ? kExitNumerical : kExitOk;
}

struct BoundsOptions {
  std::string kind = "plain";
  std::string kernel = "wendland:n=1,l=1";
  double h = 0.1;
  std::optional<double> smoothness_l;
  std::optional<double> smoothness_nu;
  double lambda = 0.0;
  std::optional<long> d;
  long m = 1;
  std::optional<double> eps;
  std::optional<double> delta;
  std::optional<double> stability;
  double c1 = 1.0;
  std::optional<double> c2;
  double operator_norm = 1.0;
  double norm_scale = 1.0;
  std::string experiment_id;
};

int run_bounds(const CommonOptions& o, const BoundsOptions& b) {
  g_stage = "config";
  const Kernel kernel = Kernel::parse(b.kernel);
  BoundRequest req;
  req.kind = parse_bound_kind(b.kind);
  req.family = kernel.family();
  req.fill_distance = b.h;
  if (req.family == KernelFamily::kWendland) {
    req.smoothness = b.smoothness_l.value_or(kernel.wendland()->smoothness());
  } else {
    req.smoothness = b.smoothness_nu.value_or(kernel.matern()->nu());
  }
  req.lambda = b.lambda;
  req.d = b.d ? *b.d : static_cast<long>(design_point_count(b.h, Interval{}));
  req.m = b.m;
  req.c1 = b.c1;
  req.c2 = b.c2.value_or(std::sqrt(kernel.sup_norm()));
  req.operator_norm = b.operator_norm;
  req.norm_scale = b.norm_scale;
  if (b.eps && b.delta) throw ConfigError("give either --eps or --delta, not both");
  if (b.eps) {
    req.epsilon = *b.eps;
  } else if (b.delta) {
    req.epsilon = epsilon_for_failure_probability(req.d, req.m, *b.delta, req.c2 * req.c2);
  } else {
    throw ConfigError("bounds needs --eps or --delta");
  }
  if (req.kind == BoundKind::kPlain) {
    if (b.stability) {
      req.stability = *b.stability;
    } else {
      g_stage = "stability factor";
      const PointSet points = design_points_count(req.d, Interval{}, kernel);
      const StabilityMode mode = req.d <= kDefaultExactStabilityCap ? StabilityMode::kExact
                                                                     : StabilityMode::kEigenvalueBound;
      req.stability = stability_factor(points, req.lambda, mode);
    }
  }
  g_stage = "bounds";
  const BoundReport report = total_bound(req);
  if (resolve_format(o, "json") == "json") {
    write_output(o, report.to_json(b.experiment_id).dump(2) + "\n");
  } else {
    write_output(o, BoundReport::csv_header() + "\n" + report.csv_row(b.experiment_id) + "\n");
  }
  return kExitOk;
}

int run_kernel_info(const CommonOptions& o, const std::string& spec) {
  g_stage = "config";
  const Kernel kernel = Kernel::parse(spec);
  json j = {{"kernel", kernel.spec()},
            {"family", to_string(kernel.family())},
            {"sup_norm", kernel.sup_norm()},
            {"fill_distance_rate", kernel.fill_distance_rate()}};
  std::vector<std::string> exact;
  if (const WendlandKernel* w = kernel.wendland()) {
    for (const Rational& c : w->polynomial().coefficients()) exact.push_back(c.str());
    j["coefficients"] = exact;
    j["coefficients_double"] = w->polynomial().coefficients_double();
    j["polynomial"] = w->polynomial().to_string();
    j["raw_scale"] = w->raw_scale().str();
    j["sobolev_order"] = w->sobolev_order();
  } else {
    j["nu"] = kernel.matern()->nu();
    j["alpha"] = kernel.matern()->alpha();
  }
  if (resolve_format(o, "csv") == "json") {
    write_output(o, j.dump(2) + "\n");
    return kExitOk;
  }
  std::string text;
  if (kernel.wendland()) {
    text = "power,coefficient\n";
    for (std::size_t i = 0; i < exact.size(); ++i) text += std::to_string(i) + "," + exact[i] + "\n";
  } else {
    text = "kernel,nu,alpha,fill_distance_rate\n\"" + kernel.spec() + "\"," +
           format_number(kernel.matern()->nu()) + "," + format_number(kernel.matern()->alpha()) + "," +
           format_number(kernel.fill_distance_rate()) + "\n";
  }
  write_output(o, text);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"skedmd: stochastic kernel EDMD experiments and error bounds"};
  app.require_subcommand(1);

  CommonOptions fit_opts, experiment_opts, sweep_opts, bounds_opts, info_opts;

  auto* fit_cmd = app.add_subcommand("fit", "Fit one approximant and print it (JSON) or its grid predictions (CSV)");
  add_common(fit_cmd, fit_opts, true);

  auto* experiment_cmd = app.add_subcommand("experiment", "Run n_pred realizations and report error statistics");
  add_common(experiment_cmd, experiment_opts, true);

  auto* sweep_cmd = app.add_subcommand("sweep", "Run an experiment across a fill-distance or m_train axis");
  add_common(sweep_cmd, sweep_opts, true);
  std::string sweep_axis;
  std::vector<double> sweep_values;
  sweep_cmd->add_option("--axis", sweep_axis, "fill_distance or m_train");
  sweep_cmd->add_option("--values", sweep_values, "Axis values")->delimiter(',');

  auto* bounds_cmd = app.add_subcommand("bounds", "Evaluate an a-priori error bound");
  bounds_cmd->set_help_flag("--help", "Print this help message and exit");
  add_common(bounds_cmd, bounds_opts, false);
  BoundsOptions b;
  bounds_cmd->add_option("--kind", b.kind, "plain or regularized");
  bounds_cmd->add_option("--kernel", b.kernel, "Kernel spec (selects the family and default smoothness)");
  bounds_cmd->add_option("--h", b.h, "Fill distance");
  bounds_cmd->add_option("--l", b.smoothness_l, "Wendland smoothness l");
  bounds_cmd->add_option("--nu", b.smoothness_nu, "Matern smoothness nu");
  bounds_cmd->add_option("--lambda", b.lambda, "Regularization parameter");
  bounds_cmd->add_option("--d", b.d, "Number of design points (default: from h on (0, 1))");
  bounds_cmd->add_option("--m", b.m, "Monte Carlo samples per column");
  bounds_cmd->add_option("--eps", b.eps, "Monte Carlo accuracy epsilon");
  bounds_cmd->add_option("--delta", b.delta, "Target failure probability (solves for epsilon)");
  bounds_cmd->add_option("--stability", b.stability, "Stability factor (default: computed on midpoint design)");
  bounds_cmd->add_option("--c1", b.c1, "Deterministic constant");
  bounds_cmd->add_option("--c2", b.c2, "Probabilistic constant (default sqrt(k_inf))");
  bounds_cmd->add_option("--opnorm", b.operator_norm, "Koopman operator norm on the native space");
  bounds_cmd->add_option("--norm-scale", b.norm_scale, "Native-space norm of the observable");
  bounds_cmd->add_option("--experiment-id", b.experiment_id, "Join key for experiment CSVs");

  auto* info_cmd = app.add_subcommand("kernel-info", "Print kernel coefficients and rates");
  add_common(info_cmd, info_opts, false);
  std::string kernel_spec = "wendland:n=1,l=1";
  info_cmd->add_option("--kernel", kernel_spec, "Kernel spec");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (*fit_cmd) return run_fit(fit_opts);
    if (*experiment_cmd) return run_experiment_verb(experiment_opts);
    if (*sweep_cmd) return run_sweep_verb(sweep_opts, sweep_axis, sweep_values);
    if (*bounds_cmd) return run_bounds(bounds_opts, b);
    if (*info_cmd) return run_kernel_info(info_opts, kernel_spec);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error in stage '" << g_stage << "': " << e.what() << "\n";
    return kExitNumerical;
  } catch (const json::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error in stage '" << g_stage << "': " << e.what() << "\n";
    return kExitNumerical;
  }
  return kExitConfig;
}
