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

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "skedmd/kernels.hpp"
#include "skedmd/koopman.hpp"
#include "skedmd/sde.hpp"

namespace skedmd {

/// Built-in observables: "exp" (e^x), "id" (x), "const:c" or "const:c=<value>".
Observable parse_observable(const std::string& id);

/// Number of midpoint-equispaced points whose fill distance is at most h:
/// d = ceil(width / (2h)), with a 1e-9 relative slack so that h = width/(2d)
/// maps back to d. Throws ConfigError if h <= 0 or h > width / 2.
Eigen::Index design_point_count(double h, Interval domain);
/// x_i = a + (2i - 1)(b - a)/(2d), i = 1..d.
Eigen::VectorXd midpoint_grid(Eigen::Index d, Interval domain);
/// Point set with exact fill distance (b - a)/(2d) <= h attached.
PointSet design_points(double h, Interval domain, const Kernel& kernel);
PointSet design_points_count(Eigen::Index d, Interval domain, const Kernel& kernel);

/// L equispaced points in [a + inset, b - inset].
Eigen::VectorXd evaluation_grid(Eigen::Index points, Interval domain, double inset = 1e-6);

/// Monte Carlo ground truth: grid point l averages f over m samples driven by
/// derive_seed(seed, kGroundTruth, {l}).
Eigen::VectorXd ground_truth_mc(const ConditionalSampler& sampler, const Observable& f,
                                const Eigen::VectorXd& grid, Eigen::Index m, std::uint64_t seed,
                                int threads = 1);
/// Exact ground truth: Simpson quadrature for the truncated-normal sampler and
/// f(F(x)) for a deterministic map. Throws ConfigError for any other sampler.
Eigen::VectorXd ground_truth_exact(const ConditionalSampler& sampler, const Observable& f,
                                   const Eigen::VectorXd& grid, int nodes = 10001);

enum class ScheduleProfile { kPowerLaw, kTable };

struct ScheduleAnchor {
  double h = 0.1;
  double m = 20;
  double lambda = 1e-3;
};

struct Schedule {
  long m_train = 0;
  double lambda = 0.0;
};

struct ScheduleRow {
  double h;
  double lambda;
  long m_train;
};

/// Fixed (h, lambda, m) rows used by the table profile.
const std::vector<ScheduleRow>& schedule_table();

/// Power law: m = round(m0 (h0/h)^(3/2)), lambda = lambda0 (h/h0)^3.
/// Table: exact row lookup (relative tolerance 1e-9); ConfigError if absent.
Schedule adaptive_schedule(double h, ScheduleProfile profile = ScheduleProfile::kPowerLaw,
                           ScheduleAnchor anchor = {});

enum class TruthMode { kMonteCarlo, kExact };

struct ExperimentConfig {
  std::string experiment_id = "experiment";
  std::string sampler;
  std::string kernel;
  std::string observable = "exp";
  std::optional<double> h;
  std::optional<long> d;
  std::optional<long> m_train;  // empty: adaptive
  std::optional<double> lambda;  // empty: adaptive
  ScheduleProfile schedule = ScheduleProfile::kPowerLaw;
  ScheduleAnchor anchor;
  long n_pred = 30;
  long m_truth = 100000;
  TruthMode truth = TruthMode::kMonteCarlo;
  int quadrature_nodes = 10001;
  long eval_points = 201;
  double eval_inset = 1e-6;
  std::uint64_t master_seed = 0;
  double condition_cap = kDefaultConditionCap;

  nlohmann::json to_json() const;
};

/// Parses and schema-checks a config object. Every violation is collected and
/// reported in a single ConfigError; nothing is applied partially.
ExperimentConfig parse_experiment_config(const nlohmann::json& j);
/// Reads a JSON file, or key=value lines when the file is not JSON.
nlohmann::json read_config_file(const std::filesystem::path& path);
ExperimentConfig validate_config(const std::filesystem::path& path);
/// Applies "key=value"; the value is read as JSON when possible, else as a string.
void apply_override(nlohmann::json& config, const std::string& assignment);

/// Everything an experiment needs, built from a config.
struct ResolvedExperiment {
  SamplerPtr sampler;
  Kernel kernel;
  Observable observable;
  PointSet points;
  double h;
  long m_train;
  double lambda;
  Eigen::VectorXd grid;
};
ResolvedExperiment resolve(const ExperimentConfig& config);

std::uint64_t realization_seed(std::uint64_t master_seed, long realization);

struct ExperimentResult {
  ExperimentConfig config;
  double h = 0.0;
  long d = 0;
  long m_train = 0;
  double lambda = 0.0;
  std::vector<double> errors;
  double mean = 0.0;
  double std = 0.0;
  Eigen::VectorXd grid;
  Eigen::VectorXd ground_truth;
  double wall_time_seconds = 0.0;
};

/// Sample mean and (n - 1)-denominator standard deviation; std = 0 for n = 1.
std::pair<double, double> mean_and_std(const std::vector<double>& values);

Eigen::VectorXd compute_ground_truth(const ExperimentConfig& config, const ResolvedExperiment& resolved,
                                     int threads = 1);

/// Ground truth once, then n_pred independent fits and empirical L-infinity
/// errors on the grid. Realizations run on up to `threads` workers; errors are
/// stored by index so the result does not depend on scheduling. Any failing
/// realization aborts the experiment. `ground_truth` skips recomputation.
ExperimentResult run_experiment(const ExperimentConfig& config, int threads = 1,
                                const std::optional<Eigen::VectorXd>& ground_truth = std::nullopt);

enum class SweepAxis { kFillDistance, kTrainingSamples };
SweepAxis parse_sweep_axis(const std::string& text);

/// Copies of `base` with h (or m_train) set to each value; ids get a suffix.
std::vector<ExperimentConfig> expand_sweep(const ExperimentConfig& base, SweepAxis axis,
                                           const std::vector<double>& values);

struct SweepCell {
  ExperimentConfig config;
  std::optional<ExperimentResult> result;
  std::string error;  // set when result is empty
};

/// Runs every config; a failing cell is recorded and the sweep continues.
/// Ground truths are shared between cells with identical truth settings.
std::vector<SweepCell> sweep(const std::vector<ExperimentConfig>& configs, int threads = 1,
                             std::ostream* log = nullptr);

/// Summary CSV. The trailing echo columns let a row be turned back into a config.
std::string results_csv_header();
std::string results_csv_row(const ExperimentResult& result);
std::string realizations_csv_header();
std::vector<std::string> realizations_csv_rows(const ExperimentResult& result);
std::string failures_csv_header();
std::string failure_csv_row(const SweepCell& cell);
/// Inverse of results_csv_row for the config part.
ExperimentConfig config_from_csv_row(const std::string& header, const std::string& row);

/// Splits one CSV line honoring double-quoted fields.
std::vector<std::string> split_csv_line(const std::string& line);
/// 17 significant digits, '.' decimal point.
std::string csv_number(double value);

nlohmann::json result_to_json(const ExperimentResult& result);

std::string to_string(ScheduleProfile profile);
std::string to_string(TruthMode mode);

}  // namespace skedmd
