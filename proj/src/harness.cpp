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

#include "skedmd/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include "skedmd/parallel.hpp"
#include "skedmd/random.hpp"
#include "skedmd/spec_string.hpp"

namespace skedmd {

using nlohmann::json;

Observable parse_observable(const std::string& id) {
  if (id == "exp") return [](double x) { return std::exp(x); };
  if (id == "id") return [](double x) { return x; };
  if (id.rfind("const:", 0) == 0) {
    std::string value = id.substr(6);
    if (value.rfind("c=", 0) == 0) value = value.substr(2);
    std::size_t used = 0;
    double c = 0.0;
    try {
      c = std::stod(value, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != value.size() || !std::isfinite(c)) {
      throw ConfigError("observable '" + id + "': constant must be a finite number");
    }
    return [c](double) { return c; };
  }
  throw ConfigError("unknown observable '" + id + "' (expected exp, id or const:<value>)");
}

Eigen::Index design_point_count(double h, Interval domain) {
  const double width = domain.width();
  if (!(h > 0)) throw ConfigError("fill distance h must be positive");
  if (h > width / 2.0) {
    throw ConfigError("fill distance h = " + format_number(h) + " exceeds the domain half-width " +
                      format_number(width / 2.0) + "; no design point set attains it");
  }
  const double ratio = width / (2.0 * h);
  return std::max<Eigen::Index>(1, static_cast<Eigen::Index>(std::ceil(ratio * (1.0 - 1e-9))));
}

Eigen::VectorXd midpoint_grid(Eigen::Index d, Interval domain) {
  if (d < 1) throw ConfigError("number of design points must be >= 1");
  Eigen::VectorXd x(d);
  for (Eigen::Index i = 0; i < d; ++i) {
    x(i) = domain.lower + static_cast<double>(2 * i + 1) * domain.width() / static_cast<double>(2 * d);
  }
  return x;
}

PointSet design_points_count(Eigen::Index d, Interval domain, const Kernel& kernel) {
  return PointSet(kernel, midpoint_grid(d, domain), domain.width() / static_cast<double>(2 * d));
}

PointSet design_points(double h, Interval domain, const Kernel& kernel) {
  return design_points_count(design_point_count(h, domain), domain, kernel);
}

Eigen::VectorXd evaluation_grid(Eigen::Index points, Interval domain, double inset) {
  if (points < 2) throw ConfigError("evaluation grid needs at least 2 points");
  if (!(inset >= 0) || 2 * inset >= domain.width()) throw ConfigError("evaluation grid inset out of range");
  return Eigen::VectorXd::LinSpaced(points, domain.lower + inset, domain.upper - inset);
}

Eigen::VectorXd ground_truth_mc(const ConditionalSampler& sampler, const Observable& f,
                                const Eigen::VectorXd& grid, Eigen::Index m, std::uint64_t seed,
                                int threads) {
  if (m < 1) throw ConfigError("m_truth must be >= 1");
  Eigen::VectorXd truth(grid.size());
  parallel_for(grid.size(), threads, [&](long l) {
    const Eigen::VectorXd y =
        sampler.sample(grid(l), m, derive_seed(seed, SeedStream::kGroundTruth, {static_cast<std::uint64_t>(l)}));
    double sum = 0.0;
    for (Eigen::Index i = 0; i < y.size(); ++i) sum += f(y(i));
    truth(l) = sum / static_cast<double>(m);
  });
  return truth;
}

Eigen::VectorXd ground_truth_exact(const ConditionalSampler& sampler, const Observable& f,
                                   const Eigen::VectorXd& grid, int nodes) {
  Eigen::VectorXd truth(grid.size());
  if (sampler.kind() == SamplerKind::kTruncatedNormal) {
    for (Eigen::Index l = 0; l < grid.size(); ++l) {
      truth(l) = exact_koopman_quadrature(f, grid(l), nodes, sampler.domain());
    }
  } else if (const auto* map = dynamic_cast<const DeterministicSampler*>(&sampler)) {
    for (Eigen::Index l = 0; l < grid.size(); ++l) truth(l) = f(map->map(grid(l)));
  } else {
    throw ConfigError("exact ground truth is available only for truncated-normal and deterministic samplers");
  }
  return truth;
}

const std::vector<ScheduleRow>& schedule_table() {
  static const std::vector<ScheduleRow> table = {
      {1e-1, 1e-3, 20},    {5e-2, 1.25e-4, 30},   {2e-2, 8e-6, 127},     {1e-2, 1e-6, 387},
      {5e-3, 1.25e-7, 1183}, {2e-3, 8e-9, 5166}, {1e-3, 1e-9, 15684}, {5e-4, 1.25e-10, 47428},
  };
  return table;
}

Schedule adaptive_schedule(double h, ScheduleProfile profile, ScheduleAnchor anchor) {
  if (!(h > 0)) throw ConfigError("adaptive schedule needs h > 0");
  if (profile == ScheduleProfile::kTable) {
    for (const ScheduleRow& row : schedule_table()) {
      if (std::abs(row.h - h) <= 1e-9 * row.h) return {row.m_train, row.lambda};
    }
    std::string rows;
    for (const ScheduleRow& row : schedule_table()) rows += (rows.empty() ? "" : ", ") + format_number(row.h);
    throw ConfigError("table schedule has no row for h = " + format_number(h) + " (rows: " + rows + ")");
  }
  if (!(anchor.h > 0 && anchor.m > 0 && anchor.lambda >= 0)) throw ConfigError("invalid schedule anchor");
  Schedule s;
  s.m_train = std::max(1L, std::lround(anchor.m * std::pow(anchor.h / h, 1.5)));
  s.lambda = anchor.lambda * std::pow(h / anchor.h, 3.0);
  return s;
}

std::string to_string(ScheduleProfile profile) {
  return profile == ScheduleProfile::kTable ? "table" : "power";
}

std::string to_string(TruthMode mode) { return mode == TruthMode::kExact ? "quadrature" : "mc"; }

json ExperimentConfig::to_json() const {
  json j;
  j["experiment_id"] = experiment_id;
  j["sampler"] = sampler;
  j["kernel"] = kernel;
  j["observable"] = observable;
  if (h) j["h"] = *h;
  if (d) j["d"] = *d;
  j["m_train"] = m_train ? json(*m_train) : json("adaptive");
  j["lambda"] = lambda ? json(*lambda) : json("adaptive");
  j["schedule"] = to_string(schedule);
  j["schedule_anchor"] = {{"h", anchor.h}, {"m", anchor.m}, {"lambda", anchor.lambda}};
  j["n_pred"] = n_pred;
  j["m_truth"] = m_truth;
  j["truth"] = to_string(truth);
  j["quadrature_nodes"] = quadrature_nodes;
  j["eval_points"] = eval_points;
  j["eval_inset"] = eval_inset;
  j["master_seed"] = master_seed;
  j["condition_cap"] = condition_cap;
  return j;
}

namespace {

/// Collects schema violations for one config object.
class Checker {
 public:
  explicit Checker(const json& j) : j_(j) {}

  bool present(const std::string& key) const { return j_.contains(key) && !j_.at(key).is_null(); }
  void fail(const std::string& key, const std::string& message) { errors_.push_back(key + ": " + message); }
  const std::vector<std::string>& errors() const { return errors_; }

  std::optional<std::string> text(const std::string& key, bool required) {
    if (!present(key)) {
      if (required) fail(key, "missing required field");
      return std::nullopt;
    }
    if (!j_.at(key).is_string()) {
      fail(key, "expected a string");
      return std::nullopt;
    }
    return j_.at(key).get<std::string>();
  }

  std::optional<double> number(const std::string& key, bool required) {
    if (!present(key)) {
      if (required) fail(key, "missing required field");
      return std::nullopt;
    }
    if (!j_.at(key).is_number()) {
      fail(key, "expected a number");
      return std::nullopt;
    }
    return j_.at(key).get<double>();
  }

  std::optional<long> integer(const std::string& key, bool required, long minimum) {
    std::optional<double> v = number(key, required);
    if (!v) return std::nullopt;
    if (std::floor(*v) != *v || std::abs(*v) > 9.0e15) {
      fail(key, "expected an integer");
      return std::nullopt;
    }
    if (*v < static_cast<double>(minimum)) {
      fail(key, "must be >= " + std::to_string(minimum));
      return std::nullopt;
    }
    return static_cast<long>(*v);
  }

 private:
  const json& j_;
  std::vector<std::string> errors_;
};

std::string sampler_spec_from_json(const json& value) {
  if (value.is_string()) return value.get<std::string>();
  if (!value.is_object() || !value.contains("kind") || !value.at("kind").is_string()) {
    throw ConfigError("expected a spec string or an object with a string 'kind'");
  }
  std::string out = value.at("kind").get<std::string>();
  char sep = ':';
  for (const auto& [key, v] : value.items()) {
    if (key == "kind") continue;
    out += sep;
    sep = ',';
    out += key + "=";
    if (v.is_number()) {
      out += format_number(v.get<double>());
    } else if (v.is_string()) {
      out += v.get<std::string>();
    } else {
      throw ConfigError("parameter '" + key + "' must be a number or string");
    }
  }
  return out;
}

const std::vector<std::string> kConfigKeys = {
    "experiment_id", "sampler",  "kernel",      "observable",       "h",           "d",
    "m_train",       "lambda",   "schedule",    "schedule_anchor",  "n_pred",      "m_truth",
    "truth",         "quadrature_nodes", "eval_points", "eval_inset", "master_seed", "condition_cap",
    "sweep"};

}  // namespace

ExperimentConfig parse_experiment_config(const json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  Checker c(j);
  ExperimentConfig cfg;

  for (const auto& [key, value] : j.items()) {
    if (std::find(kConfigKeys.begin(), kConfigKeys.end(), key) == kConfigKeys.end()) {
      c.fail(key, "unknown key");
    }
  }

  if (auto v = c.text("experiment_id", false)) cfg.experiment_id = *v;

  SamplerPtr sampler;
  if (!c.present("sampler")) {
    c.fail("sampler", "missing required field");
  } else {
    try {
      cfg.sampler = sampler_spec_from_json(j.at("sampler"));
      sampler = parse_sampler(cfg.sampler);
      cfg.sampler = sampler->spec();
    } catch (const ConfigError& e) {
      c.fail("sampler", e.what());
    }
  }

  if (auto v = c.text("kernel", true)) {
    try {
      cfg.kernel = Kernel::parse(*v).spec();
    } catch (const ConfigError& e) {
      c.fail("kernel", e.what());
    }
  }

  if (auto v = c.text("observable", false)) {
    try {
      parse_observable(*v);
      cfg.observable = *v;
    } catch (const ConfigError& e) {
      c.fail("observable", e.what());
    }
  }

  cfg.h = c.number("h", false);
  cfg.d = c.integer("d", false, 1);
  if (c.present("h") && c.present("d")) c.fail("h", "give either h or d, not both");
  if (!c.present("h") && !c.present("d")) c.fail("h", "missing required field (or give d)");
  if (cfg.h) {
    if (!(*cfg.h > 0)) {
      c.fail("h", "must be positive");
    } else if (sampler && *cfg.h >= sampler->domain().width() / 2.0) {
      c.fail("h", "must be below the domain half-width " + format_number(sampler->domain().width() / 2.0) +
                      " (design_points precondition)");
    }
  }

  bool adaptive = false;
  if (!c.present("m_train")) {
    c.fail("m_train", "missing required field (positive integer or \"adaptive\")");
  } else if (j.at("m_train").is_string()) {
    if (j.at("m_train").get<std::string>() != "adaptive") c.fail("m_train", "expected a positive integer or \"adaptive\"");
    adaptive = true;
  } else {
    cfg.m_train = c.integer("m_train", true, 1);
  }
  if (!c.present("lambda")) {
    c.fail("lambda", "missing required field (non-negative number or \"adaptive\")");
  } else if (j.at("lambda").is_string()) {
    if (j.at("lambda").get<std::string>() != "adaptive") c.fail("lambda", "expected a number or \"adaptive\"");
    adaptive = true;
  } else {
    cfg.lambda = c.number("lambda", true);
    if (cfg.lambda && !(*cfg.lambda >= 0)) c.fail("lambda", "must be >= 0");
  }

  if (auto v = c.text("schedule", false)) {
    if (*v == "power") {
      cfg.schedule = ScheduleProfile::kPowerLaw;
    } else if (*v == "table") {
      cfg.schedule = ScheduleProfile::kTable;
    } else {
      c.fail("schedule", "expected \"power\" or \"table\"");
    }
  }
  if (c.present("schedule_anchor")) {
    const json& a = j.at("schedule_anchor");
    if (!a.is_object() || !a.contains("h") || !a.contains("m") || !a.contains("lambda") ||
        !a.at("h").is_number() || !a.at("m").is_number() || !a.at("lambda").is_number()) {
      c.fail("schedule_anchor", "expected {\"h\": number, \"m\": number, \"lambda\": number}");
    } else {
      cfg.anchor = {a.at("h").get<double>(), a.at("m").get<double>(), a.at("lambda").get<double>()};
      if (!(cfg.anchor.h > 0 && cfg.anchor.m > 0 && cfg.anchor.lambda >= 0)) {
        c.fail("schedule_anchor", "h and m must be positive, lambda >= 0");
      }
    }
  }
  if (adaptive) {
    if (!cfg.h) {
      c.fail("h", "adaptive m_train or lambda requires h");
    } else if (*cfg.h > 0) {
      try {
        adaptive_schedule(*cfg.h, cfg.schedule, cfg.anchor);
      } catch (const ConfigError& e) {
        c.fail("schedule", e.what());
      }
    }
  }

  if (auto v = c.integer("n_pred", true, 1)) cfg.n_pred = *v;
  if (auto v = c.integer("m_truth", false, 1)) cfg.m_truth = *v;
  if (auto v = c.text("truth", false)) {
    if (*v == "mc") {
      cfg.truth = TruthMode::kMonteCarlo;
    } else if (*v == "quadrature" || *v == "exact") {
      cfg.truth = TruthMode::kExact;
      if (sampler && sampler->kind() != SamplerKind::kTruncatedNormal &&
          sampler->kind() != SamplerKind::kDeterministicMap) {
        c.fail("truth", "quadrature truth needs a truncated-normal or deterministic sampler");
      }
    } else {
      c.fail("truth", "expected \"mc\" or \"quadrature\"");
    }
  }
  if (auto v = c.integer("quadrature_nodes", false, 3)) cfg.quadrature_nodes = static_cast<int>(*v);
  if (auto v = c.integer("eval_points", false, 2)) cfg.eval_points = *v;
  if (auto v = c.number("eval_inset", false)) {
    cfg.eval_inset = *v;
    if (!(*v >= 0) || (sampler && 2 * *v >= sampler->domain().width())) {
      c.fail("eval_inset", "must be >= 0 and below the domain half-width");
    }
  }
  if (c.present("master_seed")) {
    if (j.at("master_seed").is_number_unsigned()) {
      cfg.master_seed = j.at("master_seed").get<std::uint64_t>();
    } else {
      c.fail("master_seed", "expected a non-negative integer");
    }
  }
  if (auto v = c.number("condition_cap", false)) {
    cfg.condition_cap = *v;
    if (!(*v > 1)) c.fail("condition_cap", "must be > 1");
  }

  if (!c.errors().empty()) {
    std::string message = "invalid config (" + std::to_string(c.errors().size()) + " error" +
                          (c.errors().size() == 1 ? "" : "s") + "):";
    for (const std::string& e : c.errors()) message += "\n  - " + e;
    throw ConfigError(message);
  }
  return cfg;
}

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

json parse_scalar(const std::string& value) {
  json parsed = json::parse(value, nullptr, false);
  if (!parsed.is_discarded()) return parsed;
  return value;
}

}  // namespace

void apply_override(json& config, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ConfigError("override '" + assignment + "' is not of the form key=value");
  }
  config[trim(assignment.substr(0, eq))] = parse_scalar(trim(assignment.substr(eq + 1)));
}

json read_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();
  json j = json::parse(text, nullptr, false);
  if (!j.is_discarded()) return j;

  json out = json::object();
  std::istringstream lines(text);
  std::string line;
  int number = 0;
  while (std::getline(lines, line)) {
    ++number;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    if (line.find('=') == std::string::npos) {
      throw ConfigError(path.string() + ":" + std::to_string(number) +
                        ": neither valid JSON nor a key=value line");
    }
    apply_override(out, line);
  }
  return out;
}

ExperimentConfig validate_config(const std::filesystem::path& path) {
  return parse_experiment_config(read_config_file(path));
}

ResolvedExperiment resolve(const ExperimentConfig& config) {
  SamplerPtr sampler = parse_sampler(config.sampler);
  Kernel kernel = Kernel::parse(config.kernel);
  const Interval domain = sampler->domain();
  PointSet points = config.h ? design_points(*config.h, domain, kernel)
                             : design_points_count(config.d.value_or(0), domain, kernel);
  const double h = config.h ? *config.h : domain.width() / static_cast<double>(2 * *config.d);
  Schedule schedule;
  if (!config.m_train || !config.lambda) {
    if (!config.h) throw ConfigError("adaptive m_train or lambda requires h");
    schedule = adaptive_schedule(*config.h, config.schedule, config.anchor);
  }
  return ResolvedExperiment{
      sampler,
      kernel,
      parse_observable(config.observable),
      std::move(points),
      h,
      config.m_train.value_or(schedule.m_train),
      config.lambda.value_or(schedule.lambda),
      evaluation_grid(config.eval_points, domain, config.eval_inset),
  };
}

std::uint64_t realization_seed(std::uint64_t master_seed, long realization) {
  return derive_seed(master_seed, SeedStream::kRealization, {static_cast<std::uint64_t>(realization)});
}

std::pair<double, double> mean_and_std(const std::vector<double>& values) {
  if (values.empty()) return {0.0, 0.0};
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  if (values.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / static_cast<double>(values.size() - 1))};
}

Eigen::VectorXd compute_ground_truth(const ExperimentConfig& config, const ResolvedExperiment& resolved,
                                     int threads) {
  if (config.truth == TruthMode::kExact) {
    return ground_truth_exact(*resolved.sampler, resolved.observable, resolved.grid, config.quadrature_nodes);
  }
  return ground_truth_mc(*resolved.sampler, resolved.observable, resolved.grid, config.m_truth,
                         config.master_seed, threads);
}

ExperimentResult run_experiment(const ExperimentConfig& config, int threads,
                                const std::optional<Eigen::VectorXd>& ground_truth) {
  const auto start = std::chrono::steady_clock::now();
  const ResolvedExperiment r = resolve(config);

  ExperimentResult result;
  result.config = config;
  result.h = r.h;
  result.d = static_cast<long>(r.points.size());
  result.m_train = r.m_train;
  result.lambda = r.lambda;
  result.grid = r.grid;
  result.ground_truth = ground_truth ? *ground_truth : compute_ground_truth(config, r, threads);
  if (result.ground_truth.size() != r.grid.size()) throw ConfigError("ground truth does not match the grid");

  Eigen::VectorXd f_x(r.points.size());
  const Eigen::VectorXd coords = r.points.coordinates();
  for (Eigen::Index i = 0; i < f_x.size(); ++i) f_x(i) = r.observable(coords(i));
  const Eigen::MatrixXd cross = cross_kernel_matrix(r.kernel, coords, r.grid);

  result.errors.assign(static_cast<std::size_t>(config.n_pred), 0.0);
  parallel_for(config.n_pred, threads, [&](long n) {
    PropagatedMatrix propagated =
        build_propagated_matrix(r.points, *r.sampler, r.m_train, realization_seed(config.master_seed, n));
    const KoopmanApproximant approx = fit(r.points, f_x, std::move(propagated), r.lambda, config.condition_cap);
    const Eigen::VectorXd prediction = cross.transpose() * approx.weights();
    result.errors[static_cast<std::size_t>(n)] = (result.ground_truth - prediction).cwiseAbs().maxCoeff();
  });
  for (double e : result.errors) {
    if (!std::isfinite(e)) throw NumericalError("non-finite L-infinity error in experiment '" + config.experiment_id + "'");
  }
  std::tie(result.mean, result.std) = mean_and_std(result.errors);
  result.wall_time_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

SweepAxis parse_sweep_axis(const std::string& text) {
  if (text == "fill_distance" || text == "h") return SweepAxis::kFillDistance;
  if (text == "m_train" || text == "m") return SweepAxis::kTrainingSamples;
  throw ConfigError("sweep axis must be 'fill_distance' or 'm_train', got '" + text + "'");
}

std::vector<ExperimentConfig> expand_sweep(const ExperimentConfig& base, SweepAxis axis,
                                           const std::vector<double>& values) {
  std::vector<ExperimentConfig> out;
  out.reserve(values.size());
  for (double v : values) {
    ExperimentConfig c = base;
    if (axis == SweepAxis::kFillDistance) {
      c.h = v;
      c.d.reset();
      c.experiment_id = base.experiment_id + "/h=" + format_number(v);
    } else {
      if (!(v >= 1) || std::floor(v) != v) throw ConfigError("m_train sweep values must be positive integers");
      c.m_train = static_cast<long>(v);
      c.experiment_id = base.experiment_id + "/m=" + format_number(v);
    }
    out.push_back(std::move(c));
  }
  return out;
}

namespace {

std::string truth_cache_key(const ExperimentConfig& c) {
  json key = {{"sampler", c.sampler},       {"observable", c.observable}, {"truth", to_string(c.truth)},
              {"eval_points", c.eval_points}, {"eval_inset", c.eval_inset}};
  if (c.truth == TruthMode::kExact) {
    key["nodes"] = c.quadrature_nodes;
  } else {
    key["m_truth"] = c.m_truth;
    key["seed"] = c.master_seed;
  }
  return key.dump();
}

}  // namespace

std::vector<SweepCell> sweep(const std::vector<ExperimentConfig>& configs, int threads, std::ostream* log) {
  std::vector<SweepCell> cells;
  std::map<std::string, Eigen::VectorXd> truths;
  for (const ExperimentConfig& config : configs) {
    SweepCell cell{config, std::nullopt, ""};
    try {
      const std::string key = truth_cache_key(config);
      auto it = truths.find(key);
      if (it == truths.end()) {
        it = truths.emplace(key, compute_ground_truth(config, resolve(config), threads)).first;
      }
      cell.result = run_experiment(config, threads, it->second);
      if (log) {
        *log << config.experiment_id << ": d=" << cell.result->d << " m=" << cell.result->m_train
             << " lambda=" << format_number(cell.result->lambda) << " mean=" << format_number(cell.result->mean)
             << " std=" << format_number(cell.result->std) << '\n';
      }
    } catch (const std::exception& e) {
      cell.error = e.what();
      if (log) *log << config.experiment_id << ": FAILED: " << e.what() << '\n';
    }
    cells.push_back(std::move(cell));
  }
  return cells;
}

std::string csv_number(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, "%.17g", value);
  return buffer;
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

}  // namespace

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        fields.back() += '"';
        ++i;
      } else if (ch == '"') {
        quoted = false;
      } else {
        fields.back() += ch;
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      fields.emplace_back();
    } else if (ch != '\r') {
      fields.back() += ch;
    }
  }
  return fields;
}

std::string results_csv_header() {
  return "experiment_id,kernel,sampler,h,d,m_train,lambda,n_pred,mean_linf,std_linf,seed,"
         "observable,m_truth,truth,quadrature_nodes,eval_points,eval_inset,condition_cap";
}

std::string results_csv_row(const ExperimentResult& r) {
  const ExperimentConfig& c = r.config;
  std::ostringstream os;
  os << csv_field(c.experiment_id) << ',' << csv_field(c.kernel) << ',' << csv_field(c.sampler) << ','
     << csv_number(r.h) << ',' << r.d << ',' << r.m_train << ',' << csv_number(r.lambda) << ',' << c.n_pred << ','
     << csv_number(r.mean) << ',' << csv_number(r.std) << ',' << c.master_seed << ',' << csv_field(c.observable)
     << ',' << c.m_truth << ',' << to_string(c.truth) << ',' << c.quadrature_nodes << ',' << c.eval_points << ','
     << csv_number(c.eval_inset) << ',' << csv_number(c.condition_cap);
  return os.str();
}

std::string realizations_csv_header() { return "experiment_id,realization,seed,linf_error"; }

std::vector<std::string> realizations_csv_rows(const ExperimentResult& r) {
  std::vector<std::string> rows;
  for (std::size_t n = 0; n < r.errors.size(); ++n) {
    rows.push_back(csv_field(r.config.experiment_id) + ',' + std::to_string(n) + ',' +
                   std::to_string(realization_seed(r.config.master_seed, static_cast<long>(n))) + ',' +
                   csv_number(r.errors[n]));
  }
  return rows;
}

std::string failures_csv_header() { return "experiment_id,error"; }

std::string failure_csv_row(const SweepCell& cell) {
  std::string message = cell.error;
  std::replace(message.begin(), message.end(), '\n', ' ');
  return csv_field(cell.config.experiment_id) + ',' + csv_field(message);
}

ExperimentConfig config_from_csv_row(const std::string& header, const std::string& row) {
  const std::vector<std::string> names = split_csv_line(header);
  const std::vector<std::string> values = split_csv_line(row);
  if (names.size() != values.size()) throw ConfigError("CSV row has " + std::to_string(values.size()) +
                                                       " fields, header has " + std::to_string(names.size()));
  std::map<std::string, std::string> f;
  for (std::size_t i = 0; i < names.size(); ++i) f[names[i]] = values[i];
  auto get = [&](const std::string& key) -> const std::string& {
    auto it = f.find(key);
    if (it == f.end()) throw ConfigError("CSV lacks column '" + key + "'");
    return it->second;
  };
  json j = {
      {"experiment_id", get("experiment_id")},
      {"kernel", get("kernel")},
      {"sampler", get("sampler")},
      {"observable", get("observable")},
      {"h", std::stod(get("h"))},
      {"m_train", std::stol(get("m_train"))},
      {"lambda", std::stod(get("lambda"))},
      {"n_pred", std::stol(get("n_pred"))},
      {"master_seed", std::stoull(get("seed"))},
      {"m_truth", std::stol(get("m_truth"))},
      {"truth", get("truth")},
      {"quadrature_nodes", std::stol(get("quadrature_nodes"))},
      {"eval_points", std::stol(get("eval_points"))},
      {"eval_inset", std::stod(get("eval_inset"))},
      {"condition_cap", std::stod(get("condition_cap"))},
  };
  return parse_experiment_config(j);
}

json result_to_json(const ExperimentResult& r) {
  json j;
  j["config"] = r.config.to_json();
  j["h"] = r.h;
  j["d"] = r.d;
  j["m_train"] = r.m_train;
  j["lambda"] = r.lambda;
  j["n_pred"] = r.config.n_pred;
  j["errors"] = r.errors;
  j["mean_linf"] = r.mean;
  j["std_linf"] = r.std;
  j["grid"] = std::vector<double>(r.grid.data(), r.grid.data() + r.grid.size());
  j["ground_truth"] = std::vector<double>(r.ground_truth.data(), r.ground_truth.data() + r.ground_truth.size());
  return j;
}

}  // namespace skedmd
