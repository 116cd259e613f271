//
// Copyright 2026 The user_dp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

// Experiment harness: task configuration, seeded trial execution, per-cell
// statistics, calibration of the user count and CSV/JSON emission.
//
// Seed scheme: the cell at output position j runs with
// cell_seed = DeriveSeed(seed, j), and trial t of a cell runs with
// DeriveSeed(cell_seed, t). A single-cell run (RunCell) with the cell seed
// printed in the CSV reproduces that row exactly. Calibration draws from
// DeriveSeed(DeriveSeed(seed, kCalibrationStream), step), disjoint from the
// evaluation seeds.

#ifndef USER_DP_EXPERIMENT_H_
#define USER_DP_EXPERIMENT_H_

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/string_view.h"
#include "user_dp/audit.h"
#include "user_dp/combinatorics.h"
#include "user_dp/core.h"
#include "user_dp/em.h"
#include "user_dp/io.h"
#include "user_dp/learners.h"
#include "user_dp/random.h"
#include "user_dp/status_macros.h"

namespace user_dp {

inline constexpr std::uint64_t kCalibrationStream = 0xca1b'0000'0000'0001;

enum class Method { kUser, kDiscard, kGroup };

inline const char* MethodName(Method method) {
  switch (method) {
    case Method::kUser:
      return "user";
    case Method::kDiscard:
      return "discard";
    case Method::kGroup:
      return "group";
  }
  return "user";
}

// Everything about a task except the (n, m) grid.
struct TaskSpec {
  std::string task;  // learn-discrete | hypothesis-select | pac-learn
  double epsilon = 1.0;
  double alpha = 0.25;
  double c_tau = 1.0;
  double kappa = 1.0;
  int trials = 1;
  std::uint64_t seed = 0;
  // discard keeps one item per user; group runs on n*m single-item users at
  // epsilon / m.
  Method method = Method::kUser;
  std::int64_t budget = kDefaultBudget;

  // learn-discrete: universe size; source drawn uniformly from the simplex
  // per trial when absent.
  int k = 0;
  std::optional<FiniteDistribution> source;

  // hypothesis-select.
  std::vector<FiniteDistribution> candidates;

  // pac-learn: thresholds over {0..domain_size-1}; target threshold index;
  // marginal over points (uniform when absent); representation is the whole
  // class, or `subset_size` random thresholds when positive.
  int domain_size = 0;
  int target = 0;
  std::optional<FiniteDistribution> marginal;
  int subset_size = 0;
};

// A rung n is accepted once the 95% Clopper-Pearson lower bound on its
// success rate reaches target_success, so a lucky run at too small an n is
// not enough.
struct CalibrationSpec {
  double target_success = 0.95;
  int n_start = 0;  // 0: task default
  int n_max = 1 << 16;
  int trials = 0;   // 0: same as the task
};

// Fewest trials whose all-success lower bound (0.025^(1/N)) reaches target.
inline int MinCalibrationTrials(double target_success) {
  if (target_success <= 0.0) return 1;
  if (target_success >= 1.0) return std::numeric_limits<int>::max();
  return static_cast<int>(
      std::ceil(std::log(0.025) / std::log(target_success) - 1e-9));
}

struct ExperimentConfig {
  TaskSpec spec;
  std::vector<int> n_grid;
  std::vector<int> m_grid;
  std::optional<CalibrationSpec> calibration;
};

struct TrialOutcome {
  double error = 0.0;
  bool success = false;
};

struct CellResult {
  int n = 0;
  int m = 0;
  std::uint64_t seed = 0;
  std::vector<TrialOutcome> trials;
  double success_rate = 0.0;
  double median_error = 0.0;
};

struct CalibrationStep {
  int m = 0;
  int n = 0;
  double success_rate = 0.0;
  double success_lower = 0.0;  // 95% Clopper-Pearson lower bound
};

struct ExperimentResult {
  std::vector<CellResult> cells;
  std::vector<CalibrationStep> calibration;
};

namespace internal {

inline double Median(std::vector<double> values) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  if (values.size() % 2 == 1) return values[mid];
  return 0.5 * (values[mid - 1] + values[mid]);
}

// Uniform point of the probability simplex (normalized exponentials).
inline FiniteDistribution RandomSimplexPoint(int k, Rng& rng) {
  std::vector<double> w(k);
  for (double& x : w) x = -std::log1p(-rng.Uniform()) + 1e-300;
  return *FiniteDistribution::FromWeights(std::move(w));
}

inline absl::StatusOr<Method> ParseMethod(const std::string& name,
                                          const std::string& path) {
  if (name == "user") return Method::kUser;
  if (name == "discard") return Method::kDiscard;
  if (name == "group") return Method::kGroup;
  return JsonError(path, "expected one of user, discard, group");
}

}  // namespace internal

// Shortest round-trip decimal form.
inline std::string FormatDouble(double x) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  if (ec != std::errc()) return "nan";
  return std::string(buf, end);
}

// Parses the task fields of `obj`. `expected_task` (if nonempty) must match
// the "task" field when present.
inline absl::StatusOr<TaskSpec> ParseTaskSpec(const JsonObject& obj,
                                              absl::string_view expected_task) {
  TaskSpec spec;
  if (obj.Has("task") || expected_task.empty()) {
    USER_DP_ASSIGN_OR_RETURN(spec.task, obj.String("task"));
  } else {
    spec.task = std::string(expected_task);
  }
  if (!expected_task.empty() && spec.task != expected_task) {
    return internal::JsonError(
        obj.Path("task"), absl::StrCat("expected \"", expected_task, "\""));
  }
  if (spec.task != "learn-discrete" && spec.task != "hypothesis-select" &&
      spec.task != "pac-learn") {
    return internal::JsonError(
        obj.Path("task"),
        "expected one of learn-discrete, hypothesis-select, pac-learn");
  }
  USER_DP_ASSIGN_OR_RETURN(spec.epsilon, obj.Double("epsilon"));
  if (!(spec.epsilon > 0.0) || !std::isfinite(spec.epsilon)) {
    return internal::JsonError(obj.Path("epsilon"), "must be positive");
  }
  USER_DP_ASSIGN_OR_RETURN(spec.alpha, obj.Double("alpha"));
  if (!(spec.alpha > 0.0 && spec.alpha < 1.0)) {
    return internal::JsonError(obj.Path("alpha"), "must lie in (0, 1)");
  }
  USER_DP_ASSIGN_OR_RETURN(spec.trials, obj.IntIn("trials", 1, 1 << 24));
  USER_DP_ASSIGN_OR_RETURN(spec.seed, obj.Seed("seed"));
  USER_DP_ASSIGN_OR_RETURN(std::string method, obj.String("method", "user"));
  USER_DP_ASSIGN_OR_RETURN(spec.method,
                           internal::ParseMethod(method, obj.Path("method")));
  if (obj.Has("budget")) {
    USER_DP_ASSIGN_OR_RETURN(spec.budget, obj.Int("budget"));
    if (spec.budget < 1) {
      return internal::JsonError(obj.Path("budget"), "must be positive");
    }
  }
  if (obj.Has("constants")) {
    USER_DP_ASSIGN_OR_RETURN(JsonObject constants, obj.Object("constants"));
    USER_DP_ASSIGN_OR_RETURN(spec.c_tau, constants.Double("c_tau", 1.0));
    USER_DP_ASSIGN_OR_RETURN(spec.kappa, constants.Double("kappa", 1.0));
    if (!(spec.c_tau > 0.0)) {
      return internal::JsonError(constants.Path("c_tau"), "must be positive");
    }
    if (!(spec.kappa > 0.0)) {
      return internal::JsonError(constants.Path("kappa"), "must be positive");
    }
  }

  if (spec.task == "learn-discrete") {
    USER_DP_ASSIGN_OR_RETURN(spec.k, obj.IntIn("k", 2, ScheffeScorer::kMaxUniverse));
    if (obj.Has("source")) {
      USER_DP_ASSIGN_OR_RETURN(const Json* src, obj.Get("source"));
      USER_DP_ASSIGN_OR_RETURN(FiniteDistribution source,
                               DistributionFromJson(*src, obj.Path("source")));
      if (static_cast<int>(source.size()) != spec.k) {
        return internal::JsonError(obj.Path("source"),
                                   "length must equal k");
      }
      spec.source = std::move(source);
    }
  } else if (spec.task == "hypothesis-select") {
    USER_DP_ASSIGN_OR_RETURN(const Json* cands, obj.Get("candidates"));
    USER_DP_ASSIGN_OR_RETURN(spec.candidates,
                             DistributionsFromJson(*cands, obj.Path("candidates")));
    if (spec.candidates.size() < 2) {
      return internal::JsonError(obj.Path("candidates"),
                                 "need at least two candidates");
    }
    for (std::size_t i = 0; i < spec.candidates.size(); ++i) {
      if (spec.candidates[i].size() != spec.candidates[0].size()) {
        return internal::JsonError(
            internal::JsonChild(obj.Path("candidates"), i),
            "candidates must share one domain");
      }
    }
    if (spec.candidates[0].size() >
        static_cast<std::size_t>(ScheffeScorer::kMaxUniverse)) {
      return internal::JsonError(obj.Path("candidates"),
                                 "domain larger than 64 symbols");
    }
    USER_DP_ASSIGN_OR_RETURN(const Json* src, obj.Get("source"));
    USER_DP_ASSIGN_OR_RETURN(FiniteDistribution source,
                             DistributionFromJson(*src, obj.Path("source")));
    if (source.size() != spec.candidates[0].size()) {
      return internal::JsonError(obj.Path("source"),
                                 "length must match the candidates");
    }
    spec.source = std::move(source);
  } else {
    USER_DP_ASSIGN_OR_RETURN(spec.domain_size,
                             obj.IntIn("domain_size", 1, 1 << 20));
    USER_DP_ASSIGN_OR_RETURN(spec.target,
                             obj.IntIn("target", 0, spec.domain_size));
    USER_DP_ASSIGN_OR_RETURN(spec.subset_size,
                             obj.Int("subset_size", 0));
    if (spec.subset_size < 0 || spec.subset_size > spec.domain_size + 1) {
      return internal::JsonError(obj.Path("subset_size"),
                                 "expected 0 or a size in [1, domain_size+1]");
    }
    if (obj.Has("marginal")) {
      USER_DP_ASSIGN_OR_RETURN(const Json* mg, obj.Get("marginal"));
      USER_DP_ASSIGN_OR_RETURN(FiniteDistribution marginal,
                               DistributionFromJson(*mg, obj.Path("marginal")));
      if (static_cast<int>(marginal.size()) != spec.domain_size) {
        return internal::JsonError(obj.Path("marginal"),
                                   "length must equal domain_size");
      }
      spec.marginal = std::move(marginal);
    }
  }
  return spec;
}

// Grid experiment config:
// {"task", "epsilon", "alpha", "trials", "seed", "method"?, "constants"?,
//  "budget"?, task fields..., "grid": {"n": [..], "m": [..]},
//  "calibration"?: {"target_success", "n_start", "n_max", "trials"}}
// With "calibration" the n grid is replaced by a calibrated n per m.
inline absl::StatusOr<ExperimentConfig> ParseExperimentConfig(
    const Json& json) {
  USER_DP_ASSIGN_OR_RETURN(JsonObject obj, JsonObject::Of(json, ""));
  ExperimentConfig config;
  USER_DP_ASSIGN_OR_RETURN(config.spec, ParseTaskSpec(obj, ""));
  USER_DP_ASSIGN_OR_RETURN(JsonObject grid, obj.Object("grid"));
  USER_DP_ASSIGN_OR_RETURN(config.m_grid, grid.Ints("m"));
  if (obj.Has("calibration")) {
    USER_DP_ASSIGN_OR_RETURN(JsonObject cal, obj.Object("calibration"));
    if (grid.Has("n")) {
      return internal::JsonError(grid.Path("n"),
                                 "must be absent when calibrating");
    }
    CalibrationSpec c;
    USER_DP_ASSIGN_OR_RETURN(c.target_success,
                             cal.Double("target_success", c.target_success));
    if (!(c.target_success > 0.0 && c.target_success < 1.0)) {
      return internal::JsonError(cal.Path("target_success"),
                                 "must lie in (0, 1)");
    }
    USER_DP_ASSIGN_OR_RETURN(std::int64_t n_start, cal.Int("n_start", 0));
    USER_DP_ASSIGN_OR_RETURN(std::int64_t n_max, cal.Int("n_max", c.n_max));
    USER_DP_ASSIGN_OR_RETURN(std::int64_t trials, cal.Int("trials", 0));
    if (n_start < 0 || n_max < 1 || n_max > (1 << 24) || trials < 0 ||
        trials > (1 << 24)) {
      return internal::JsonError(cal.path(), "calibration bounds out of range");
    }
    c.n_start = static_cast<int>(n_start);
    c.n_max = static_cast<int>(n_max);
    c.trials = static_cast<int>(trials);
    const int used = c.trials > 0 ? c.trials : config.spec.trials;
    if (used < MinCalibrationTrials(c.target_success)) {
      return internal::JsonError(
          cal.Path("trials"),
          absl::StrCat(used, " trials cannot certify target_success ",
                       c.target_success, "; need at least ",
                       MinCalibrationTrials(c.target_success)));
    }
    config.calibration = c;
  } else {
    USER_DP_ASSIGN_OR_RETURN(config.n_grid, grid.Ints("n"));
  }
  for (std::size_t i = 0; i < config.n_grid.size(); ++i) {
    if (config.n_grid[i] < 1) {
      return internal::JsonError(internal::JsonChild(grid.Path("n"), i),
                                 "must be >= 1");
    }
  }
  for (std::size_t i = 0; i < config.m_grid.size(); ++i) {
    if (config.m_grid[i] < 1) {
      return internal::JsonError(internal::JsonChild(grid.Path("m"), i),
                                 "must be >= 1");
    }
  }
  std::sort(config.n_grid.begin(), config.n_grid.end());
  config.n_grid.erase(std::unique(config.n_grid.begin(), config.n_grid.end()),
                      config.n_grid.end());
  std::sort(config.m_grid.begin(), config.m_grid.end());
  config.m_grid.erase(std::unique(config.m_grid.begin(), config.m_grid.end()),
                      config.m_grid.end());
  return config;
}

// Runs trials of one task. Expensive state (grid cover, Scheffe sets) is
// built once.
class TaskRunner {
 public:
  static absl::StatusOr<TaskRunner> Create(TaskSpec spec) {
    TaskRunner runner;
    if (spec.task == "learn-discrete") {
      absl::StatusOr<DiscreteDistributionLearner> learner =
          DiscreteDistributionLearner::Create(spec.k, spec.alpha, spec.budget);
      if (!learner.ok()) return learner.status();
      runner.learner_ = std::make_shared<const DiscreteDistributionLearner>(
          *std::move(learner));
    } else if (spec.task == "hypothesis-select") {
      absl::StatusOr<ScheffeScorer> scorer =
          ScheffeScorer::Create(spec.candidates);
      if (!scorer.ok()) return scorer.status();
      runner.scorer_ =
          std::make_shared<const ScheffeScorer>(*std::move(scorer));
    } else if (spec.task == "pac-learn") {
      if (spec.domain_size < 1 || spec.target < 0 ||
          spec.target > spec.domain_size) {
        return absl::InvalidArgumentError("invalid threshold task");
      }
      std::vector<Concept> concepts = ThresholdConcepts(spec.domain_size);
      runner.target_concept_ = concepts[spec.target];
      runner.representation_ =
          spec.subset_size > 0
              ? RandomSubsetRepresentation(std::move(concepts),
                                           spec.subset_size)
              : PointMassRepresentation(std::move(concepts));
      if (!spec.marginal.has_value()) {
        spec.marginal = FiniteDistribution::Uniform(spec.domain_size);
      }
      // Labeled examples 2x + y with y = target(x).
      std::vector<double> labeled(2 * spec.domain_size, 0.0);
      for (int x = 0; x < spec.domain_size; ++x) {
        labeled[2 * x + runner.target_concept_[x]] = (*spec.marginal)[x];
      }
      runner.example_law_ = *FiniteDistribution::Create(std::move(labeled));
    } else {
      return absl::InvalidArgumentError(
          absl::StrCat("unknown task \"", spec.task, "\""));
    }
    runner.spec_ = std::move(spec);
    return runner;
  }

  const TaskSpec& spec() const { return spec_; }

  // Default starting point for calibration.
  absl::StatusOr<int> DefaultUserCount(int m) const {
    if (spec_.task == "pac-learn") {
      return PacUserCount(representation_.size_bound, spec_.epsilon,
                          spec_.alpha, m, spec_.kappa);
    }
    return 8;
  }

  absl::StatusOr<TrialOutcome> RunTrial(int n, int m,
                                        std::uint64_t trial_seed) const {
    if (n < 1 || m < 1) return absl::InvalidArgumentError("need n, m >= 1");
    Rng rng(trial_seed);
    if (spec_.task == "pac-learn") return RunPacTrial(n, m, rng);
    FiniteDistribution source =
        spec_.source.has_value() ? *spec_.source
                                 : internal::RandomSimplexPoint(spec_.k, rng);
    Dataset ds = SampleDataset(source, n, m, rng);
    double eps = spec_.epsilon;
    USER_DP_ASSIGN_OR_RETURN(ds, ApplyMethod(ds, eps));
    const ScheffeScorer& scorer = learner_ ? learner_->scorer() : *scorer_;
    USER_DP_ASSIGN_OR_RETURN(
        int selected,
        HypothesisSelect(scorer, ds, eps, spec_.alpha, spec_.c_tau, rng));
    USER_DP_ASSIGN_OR_RETURN(
        double error, TvDistance(scorer.candidates()[selected], source));
    return TrialOutcome{error, error <= spec_.alpha};
  }

  absl::StatusOr<CellResult> RunCell(int n, int m,
                                     std::uint64_t cell_seed) const {
    return RunCell(n, m, cell_seed, spec_.trials);
  }

  absl::StatusOr<CellResult> RunCell(int n, int m, std::uint64_t cell_seed,
                                     int trials) const {
    CellResult cell;
    cell.n = n;
    cell.m = m;
    cell.seed = cell_seed;
    std::vector<double> errors;
    int successes = 0;
    for (int t = 0; t < trials; ++t) {
      USER_DP_ASSIGN_OR_RETURN(TrialOutcome outcome,
                               RunTrial(n, m, DeriveSeed(cell_seed, t)));
      cell.trials.push_back(outcome);
      errors.push_back(outcome.error);
      if (outcome.success) ++successes;
    }
    cell.success_rate = trials > 0 ? static_cast<double>(successes) / trials : 0;
    cell.median_error = internal::Median(std::move(errors));
    return cell;
  }

 private:
  TaskRunner() = default;

  absl::StatusOr<Dataset> ApplyMethod(const Dataset& ds, double& eps) const {
    switch (spec_.method) {
      case Method::kUser:
        return ds;
      case Method::kDiscard:
        return BaselineDiscard(ds);
      case Method::kGroup:
        eps /= ds.m();
        return BaselineGroup(ds, 1);
    }
    return ds;
  }

  absl::StatusOr<TrialOutcome> RunPacTrial(int n, int m, Rng& rng) const {
    Dataset ds = SampleDataset(example_law_, n, m, rng);
    double eps = spec_.epsilon;
    USER_DP_ASSIGN_OR_RETURN(ds, ApplyMethod(ds, eps));
    USER_DP_ASSIGN_OR_RETURN(
        Concept h, PacLearn(representation_, ds, eps, rng, spec_.alpha));
    double error = 0.0;
    for (int x = 0; x < spec_.domain_size; ++x) {
      if (h[x] != target_concept_[x]) error += (*spec_.marginal)[x];
    }
    return TrialOutcome{error, error <= spec_.alpha};
  }

  TaskSpec spec_;
  std::shared_ptr<const DiscreteDistributionLearner> learner_;
  std::shared_ptr<const ScheffeScorer> scorer_;
  ProbabilisticRepresentation representation_;
  Concept target_concept_;
  FiniteDistribution example_law_ = FiniteDistribution::Uniform(1);
};

// Smallest n on a doubling ladder from the starting point whose success rate
// on calibration seeds reaches the target; ResourceExhausted past n_max.
inline absl::StatusOr<CalibrationStep> CalibrateUserCount(
    const TaskRunner& runner, const CalibrationSpec& cal, int m,
    std::uint64_t stream_seed) {
  int n = cal.n_start;
  if (n <= 0) {
    USER_DP_ASSIGN_OR_RETURN(n, runner.DefaultUserCount(m));
  }
  const int trials = cal.trials > 0 ? cal.trials : runner.spec().trials;
  if (trials < MinCalibrationTrials(cal.target_success)) {
    return absl::InvalidArgumentError(absl::StrCat(
        trials, " calibration trials cannot certify success rate ",
        cal.target_success));
  }
  for (int step = 0;; ++step) {
    if (n > cal.n_max) {
      return absl::ResourceExhaustedError(absl::StrCat(
          "calibration did not reach success rate ", cal.target_success,
          " at m=", m, " below n_max=", cal.n_max));
    }
    USER_DP_ASSIGN_OR_RETURN(
        CellResult cell,
        runner.RunCell(n, m, DeriveSeed(stream_seed, step), trials));
    const auto successes = static_cast<std::int64_t>(
        std::lround(cell.success_rate * trials));
    const double lower = ClopperPearson(successes, trials).lower;
    if (lower >= cal.target_success) {
      return CalibrationStep{m, n, cell.success_rate, lower};
    }
    n *= 2;
  }
}

inline absl::StatusOr<ExperimentResult> RunExperiment(
    const ExperimentConfig& config) {
  ExperimentResult result;
  if (config.m_grid.empty() ||
      (!config.calibration.has_value() && config.n_grid.empty())) {
    return result;
  }
  USER_DP_ASSIGN_OR_RETURN(TaskRunner runner, TaskRunner::Create(config.spec));
  const std::uint64_t master = config.spec.seed;
  if (config.calibration.has_value()) {
    const std::uint64_t stream = DeriveSeed(master, kCalibrationStream);
    for (std::size_t j = 0; j < config.m_grid.size(); ++j) {
      const int m = config.m_grid[j];
      USER_DP_ASSIGN_OR_RETURN(
          CalibrationStep step,
          CalibrateUserCount(runner, *config.calibration, m,
                             DeriveSeed(stream, j)));
      result.calibration.push_back(step);
      USER_DP_ASSIGN_OR_RETURN(CellResult cell,
                               runner.RunCell(step.n, m, DeriveSeed(master, j)));
      result.cells.push_back(std::move(cell));
    }
    return result;
  }
  std::uint64_t index = 0;
  for (int n : config.n_grid) {
    for (int m : config.m_grid) {
      USER_DP_ASSIGN_OR_RETURN(CellResult cell,
                               runner.RunCell(n, m, DeriveSeed(master, index++)));
      result.cells.push_back(std::move(cell));
    }
  }
  return result;
}

inline constexpr absl::string_view kCsvHeader =
    "task,n,m,epsilon,alpha,trials,success_rate,median_error,seed";

inline std::string CellCsvRow(const TaskSpec& spec, const CellResult& cell) {
  return absl::StrCat(spec.task, ",", cell.n, ",", cell.m, ",",
                      FormatDouble(spec.epsilon), ",", FormatDouble(spec.alpha),
                      ",", cell.trials.size(), ",",
                      FormatDouble(cell.success_rate), ",",
                      FormatDouble(cell.median_error), ",", cell.seed);
}

inline std::string ExperimentCsv(const TaskSpec& spec,
                                 const ExperimentResult& result) {
  std::string out = absl::StrCat(kCsvHeader, "\n");
  for (const CellResult& cell : result.cells) {
    absl::StrAppend(&out, CellCsvRow(spec, cell), "\n");
  }
  return out;
}

// Per-trial log of one cell.
inline std::string TrialLogCsv(const CellResult& cell) {
  std::string out = "trial,seed,error,success\n";
  for (std::size_t t = 0; t < cell.trials.size(); ++t) {
    absl::StrAppend(&out, t, ",", DeriveSeed(cell.seed, t), ",",
                    FormatDouble(cell.trials[t].error), ",",
                    cell.trials[t].success ? 1 : 0, "\n");
  }
  return out;
}

inline Json CellToJson(const TaskSpec& spec, const CellResult& cell) {
  Json out = Json::object();
  out["task"] = spec.task;
  out["method"] = MethodName(spec.method);
  out["n"] = cell.n;
  out["m"] = cell.m;
  out["epsilon"] = spec.epsilon;
  out["alpha"] = spec.alpha;
  out["trials"] = cell.trials.size();
  out["success_rate"] = cell.success_rate;
  out["median_error"] = cell.median_error;
  out["seed"] = cell.seed;
  return out;
}

inline Json ExperimentToJson(const TaskSpec& spec,
                             const ExperimentResult& result) {
  Json cells = Json::array();
  for (const CellResult& cell : result.cells) {
    cells.push_back(CellToJson(spec, cell));
  }
  Json out = Json::object();
  out["task"] = spec.task;
  out["method"] = MethodName(spec.method);
  out["seed"] = spec.seed;
  out["cells"] = std::move(cells);
  if (!result.calibration.empty()) {
    Json cal = Json::array();
    for (const CalibrationStep& step : result.calibration) {
      cal.push_back({{"m", step.m},
                     {"n", step.n},
                     {"success_rate", step.success_rate},
                     {"success_lower", step.success_lower}});
    }
    out["calibration"] = std::move(cal);
  }
  return out;
}

}  // namespace user_dp

#endif  // USER_DP_EXPERIMENT_H_
