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

// Command-line front end.
//
//   user_dp params | audit | delstab-demo | learn-discrete |
//           hypothesis-select | pac-learn | experiment [flags]
//
// Exit codes: 0 success, 1 invalid input, 2 budget infeasible. The default
// enumeration budget can be overridden through USER_DP_BUDGET.

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "user_dp/user_dp.h"

namespace user_dp {
namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 1;
constexpr int kExitBudget = 2;

constexpr char kUsage[] =
    "usage: user_dp <subcommand> [flags]\n"
    "\n"
    "subcommands:\n"
    "  params             derived privacy quantities for (epsilon, delta, m)\n"
    "  audit              exhaustive or sampled DP audit of a mechanism file\n"
    "  delstab-demo       one DelStab run (and exact law for count summaries)\n"
    "  learn-discrete     private discrete distribution learning trials\n"
    "  hypothesis-select  private hypothesis selection trials\n"
    "  pac-learn          private PAC learning of thresholds trials\n"
    "  experiment         grid sweep emitting CSV\n"
    "\n"
    "Run 'user_dp <subcommand> --help' for flags. USER_DP_BUDGET overrides\n"
    "the default enumeration budget.\n";

int ExitCode(const absl::Status& status) {
  if (status.ok()) return kExitOk;
  return status.code() == absl::StatusCode::kResourceExhausted ? kExitBudget
                                                               : kExitInvalid;
}

int Fail(const absl::Status& status) {
  std::cerr << "error: " << status.message() << "\n";
  return ExitCode(status);
}

absl::StatusOr<std::int64_t> DefaultBudget() {
  const char* env = std::getenv("USER_DP_BUDGET");
  if (env == nullptr || *env == '\0') return kDefaultBudget;
  std::int64_t value;
  if (!absl::SimpleAtoi(env, &value) || value < 1) {
    return absl::InvalidArgumentError(
        absl::StrCat("USER_DP_BUDGET must be a positive integer, got \"", env,
                     "\""));
  }
  return value;
}

absl::Status WriteText(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return absl::OkStatus();
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) return absl::InvalidArgumentError(absl::StrCat("cannot write ", path));
  out << text;
  return out ? absl::OkStatus()
             : absl::InvalidArgumentError(absl::StrCat("cannot write ", path));
}

std::string Dump(const Json& json) { return json.dump(2) + "\n"; }

// params ---------------------------------------------------------------------

struct ParamsFlags {
  double epsilon = 0.0;
  double delta = 0.0;
  int m = 0;
  double n_item = -1.0;
  double c_delta = 1.0;
  double c = 1.0;
};

absl::Status RunParams(const ParamsFlags& f) {
  const PrivacyParams pp{f.epsilon, f.delta};
  USER_DP_RETURN_IF_ERROR(ValidatePrivacyParams(pp));
  Json out = Json::object();
  out["epsilon"] = f.epsilon;
  out["delta"] = f.delta;
  if (f.delta > 0.0) {
    USER_DP_ASSIGN_OR_RETURN(DelStabParams ds, ComputeDelStabParams(pp));
    out["eps_bar"] = ds.eps_bar;
    out["delta_bar"] = ds.delta_bar;
    out["kappa"] = ds.kappa;
    out["min_users"] = 4 * ds.kappa;
  }
  if (f.m > 0 && f.delta > 0.0) {
    out["m"] = f.m;
    USER_DP_ASSIGN_OR_RETURN(PrivacyParams item,
                             TranslateItemToUser(pp, f.m, f.c_delta));
    out["item_level_epsilon"] = item.epsilon;
    out["item_level_delta"] = item.delta;
    if (f.n_item >= 0.0) {
      out["n_item"] = f.n_item;
      USER_DP_ASSIGN_OR_RETURN(double users,
                               UserComplexityEstimate(f.n_item, pp, f.m, f.c));
      USER_DP_ASSIGN_OR_RETURN(
          double users_same,
          UserComplexityEstimateSameEps(f.n_item, pp, f.m, f.c));
      out["user_complexity"] = users;
      out["user_complexity_same_eps"] = users_same;
    }
  }
  std::cout << Dump(out);
  return absl::OkStatus();
}

// audit ----------------------------------------------------------------------

struct AuditFlags {
  std::string mechanism;
  std::string mode = "exhaustive";
  std::string relation = "user";
  std::string replacement;
  std::string out;
  double epsilon = 0.0;
  double delta = 0.0;
  std::int64_t budget = 0;
  std::uint64_t seed = 0;
};

absl::Status RunAuditCommand(const AuditFlags& f) {
  USER_DP_ASSIGN_OR_RETURN(Json json, ReadJsonFile(f.mechanism));
  USER_DP_ASSIGN_OR_RETURN(std::shared_ptr<const ExactMechanism> mech,
                           MechanismFromJson(json));
  AuditMode mode;
  if (f.mode == "exhaustive") {
    mode = AuditMode::kExhaustive;
  } else if (f.mode == "sampled") {
    mode = AuditMode::kSampled;
  } else {
    return absl::InvalidArgumentError("--mode must be exhaustive or sampled");
  }
  if (f.relation != "user" && f.relation != "item") {
    return absl::InvalidArgumentError("--relation must be user or item");
  }
  std::int64_t budget = f.budget;
  if (budget <= 0) {
    USER_DP_ASSIGN_OR_RETURN(budget, DefaultBudget());
  }
  std::optional<FiniteDistribution> replacement;
  if (!f.replacement.empty()) {
    USER_DP_ASSIGN_OR_RETURN(Json r, ReadJsonFile(f.replacement));
    USER_DP_ASSIGN_OR_RETURN(FiniteDistribution d,
                             DistributionFromJson(r, ""));
    replacement = std::move(d);
  }
  const PrivacyParams pp{f.epsilon, f.delta};
  USER_DP_RETURN_IF_ERROR(ValidatePrivacyParams(pp));
  const auto verify = f.relation == "user" ? VerifyUserDp : VerifyItemDp;
  USER_DP_ASSIGN_OR_RETURN(
      AuditReport report,
      verify(*mech, mech->universe_size(), mech->input_users(),
             mech->items_per_user(), pp, mode, budget, f.seed, replacement));
  return WriteText(f.out, Dump(AuditReportToJson(report)));
}

// delstab-demo -----------------------------------------------------------------

struct DelStabFlags {
  std::string mechanism;
  std::string dataset;
  double epsilon = 0.0;
  double delta = 0.0;
  std::uint64_t seed = 0;
  std::int64_t budget = 0;
};

absl::Status RunDelStabDemo(const DelStabFlags& f) {
  USER_DP_ASSIGN_OR_RETURN(Json mech_json, ReadJsonFile(f.mechanism));
  USER_DP_ASSIGN_OR_RETURN(std::shared_ptr<const ExactMechanism> mech,
                           MechanismFromJson(mech_json));
  USER_DP_ASSIGN_OR_RETURN(Json ds_json, ReadJsonFile(f.dataset));
  USER_DP_ASSIGN_OR_RETURN(Dataset ds, DatasetFromJson(ds_json));
  const PrivacyParams pp{f.epsilon, f.delta};
  USER_DP_RETURN_IF_ERROR(ValidatePrivacyParams(pp));
  std::int64_t budget = f.budget;
  if (budget <= 0) {
    USER_DP_ASSIGN_OR_RETURN(budget, DefaultBudget());
  }
  USER_DP_ASSIGN_OR_RETURN(DelStabParams params, ComputeDelStabParams(pp));
  Json out = Json::object();
  out["kappa"] = params.kappa;
  out["eps_bar"] = params.eps_bar;
  out["delta_bar"] = params.delta_bar;
  out["seed"] = f.seed;
  Rng rng(f.seed);
  std::optional<int> outcome;
  const auto* count =
      dynamic_cast<const CountSummaryMechanism*>(mech.get());
  if (count != nullptr) {
    USER_DP_ASSIGN_OR_RETURN(outcome, DelStabRun(*count, ds, pp, rng, budget));
  } else {
    USER_DP_ASSIGN_OR_RETURN(outcome, DelStabRun(*mech, ds, pp, rng, budget));
  }
  if (outcome.has_value()) {
    out["outcome"] = *outcome;
  } else {
    out["outcome"] = "bottom";
  }
  if (count != nullptr) {
    USER_DP_ASSIGN_OR_RETURN(FiniteDistribution law,
                             DelStabDistribution(*count, ds, pp, budget));
    out["bottom_index"] = DelStabBottomIndex(*count);
    out["distribution"] = DistributionToJson(law);
    USER_DP_ASSIGN_OR_RETURN(std::vector<double> sizes,
                             StableSetSizes(*count, ds, pp, budget));
    out["stable_set_sizes"] = sizes;
  }
  std::cout << Dump(out);
  return absl::OkStatus();
}

// learn-discrete / hypothesis-select / pac-learn -----------------------------------

struct TaskFlags {
  std::string config;
  std::string out;
  std::string trial_log;
  std::string csv;
  std::optional<int> n;
  std::optional<int> m;
  std::optional<std::uint64_t> seed;
};

absl::StatusOr<std::int64_t> ConfigBudget(const JsonObject& obj) {
  if (obj.Has("budget")) return obj.Int("budget");
  return DefaultBudget();
}

// Single-cell config: the task fields plus scalar "n" and "m". The seed is the
// cell seed; trial t uses DeriveSeed(seed, t).
absl::Status RunTaskCommand(const std::string& task, const TaskFlags& f) {
  USER_DP_ASSIGN_OR_RETURN(Json json, ReadJsonFile(f.config));
  USER_DP_ASSIGN_OR_RETURN(JsonObject obj, JsonObject::Of(json, ""));
  USER_DP_ASSIGN_OR_RETURN(TaskSpec spec, ParseTaskSpec(obj, task));
  USER_DP_ASSIGN_OR_RETURN(spec.budget, ConfigBudget(obj));
  int n, m;
  if (f.n.has_value()) {
    n = *f.n;
  } else {
    USER_DP_ASSIGN_OR_RETURN(n, obj.IntIn("n", 1, 1 << 24));
  }
  if (f.m.has_value()) {
    m = *f.m;
  } else {
    USER_DP_ASSIGN_OR_RETURN(m, obj.IntIn("m", 1, 1 << 24));
  }
  if (n < 1 || m < 1) return absl::InvalidArgumentError("n and m must be >= 1");
  if (f.seed.has_value()) spec.seed = *f.seed;
  USER_DP_ASSIGN_OR_RETURN(TaskRunner runner, TaskRunner::Create(spec));
  USER_DP_ASSIGN_OR_RETURN(CellResult cell, runner.RunCell(n, m, spec.seed));
  if (!f.trial_log.empty()) {
    USER_DP_RETURN_IF_ERROR(WriteText(f.trial_log, TrialLogCsv(cell)));
  }
  if (!f.csv.empty()) {
    USER_DP_RETURN_IF_ERROR(WriteText(
        f.csv, absl::StrCat(kCsvHeader, "\n", CellCsvRow(runner.spec(), cell),
                            "\n")));
    if (f.out.empty()) return absl::OkStatus();
  }
  return WriteText(f.out, Dump(CellToJson(runner.spec(), cell)));
}

// experiment -------------------------------------------------------------------

struct ExperimentFlags {
  std::string config;
  std::string csv;
  std::string json;
};

absl::Status RunExperimentCommand(const ExperimentFlags& f) {
  USER_DP_ASSIGN_OR_RETURN(Json json, ReadJsonFile(f.config));
  USER_DP_ASSIGN_OR_RETURN(ExperimentConfig config,
                           ParseExperimentConfig(json));
  USER_DP_ASSIGN_OR_RETURN(JsonObject obj, JsonObject::Of(json, ""));
  USER_DP_ASSIGN_OR_RETURN(config.spec.budget, ConfigBudget(obj));
  USER_DP_ASSIGN_OR_RETURN(ExperimentResult result, RunExperiment(config));
  USER_DP_RETURN_IF_ERROR(WriteText(f.csv, ExperimentCsv(config.spec, result)));
  if (!f.json.empty()) {
    USER_DP_RETURN_IF_ERROR(
        WriteText(f.json, Dump(ExperimentToJson(config.spec, result))));
  }
  return absl::OkStatus();
}

int Main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << kUsage;
    return kExitInvalid;
  }
  CLI::App app{"User-level differential privacy toolkit", "user_dp"};
  app.require_subcommand(1);

  ParamsFlags params;
  CLI::App* params_cmd = app.add_subcommand("params", "derived quantities");
  params_cmd->add_option("--epsilon", params.epsilon)->required();
  params_cmd->add_option("--delta", params.delta)->required();
  params_cmd->add_option("--m", params.m, "items per user");
  params_cmd->add_option("--n-item", params.n_item, "item-level sample size");
  params_cmd->add_option("--c-delta", params.c_delta);
  params_cmd->add_option("--c", params.c);

  AuditFlags audit;
  CLI::App* audit_cmd = app.add_subcommand("audit", "DP audit");
  audit_cmd->add_option("--mechanism", audit.mechanism)->required();
  audit_cmd->add_option("--mode", audit.mode);
  audit_cmd->add_option("--relation", audit.relation, "user or item");
  audit_cmd->add_option("--epsilon", audit.epsilon)->required();
  audit_cmd->add_option("--delta", audit.delta)->required();
  audit_cmd->add_option("--budget", audit.budget);
  audit_cmd->add_option("--seed", audit.seed);
  audit_cmd->add_option("--replacement", audit.replacement,
                        "JSON distribution for sampled replacements");
  audit_cmd->add_option("--out", audit.out);

  DelStabFlags delstab;
  CLI::App* delstab_cmd = app.add_subcommand("delstab-demo", "DelStab run");
  delstab_cmd->add_option("--mechanism", delstab.mechanism)->required();
  delstab_cmd->add_option("--dataset", delstab.dataset)->required();
  delstab_cmd->add_option("--epsilon", delstab.epsilon)->required();
  delstab_cmd->add_option("--delta", delstab.delta)->required();
  delstab_cmd->add_option("--seed", delstab.seed);
  delstab_cmd->add_option("--budget", delstab.budget);

  TaskFlags task_flags;
  std::string task_name;
  for (const char* name : {"learn-discrete", "hypothesis-select", "pac-learn"}) {
    CLI::App* cmd = app.add_subcommand(name, "seeded learning trials");
    cmd->add_option("--config", task_flags.config)->required();
    cmd->add_option("--out", task_flags.out);
    cmd->add_option("--trial-log", task_flags.trial_log, "per-trial CSV");
    cmd->add_option("--csv", task_flags.csv, "summary row in sweep format");
    cmd->add_option("--n", task_flags.n);
    cmd->add_option("--m", task_flags.m);
    cmd->add_option("--seed", task_flags.seed, "cell seed");
  }

  ExperimentFlags experiment;
  CLI::App* experiment_cmd = app.add_subcommand("experiment", "grid sweep");
  experiment_cmd->add_option("--config", experiment.config)->required();
  experiment_cmd->add_option("--csv", experiment.csv);
  experiment_cmd->add_option("--json", experiment.json);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n\n" << kUsage;
    return kExitInvalid;
  }

  CLI::App* cmd = app.get_subcommands().front();
  const std::string name = cmd->get_name();
  absl::Status status;
  if (name == "params") {
    status = RunParams(params);
  } else if (name == "audit") {
    status = RunAuditCommand(audit);
  } else if (name == "delstab-demo") {
    status = RunDelStabDemo(delstab);
  } else if (name == "experiment") {
    status = RunExperimentCommand(experiment);
  } else {
    status = RunTaskCommand(name, task_flags);
  }
  return status.ok() ? kExitOk : Fail(status);
}

}  // namespace
}  // namespace user_dp

int main(int argc, char** argv) { return user_dp::Main(argc, argv); }
