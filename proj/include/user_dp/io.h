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

// JSON conversion for datasets, distributions, mechanism files and audit
// reports. Parse errors carry a JSON-pointer-style path to the bad field.

#ifndef USER_DP_IO_H_
#define USER_DP_IO_H_

#include <algorithm>
#include <climits>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/string_view.h"
#include "json.hpp"
#include "user_dp/audit.h"
#include "user_dp/core.h"
#include "user_dp/em.h"
#include "user_dp/mechanism.h"
#include "user_dp/mechanisms.h"
#include "user_dp/status_macros.h"

namespace user_dp {

using Json = nlohmann::ordered_json;

namespace internal {

inline absl::Status JsonError(const std::string& path, absl::string_view what) {
  return absl::InvalidArgumentError(
      absl::StrCat(path.empty() ? "/" : path, ": ", what));
}

inline std::string JsonChild(const std::string& path, absl::string_view key) {
  return absl::StrCat(path, "/", key);
}

inline std::string JsonChild(const std::string& path, std::size_t index) {
  return absl::StrCat(path, "/", index);
}

inline absl::StatusOr<const Json*> Field(const Json& obj,
                                         const std::string& path,
                                         absl::string_view key) {
  if (!obj.is_object()) return JsonError(path, "expected an object");
  auto it = obj.find(std::string(key));
  if (it == obj.end()) {
    return JsonError(JsonChild(path, key), "missing required field");
  }
  return &*it;
}

inline absl::StatusOr<std::int64_t> AsInt(const Json& value,
                                          const std::string& path) {
  if (value.is_number_integer()) return value.get<std::int64_t>();
  if (value.is_number_float()) {
    const double v = value.get<double>();
    if (std::nearbyint(v) == v && std::fabs(v) < 9e15) {
      return static_cast<std::int64_t>(v);
    }
  }
  return JsonError(path, "expected an integer");
}

inline absl::StatusOr<double> AsDouble(const Json& value,
                                       const std::string& path) {
  if (!value.is_number()) return JsonError(path, "expected a number");
  return value.get<double>();
}

}  // namespace internal

// Typed accessors for one JSON object; all errors name the field's path.
class JsonObject {
 public:
  JsonObject(const Json& json, std::string path)
      : json_(json), path_(std::move(path)) {}

  static absl::StatusOr<JsonObject> Of(const Json& json, std::string path) {
    if (!json.is_object()) return internal::JsonError(path, "expected an object");
    return JsonObject(json, std::move(path));
  }

  const std::string& path() const { return path_; }
  const Json& json() const { return json_; }
  bool Has(absl::string_view key) const {
    return json_.contains(std::string(key));
  }
  std::string Path(absl::string_view key) const {
    return internal::JsonChild(path_, key);
  }

  absl::StatusOr<const Json*> Get(absl::string_view key) const {
    return internal::Field(json_, path_, key);
  }

  absl::StatusOr<std::int64_t> Int(absl::string_view key) const {
    USER_DP_ASSIGN_OR_RETURN(const Json* v, Get(key));
    return internal::AsInt(*v, Path(key));
  }
  absl::StatusOr<std::int64_t> Int(absl::string_view key,
                                   std::int64_t fallback) const {
    if (!Has(key)) return fallback;
    return Int(key);
  }

  // Integer in [lo, hi].
  absl::StatusOr<int> IntIn(absl::string_view key, std::int64_t lo,
                            std::int64_t hi) const {
    USER_DP_ASSIGN_OR_RETURN(std::int64_t v, Int(key));
    if (v < lo || v > hi) {
      return internal::JsonError(
          Path(key), absl::StrCat("expected an integer in [", lo, ", ", hi,
                                  "], got ", v));
    }
    return static_cast<int>(v);
  }

  absl::StatusOr<std::uint64_t> Seed(absl::string_view key) const {
    USER_DP_ASSIGN_OR_RETURN(const Json* v, Get(key));
    if (v->is_number_unsigned()) return v->get<std::uint64_t>();
    if (v->is_number_integer() && v->get<std::int64_t>() >= 0) {
      return static_cast<std::uint64_t>(v->get<std::int64_t>());
    }
    return internal::JsonError(Path(key), "expected a non-negative integer");
  }

  absl::StatusOr<double> Double(absl::string_view key) const {
    USER_DP_ASSIGN_OR_RETURN(const Json* v, Get(key));
    return internal::AsDouble(*v, Path(key));
  }
  absl::StatusOr<double> Double(absl::string_view key, double fallback) const {
    if (!Has(key)) return fallback;
    return Double(key);
  }

  absl::StatusOr<std::string> String(absl::string_view key) const {
    USER_DP_ASSIGN_OR_RETURN(const Json* v, Get(key));
    if (!v->is_string()) {
      return internal::JsonError(Path(key), "expected a string");
    }
    return v->get<std::string>();
  }
  absl::StatusOr<std::string> String(absl::string_view key,
                                     std::string fallback) const {
    if (!Has(key)) return fallback;
    return String(key);
  }

  absl::StatusOr<std::vector<double>> Doubles(absl::string_view key) const {
    USER_DP_ASSIGN_OR_RETURN(const Json* v, Get(key));
    return DoublesOf(*v, Path(key));
  }

  absl::StatusOr<std::vector<int>> Ints(absl::string_view key) const {
    USER_DP_ASSIGN_OR_RETURN(const Json* v, Get(key));
    return IntsOf(*v, Path(key));
  }

  absl::StatusOr<JsonObject> Object(absl::string_view key) const {
    USER_DP_ASSIGN_OR_RETURN(const Json* v, Get(key));
    return Of(*v, Path(key));
  }

  static absl::StatusOr<std::vector<double>> DoublesOf(
      const Json& v, const std::string& path) {
    if (!v.is_array()) return internal::JsonError(path, "expected an array");
    std::vector<double> out;
    out.reserve(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
      USER_DP_ASSIGN_OR_RETURN(double x,
                               internal::AsDouble(v[i], internal::JsonChild(path, i)));
      out.push_back(x);
    }
    return out;
  }

  static absl::StatusOr<std::vector<int>> IntsOf(const Json& v,
                                                 const std::string& path) {
    if (!v.is_array()) return internal::JsonError(path, "expected an array");
    std::vector<int> out;
    out.reserve(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
      const std::string at = internal::JsonChild(path, i);
      USER_DP_ASSIGN_OR_RETURN(std::int64_t x, internal::AsInt(v[i], at));
      if (x < INT32_MIN || x > INT32_MAX) {
        return internal::JsonError(at, "integer out of range");
      }
      out.push_back(static_cast<int>(x));
    }
    return out;
  }

 private:
  const Json& json_;
  std::string path_;
};

// Numbers that may be infinite are written as the string "inf".
inline Json NumberToJson(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (std::isnan(x)) return "nan";
  return x;
}

inline absl::StatusOr<Json> ParseJson(absl::string_view text,
                                      absl::string_view source = "input") {
  Json json = Json::parse(text, nullptr, /*allow_exceptions=*/false);
  if (json.is_discarded()) {
    return absl::InvalidArgumentError(
        absl::StrCat(source, ": malformed JSON"));
  }
  return json;
}

inline absl::StatusOr<Json> ReadJsonFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) return absl::InvalidArgumentError(absl::StrCat("cannot read ", path));
  std::stringstream buffer;
  buffer << in.rdbuf();
  return ParseJson(buffer.str(), path);
}

// Datasets -------------------------------------------------------------------

inline Json DatasetToJson(const Dataset& ds) {
  Json users = Json::array();
  for (const UserRecord& u : ds.users()) users.push_back(u);
  Json out = Json::object();
  out["universe_size"] = ds.universe_size();
  out["m"] = ds.m();
  out["users"] = std::move(users);
  return out;
}

inline absl::StatusOr<Dataset> DatasetFromJson(const Json& json,
                                               const std::string& path = "") {
  USER_DP_ASSIGN_OR_RETURN(JsonObject obj, JsonObject::Of(json, path));
  USER_DP_ASSIGN_OR_RETURN(int universe, obj.IntIn("universe_size", 1, INT32_MAX));
  USER_DP_ASSIGN_OR_RETURN(int m, obj.IntIn("m", 1, INT32_MAX));
  USER_DP_ASSIGN_OR_RETURN(const Json* users_json, obj.Get("users"));
  if (!users_json->is_array()) {
    return internal::JsonError(obj.Path("users"), "expected an array");
  }
  std::vector<UserRecord> users;
  for (std::size_t i = 0; i < users_json->size(); ++i) {
    USER_DP_ASSIGN_OR_RETURN(
        std::vector<int> record,
        JsonObject::IntsOf((*users_json)[i],
                           internal::JsonChild(obj.Path("users"), i)));
    users.push_back(std::move(record));
  }
  absl::StatusOr<Dataset> ds = Dataset::Create(universe, m, std::move(users));
  if (!ds.ok()) return internal::JsonError(path, ds.status().message());
  return ds;
}

// Distributions ----------------------------------------------------------------

inline Json DistributionToJson(const FiniteDistribution& d) {
  Json out = Json::array();
  for (double x : d.masses()) out.push_back(x);
  return out;
}

inline absl::StatusOr<FiniteDistribution> DistributionFromJson(
    const Json& json, const std::string& path) {
  USER_DP_ASSIGN_OR_RETURN(std::vector<double> masses,
                           JsonObject::DoublesOf(json, path));
  absl::StatusOr<FiniteDistribution> d =
      FiniteDistribution::Create(std::move(masses));
  if (!d.ok()) return internal::JsonError(path, d.status().message());
  return d;
}

inline absl::StatusOr<std::vector<FiniteDistribution>> DistributionsFromJson(
    const Json& json, const std::string& path) {
  if (!json.is_array() || json.empty()) {
    return internal::JsonError(path, "expected a nonempty array");
  }
  std::vector<FiniteDistribution> out;
  for (std::size_t i = 0; i < json.size(); ++i) {
    USER_DP_ASSIGN_OR_RETURN(
        FiniteDistribution d,
        DistributionFromJson(json[i], internal::JsonChild(path, i)));
    out.push_back(std::move(d));
  }
  return out;
}

// Mechanism files ----------------------------------------------------------------
//
// {"type": "constant", "universe_size", "m", "n", "output": [..]}
// {"type": "first_item", "universe_size", "m", "n"}
// {"type": "count_summary", "m", "n", "item_weights": [..], "tables": [[..]]}
// {"type": "randomized_response_count", "m", "n", "item_epsilon"}
// {"type": "coordinate_rr", "n", "item_epsilon"}
// {"type": "pac_em", "m", "n", "epsilon", "hypotheses": [[0/1 ..]]}
// {"type": "hypothesis_select", "m", "n", "epsilon", "alpha",
//  "c_tau" (optional), "candidates": [[..]]}

inline absl::StatusOr<std::shared_ptr<const ExactMechanism>>
MechanismFromJson(const Json& json, const std::string& path = "") {
  USER_DP_ASSIGN_OR_RETURN(JsonObject obj, JsonObject::Of(json, path));
  USER_DP_ASSIGN_OR_RETURN(std::string type, obj.String("type"));
  static constexpr const char* kTypes[] = {
      "constant",      "first_item", "count_summary", "randomized_response_count",
      "coordinate_rr", "pac_em",     "hypothesis_select"};
  if (std::find(std::begin(kTypes), std::end(kTypes), type) ==
      std::end(kTypes)) {
    return internal::JsonError(
        obj.Path("type"), absl::StrCat("unknown mechanism type \"", type, "\""));
  }
  USER_DP_ASSIGN_OR_RETURN(int n, obj.IntIn("n", 0, 1 << 20));
  auto wrap = [&](absl::Status s) { return internal::JsonError(path, s.message()); };

  if (type == "coordinate_rr") {
    USER_DP_ASSIGN_OR_RETURN(double eps, obj.Double("item_epsilon"));
    if (!(eps > 0.0)) {
      return internal::JsonError(obj.Path("item_epsilon"), "must be positive");
    }
    return std::make_shared<const CoordinateRandomizedResponse>(n, eps);
  }
  USER_DP_ASSIGN_OR_RETURN(int m, obj.IntIn("m", 1, 1 << 20));
  if (type == "constant" || type == "first_item") {
    USER_DP_ASSIGN_OR_RETURN(int universe, obj.IntIn("universe_size", 1, 1 << 20));
    if (type == "first_item") {
      if (n < 1) return internal::JsonError(obj.Path("n"), "must be >= 1");
      return std::make_shared<const FirstItemMechanism>(universe, m, n);
    }
    USER_DP_ASSIGN_OR_RETURN(const Json* out, obj.Get("output"));
    USER_DP_ASSIGN_OR_RETURN(FiniteDistribution output,
                             DistributionFromJson(*out, obj.Path("output")));
    return std::make_shared<const ConstantMechanism>(universe, m, n,
                                                     std::move(output));
  }
  if (type == "count_summary") {
    USER_DP_ASSIGN_OR_RETURN(std::vector<int> weights, obj.Ints("item_weights"));
    USER_DP_ASSIGN_OR_RETURN(const Json* tables_json, obj.Get("tables"));
    USER_DP_ASSIGN_OR_RETURN(
        std::vector<FiniteDistribution> tables,
        DistributionsFromJson(*tables_json, obj.Path("tables")));
    absl::StatusOr<CountSummaryMechanism> mech =
        CountSummaryMechanism::FromItemWeights(m, n, std::move(weights),
                                               std::move(tables));
    if (!mech.ok()) return wrap(mech.status());
    return std::make_shared<const CountSummaryMechanism>(*std::move(mech));
  }
  if (type == "randomized_response_count") {
    USER_DP_ASSIGN_OR_RETURN(double eps, obj.Double("item_epsilon"));
    absl::StatusOr<CountSummaryMechanism> mech =
        RandomizedResponseCount(n, m, eps);
    if (!mech.ok()) return wrap(mech.status());
    return std::make_shared<const CountSummaryMechanism>(*std::move(mech));
  }
  if (type == "pac_em") {
    USER_DP_ASSIGN_OR_RETURN(double eps, obj.Double("epsilon"));
    if (!(eps > 0.0)) {
      return internal::JsonError(obj.Path("epsilon"), "must be positive");
    }
    USER_DP_ASSIGN_OR_RETURN(const Json* hyp_json, obj.Get("hypotheses"));
    if (!hyp_json->is_array() || hyp_json->empty()) {
      return internal::JsonError(obj.Path("hypotheses"),
                                 "expected a nonempty array");
    }
    std::vector<Concept> hypotheses;
    for (std::size_t i = 0; i < hyp_json->size(); ++i) {
      const std::string at = internal::JsonChild(obj.Path("hypotheses"), i);
      USER_DP_ASSIGN_OR_RETURN(std::vector<int> c,
                               JsonObject::IntsOf((*hyp_json)[i], at));
      if (c.empty() || (!hypotheses.empty() && c.size() != hypotheses[0].size())) {
        return internal::JsonError(at, "concepts must share one nonempty domain");
      }
      for (std::size_t x = 0; x < c.size(); ++x) {
        if (c[x] != 0 && c[x] != 1) {
          return internal::JsonError(internal::JsonChild(at, x),
                                     "labels must be 0 or 1");
        }
      }
      hypotheses.push_back(std::move(c));
    }
    return std::make_shared<const PacEmMechanism>(std::move(hypotheses), eps, n,
                                                  m);
  }
  if (type == "hypothesis_select") {
    USER_DP_ASSIGN_OR_RETURN(double eps, obj.Double("epsilon"));
    USER_DP_ASSIGN_OR_RETURN(double alpha, obj.Double("alpha"));
    USER_DP_ASSIGN_OR_RETURN(double c_tau, obj.Double("c_tau", 1.0));
    if (!(eps > 0.0)) {
      return internal::JsonError(obj.Path("epsilon"), "must be positive");
    }
    USER_DP_ASSIGN_OR_RETURN(const Json* cand_json, obj.Get("candidates"));
    USER_DP_ASSIGN_OR_RETURN(
        std::vector<FiniteDistribution> candidates,
        DistributionsFromJson(*cand_json, obj.Path("candidates")));
    absl::StatusOr<HypothesisSelectionMechanism> mech =
        HypothesisSelectionMechanism::Create(std::move(candidates), eps, alpha,
                                             c_tau, n, m);
    if (!mech.ok()) return wrap(mech.status());
    return std::make_shared<const HypothesisSelectionMechanism>(
        *std::move(mech));
  }
  return internal::JsonError(obj.Path("type"), "unhandled mechanism type");
}

// Audit reports ----------------------------------------------------------------

inline Json AuditReportToJson(const AuditReport& report) {
  Json out = Json::object();
  out["mode"] = AuditModeName(report.mode);
  out["neighbor_relation"] = report.neighbor_relation;
  out["epsilon"] = report.epsilon;
  out["delta"] = report.delta;
  out["tolerance"] = report.tolerance;
  out["budget"] = report.budget;
  out["seed"] = report.seed;
  out["datasets_checked"] = report.datasets_checked;
  out["pairs_checked"] = report.pairs_checked;
  out["max_divergence"] = NumberToJson(report.max_divergence);
  out["max_log_ratio"] = NumberToJson(report.max_log_ratio);
  if (report.worst_pair.has_value()) {
    out["worst_pair"] = Json::array({DatasetToJson(report.worst_pair->first),
                                     DatasetToJson(report.worst_pair->second)});
  } else {
    out["worst_pair"] = nullptr;
  }
  out["verdict"] = report.pass ? "pass" : "fail";
  return out;
}

}  // namespace user_dp

#endif  // USER_DP_IO_H_
