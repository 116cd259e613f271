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

// Mechanisms exposed as exact maps from datasets to output distributions.

#ifndef USER_DP_MECHANISM_H_
#define USER_DP_MECHANISM_H_

#include <algorithm>
#include <cstdint>
#include <functional>
#include <memory>
#include <utility>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/str_cat.h"
#include "user_dp/core.h"

namespace user_dp {

// A randomized algorithm over datasets of input_users() users with
// items_per_user() items each, known through its exact output law over
// {0, ..., output_size() - 1}. Evaluate must be a deterministic function of
// the dataset.
class ExactMechanism {
 public:
  using DistributionPair = std::pair<FiniteDistribution, FiniteDistribution>;

  virtual ~ExactMechanism() = default;

  virtual int input_users() const = 0;
  virtual int items_per_user() const = 0;
  virtual int universe_size() const = 0;
  virtual int output_size() const = 0;

  virtual absl::StatusOr<FiniteDistribution> Evaluate(
      const Dataset& ds) const = 0;

  // The output laws on `a` and `b`, possibly pushed forward through a
  // statistic that is sufficient for their likelihood ratio. Hockey-stick
  // divergences and pointwise log-ratios of the returned pair equal those of
  // the full output laws. The default returns the full laws.
  // True when EvaluatePair returns something other than the two full laws;
  // callers may otherwise cache Evaluate results per dataset.
  virtual bool reduces_pairs() const { return false; }

  virtual absl::StatusOr<DistributionPair> EvaluatePair(
      const Dataset& a, const Dataset& b) const {
    absl::StatusOr<FiniteDistribution> pa = Evaluate(a);
    if (!pa.ok()) return pa.status();
    absl::StatusOr<FiniteDistribution> pb = Evaluate(b);
    if (!pb.ok()) return pb.status();
    return DistributionPair(*std::move(pa), *std::move(pb));
  }

 protected:
  absl::Status CheckInput(const Dataset& ds) const {
    if (ds.n() != input_users()) {
      return absl::InvalidArgumentError(absl::StrCat(
          "mechanism expects ", input_users(), " users, got ", ds.n()));
    }
    if (ds.n() > 0 && ds.m() != items_per_user()) {
      return absl::InvalidArgumentError(absl::StrCat(
          "mechanism expects ", items_per_user(), " items per user, got ",
          ds.m()));
    }
    if (ds.universe_size() != universe_size()) {
      return absl::InvalidArgumentError(absl::StrCat(
          "mechanism expects universe of size ", universe_size(), ", got ",
          ds.universe_size()));
    }
    return absl::OkStatus();
  }
};

// A mechanism whose output law depends on the dataset only through the total
// of a small nonnegative per-user summary: Evaluate(ds) = table(sum_i
// summary(user_i)). This is the class for which DelStab has a polynomial
// exact law.
class CountSummaryMechanism : public ExactMechanism {
 public:
  using SummaryFn = std::function<int(const UserRecord&)>;

  // `tables[t]` is the output law at total t, for t in
  // {0, ..., input_users * max_summary}.
  static absl::StatusOr<CountSummaryMechanism> Create(
      int universe_size, int items_per_user, int input_users,
      SummaryFn summary, int max_summary,
      std::vector<FiniteDistribution> tables) {
    if (universe_size < 1 || items_per_user < 1 || input_users < 0 ||
        max_summary < 0) {
      return absl::InvalidArgumentError("invalid count-summary shape");
    }
    const std::size_t expected =
        static_cast<std::size_t>(input_users) * max_summary + 1;
    if (tables.size() != expected) {
      return absl::InvalidArgumentError(absl::StrCat(
          "expected ", expected, " table rows (totals 0..",
          expected - 1, "), got ", tables.size()));
    }
    for (const FiniteDistribution& row : tables) {
      if (row.size() != tables.front().size()) {
        return absl::InvalidArgumentError(
            "table rows must share one output domain");
      }
    }
    return CountSummaryMechanism(universe_size, items_per_user, input_users,
                                 std::move(summary), max_summary,
                                 std::move(tables));
  }

  // summary(user) = sum of item_weights[item] over the user's items.
  static absl::StatusOr<CountSummaryMechanism> FromItemWeights(
      int items_per_user, int input_users, std::vector<int> item_weights,
      std::vector<FiniteDistribution> tables) {
    if (item_weights.empty()) {
      return absl::InvalidArgumentError("item_weights must be nonempty");
    }
    int max_weight = 0;
    for (int w : item_weights) {
      if (w < 0) return absl::InvalidArgumentError("item weights must be >= 0");
      max_weight = std::max(max_weight, w);
    }
    const int universe = static_cast<int>(item_weights.size());
    auto weights = std::make_shared<const std::vector<int>>(item_weights);
    SummaryFn summary = [weights](const UserRecord& user) {
      int s = 0;
      for (int item : user) s += (*weights)[item];
      return s;
    };
    absl::StatusOr<CountSummaryMechanism> mech =
        Create(universe, items_per_user, input_users, std::move(summary),
               max_weight * items_per_user, std::move(tables));
    if (mech.ok()) mech->item_weights_ = std::move(item_weights);
    return mech;
  }

  int input_users() const override { return input_users_; }
  int items_per_user() const override { return items_per_user_; }
  int universe_size() const override { return universe_size_; }
  int output_size() const override {
    return static_cast<int>(tables_.front().size());
  }

  int max_summary() const { return max_summary_; }
  const std::vector<FiniteDistribution>& tables() const { return tables_; }
  // Empty unless built by FromItemWeights.
  const std::vector<int>& item_weights() const { return item_weights_; }

  absl::StatusOr<int> Summary(const UserRecord& user) const {
    const int s = summary_(user);
    if (s < 0 || s > max_summary_) {
      return absl::InvalidArgumentError(absl::StrCat(
          "user summary ", s, " outside [0, ", max_summary_, "]"));
    }
    return s;
  }

  absl::StatusOr<FiniteDistribution> Evaluate(const Dataset& ds) const override {
    if (absl::Status s = CheckInput(ds); !s.ok()) return s;
    int total = 0;
    for (const UserRecord& user : ds.users()) {
      absl::StatusOr<int> s = Summary(user);
      if (!s.ok()) return s.status();
      total += *s;
    }
    return tables_[total];
  }

 private:
  CountSummaryMechanism(int universe_size, int items_per_user, int input_users,
                        SummaryFn summary, int max_summary,
                        std::vector<FiniteDistribution> tables)
      : universe_size_(universe_size),
        items_per_user_(items_per_user),
        input_users_(input_users),
        summary_(std::move(summary)),
        max_summary_(max_summary),
        tables_(std::move(tables)) {}

  int universe_size_;
  int items_per_user_;
  int input_users_;
  SummaryFn summary_;
  int max_summary_;
  std::vector<FiniteDistribution> tables_;
  std::vector<int> item_weights_;
};

}  // namespace user_dp

#endif  // USER_DP_MECHANISM_H_
