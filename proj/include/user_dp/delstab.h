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

// Local-deletion DP checks and the DelStab propose-test-release
// transformation, as a sampler for any exact mechanism and as an exact output
// law for count-summary mechanisms.
//
// DelStab(x), with (eps_bar, delta_bar, kappa) from ComputeDelStabParams:
//   1. draw R1 from the truncated discrete Laplace(eps_bar, delta_bar);
//   2. the stable family holds every S of size R1 such that the mechanism is
//      (4 kappa - R1, eps_bar, delta_bar)-LDDP at x without S;
//   3. output bottom if the family is empty; otherwise pick S uniformly from
//      it, a uniform superset T of S of size 4 kappa, and run the mechanism
//      on x without T.

#ifndef USER_DP_DELSTAB_H_
#define USER_DP_DELSTAB_H_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/str_cat.h"
#include "user_dp/calculus.h"
#include "user_dp/combinatorics.h"
#include "user_dp/core.h"
#include "user_dp/mechanism.h"
#include "user_dp/noise.h"
#include "user_dp/random.h"

namespace user_dp {

namespace internal {

// Stability oracle for count-summary mechanisms. A dataset is described by
// its histogram of user summaries; deleting r users reaches exactly the
// totals T - s for removable sums s, so LDDP reduces to pairwise
// indistinguishability of the table rows at those totals. Row comparisons and
// verdicts are memoized.
class CountSummaryStability {
 public:
  CountSummaryStability(const CountSummaryMechanism& mech, PrivacyParams pp)
      : mech_(mech),
        pp_(pp),
        rows_(static_cast<int>(mech.tables().size())),
        close_(static_cast<std::size_t>(rows_) * rows_, -1) {}

  // Whether the mechanism is (r, pp)-LDDP at any dataset whose user summary
  // histogram is `value_counts`.
  bool Stable(const std::vector<int>& value_counts, int r) {
    auto key = std::make_pair(r, value_counts);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    const bool stable = Compute(value_counts, r);
    memo_.emplace(std::move(key), stable);
    return stable;
  }

 private:
  bool Close(int t1, int t2) {
    if (t1 == t2) return true;
    if (t1 > t2) std::swap(t1, t2);
    signed char& slot = close_[static_cast<std::size_t>(t1) * rows_ + t2];
    if (slot < 0) {
      const auto& a = mech_.tables()[t1];
      const auto& b = mech_.tables()[t2];
      slot = HockeyStickUnchecked(a.masses(), b.masses(), pp_.epsilon) <=
                     pp_.delta &&
                 HockeyStickUnchecked(b.masses(), a.masses(), pp_.epsilon) <=
                     pp_.delta
             ? 1
             : 0;
    }
    return slot == 1;
  }

  bool Compute(const std::vector<int>& value_counts, int r) {
    int total = 0;
    for (std::size_t v = 0; v < value_counts.size(); ++v) {
      total += static_cast<int>(v) * value_counts[v];
    }
    const int max_value = static_cast<int>(value_counts.size()) - 1;
    const int max_sum = r * std::max(max_value, 0);
    // reach[j][s]: some j users have summaries adding to s.
    std::vector<std::vector<char>> reach(
        r + 1, std::vector<char>(max_sum + 1, 0));
    reach[0][0] = 1;
    for (int v = 0; v <= max_value; ++v) {
      const int c = value_counts[v];
      if (c == 0) continue;
      std::vector<std::vector<char>> next = reach;
      for (int j = 0; j <= r; ++j) {
        for (int s = 0; s <= max_sum; ++s) {
          if (!reach[j][s]) continue;
          for (int t = 1; t <= c && j + t <= r; ++t) {
            const int sum = s + t * v;
            if (sum > max_sum) break;
            next[j + t][sum] = 1;
          }
        }
      }
      reach = std::move(next);
    }
    std::vector<int> totals;
    for (int s = 0; s <= max_sum; ++s) {
      if (reach[r][s]) totals.push_back(total - s);
    }
    for (std::size_t i = 0; i < totals.size(); ++i) {
      for (std::size_t j = i + 1; j < totals.size(); ++j) {
        if (!Close(totals[i], totals[j])) return false;
      }
    }
    return true;
  }

  const CountSummaryMechanism& mech_;
  PrivacyParams pp_;
  int rows_;
  std::vector<signed char> close_;
  std::map<std::pair<int, std::vector<int>>, bool> memo_;
};

inline absl::StatusOr<std::vector<int>> UserSummaries(
    const CountSummaryMechanism& mech, const Dataset& ds) {
  std::vector<int> summaries;
  summaries.reserve(ds.n());
  for (const UserRecord& user : ds.users()) {
    absl::StatusOr<int> s = mech.Summary(user);
    if (!s.ok()) return s.status();
    summaries.push_back(*s);
  }
  return summaries;
}

inline std::vector<int> SummaryHistogram(const std::vector<int>& summaries,
                                         int max_summary) {
  std::vector<int> counts(max_summary + 1, 0);
  for (int s : summaries) ++counts[s];
  return counts;
}

inline absl::Status CheckShape(const ExactMechanism& mech, const Dataset& ds) {
  if (ds.universe_size() != mech.universe_size()) {
    return absl::InvalidArgumentError("dataset universe does not match");
  }
  if (ds.n() > 0 && ds.m() != mech.items_per_user()) {
    return absl::InvalidArgumentError("dataset items per user do not match");
  }
  return absl::OkStatus();
}

}  // namespace internal

// (r, pp)-LDDP at `ds`: every pair of r-user deletions gives
// pp-indistinguishable outputs. Enumerates all C(n, r) deletions, so
// C(n, r) must fit in `budget`.
inline absl::StatusOr<bool> LddpCheck(const ExactMechanism& mech,
                                      const Dataset& ds, int r,
                                      const PrivacyParams& pp,
                                      std::int64_t budget = kDefaultBudget) {
  if (absl::Status s = internal::CheckShape(mech, ds); !s.ok()) return s;
  if (r < 0 || r > ds.n()) {
    return absl::InvalidArgumentError("deletion count outside [0, n]");
  }
  if (mech.input_users() != ds.n() - r) {
    return absl::InvalidArgumentError(absl::StrCat(
        "arity mismatch: mechanism takes ", mech.input_users(),
        " users but n - r = ", ds.n() - r));
  }
  const double subsets = internal::Choose(ds.n(), r);
  if (subsets > static_cast<double>(budget)) {
    return internal::BudgetExceeded(subsets, budget, "LDDP subset enumeration");
  }
  std::vector<FiniteDistribution> distinct;
  absl::Status status = internal::ForEachSubset(
      ds.n(), r, [&](const std::vector<int>& idx) -> absl::Status {
        absl::StatusOr<FiniteDistribution> out =
            mech.Evaluate(ds.WithoutUsers(internal::MaskFromIndices(ds.n(), idx)));
        if (!out.ok()) return out.status();
        if (std::find(distinct.begin(), distinct.end(), *out) ==
            distinct.end()) {
          distinct.push_back(*std::move(out));
        }
        return absl::OkStatus();
      });
  if (!status.ok()) return status;
  for (std::size_t i = 0; i < distinct.size(); ++i) {
    for (std::size_t j = i + 1; j < distinct.size(); ++j) {
      absl::StatusOr<bool> close =
          ApproxIndistinguishable(distinct[i], distinct[j], pp);
      if (!close.ok()) return close.status();
      if (!*close) return false;
    }
  }
  return true;
}

// Count-summary LDDP check; only distinct reachable totals are compared.
inline absl::StatusOr<bool> LddpCheck(const CountSummaryMechanism& mech,
                                      const Dataset& ds, int r,
                                      const PrivacyParams& pp) {
  if (absl::Status s = internal::CheckShape(mech, ds); !s.ok()) return s;
  if (r < 0 || r > ds.n()) {
    return absl::InvalidArgumentError("deletion count outside [0, n]");
  }
  if (mech.input_users() != ds.n() - r) {
    return absl::InvalidArgumentError(absl::StrCat(
        "arity mismatch: mechanism takes ", mech.input_users(),
        " users but n - r = ", ds.n() - r));
  }
  absl::StatusOr<std::vector<int>> summaries =
      internal::UserSummaries(mech, ds);
  if (!summaries.ok()) return summaries.status();
  internal::CountSummaryStability stability(mech, pp);
  return stability.Stable(
      internal::SummaryHistogram(*summaries, mech.max_summary()), r);
}

namespace internal {

struct DelStabSetup {
  DelStabParams params;
  TruncatedDiscreteLaplace noise;
};

inline absl::StatusOr<DelStabSetup> PrepareDelStab(const ExactMechanism& mech,
                                                   const Dataset& ds,
                                                   const PrivacyParams& pp) {
  if (absl::Status s = CheckShape(mech, ds); !s.ok()) return s;
  absl::StatusOr<DelStabParams> params = ComputeDelStabParams(pp);
  if (!params.ok()) return params.status();
  const int removed = 4 * params->kappa;
  if (ds.n() < removed) {
    return absl::InvalidArgumentError(absl::StrCat(
        "DelStab needs n >= 4 kappa = ", removed, ", got n = ", ds.n()));
  }
  if (mech.input_users() != ds.n() - removed) {
    return absl::InvalidArgumentError(absl::StrCat(
        "mechanism must take n - 4 kappa = ", ds.n() - removed,
        " users, takes ", mech.input_users()));
  }
  absl::StatusOr<TruncatedDiscreteLaplace> noise =
      TruncatedDiscreteLaplace::Create(params->eps_bar, params->delta_bar);
  if (!noise.ok()) return noise.status();
  return DelStabSetup{*params, *std::move(noise)};
}

// Stable removal classes at level r: summary histograms d of S with
// |S| = r, with log of the number of subsets in each class.
struct RemovalClass {
  std::vector<int> removed;
  double log_count;
};

inline absl::StatusOr<std::vector<RemovalClass>> StableRemovalClasses(
    CountSummaryStability& stability, const std::vector<int>& counts, int r,
    int kappa, std::int64_t& budget_left) {
  std::vector<RemovalClass> stable;
  std::vector<int> remaining(counts.size());
  absl::Status status = ForEachBoundedComposition(
      counts, r, [&](const std::vector<int>& d) -> absl::Status {
        if (--budget_left < 0) {
          return absl::ResourceExhaustedError(
              "audit infeasible at this size: summary class budget exhausted");
        }
        double log_count = 0.0;
        for (std::size_t v = 0; v < counts.size(); ++v) {
          remaining[v] = counts[v] - d[v];
          log_count += LogChoose(counts[v], d[v]);
        }
        if (stability.Stable(remaining, 4 * kappa - r)) {
          stable.push_back({d, log_count});
        }
        return absl::OkStatus();
      });
  if (!status.ok()) return status;
  return stable;
}

// Normalized selection probabilities proportional to exp(log_count).
inline std::vector<double> ClassProbabilities(
    const std::vector<RemovalClass>& classes) {
  double top = -kInfinity;
  for (const RemovalClass& c : classes) top = std::max(top, c.log_count);
  std::vector<double> probs(classes.size());
  double total = 0.0;
  for (std::size_t i = 0; i < classes.size(); ++i) {
    probs[i] = std::exp(classes[i].log_count - top);
    total += probs[i];
  }
  for (double& p : probs) p /= total;
  return probs;
}

}  // namespace internal

// Number of stable sets |X_stable^r| for r = 0, ..., 2 kappa.
inline absl::StatusOr<std::vector<double>> StableSetSizes(
    const CountSummaryMechanism& mech, const Dataset& ds,
    const PrivacyParams& pp, std::int64_t budget = kDefaultBudget) {
  absl::StatusOr<internal::DelStabSetup> setup =
      internal::PrepareDelStab(mech, ds, pp);
  if (!setup.ok()) return setup.status();
  const int kappa = setup->params.kappa;
  absl::StatusOr<std::vector<int>> summaries =
      internal::UserSummaries(mech, ds);
  if (!summaries.ok()) return summaries.status();
  const std::vector<int> counts =
      internal::SummaryHistogram(*summaries, mech.max_summary());
  internal::CountSummaryStability stability(
      mech, {setup->params.eps_bar, setup->params.delta_bar});
  std::vector<double> sizes(2 * kappa + 1, 0.0);
  std::int64_t budget_left = budget;
  for (int r = 0; r <= 2 * kappa; ++r) {
    absl::StatusOr<std::vector<internal::RemovalClass>> classes =
        internal::StableRemovalClasses(stability, counts, r, kappa,
                                       budget_left);
    if (!classes.ok()) return classes.status();
    for (const internal::RemovalClass& c : *classes) {
      sizes[r] += std::exp(c.log_count);
    }
    sizes[r] = std::round(sizes[r]);
  }
  return sizes;
}

// Index of the bottom outcome in DelStabDistribution's output domain.
inline int DelStabBottomIndex(const ExactMechanism& mech) {
  return mech.output_size();
}

// Exact law of DelStab over {0, ..., output_size - 1} plus bottom at index
// output_size. Subsets are grouped by their summary histograms, so the cost
// is polynomial in n for a fixed summary range. Fails with
// ResourceExhausted once more than `budget` classes would be visited.
inline absl::StatusOr<FiniteDistribution> DelStabDistribution(
    const CountSummaryMechanism& mech, const Dataset& ds,
    const PrivacyParams& pp, std::int64_t budget = kDefaultBudget) {
  absl::StatusOr<internal::DelStabSetup> setup =
      internal::PrepareDelStab(mech, ds, pp);
  if (!setup.ok()) return setup.status();
  const int kappa = setup->params.kappa;
  const int n = ds.n();
  absl::StatusOr<std::vector<int>> summaries =
      internal::UserSummaries(mech, ds);
  if (!summaries.ok()) return summaries.status();
  const std::vector<int> counts =
      internal::SummaryHistogram(*summaries, mech.max_summary());
  int total = 0;
  for (int s : *summaries) total += s;

  internal::CountSummaryStability stability(
      mech, {setup->params.eps_bar, setup->params.delta_bar});
  const int outputs = mech.output_size();
  std::vector<double> law(outputs + 1, 0.0);
  // Mass reaching each remaining total, accumulated before mixing rows.
  std::vector<double> total_mass(mech.tables().size(), 0.0);
  std::int64_t budget_left = budget;
  const FiniteDistribution& noise = setup->noise.pmf();
  for (int r = 0; r <= 2 * kappa; ++r) {
    const double level_mass = noise[r];
    absl::StatusOr<std::vector<internal::RemovalClass>> classes =
        internal::StableRemovalClasses(stability, counts, r, kappa,
                                       budget_left);
    if (!classes.ok()) return classes.status();
    if (classes->empty()) {
      law[outputs] += level_mass;
      continue;
    }
    const std::vector<double> class_probs =
        internal::ClassProbabilities(*classes);
    const int extra = 4 * kappa - r;
    const double log_supersets = internal::LogChoose(n - r, extra);
    std::vector<int> remaining(counts.size());
    for (std::size_t i = 0; i < classes->size(); ++i) {
      const std::vector<int>& d = (*classes)[i].removed;
      int removed_sum = 0;
      for (std::size_t v = 0; v < counts.size(); ++v) {
        remaining[v] = counts[v] - d[v];
        removed_sum += static_cast<int>(v) * d[v];
      }
      const double class_mass = level_mass * class_probs[i];
      absl::Status status = internal::ForEachBoundedComposition(
          remaining, extra, [&](const std::vector<int>& e) -> absl::Status {
            if (--budget_left < 0) {
              return absl::ResourceExhaustedError(
                  "audit infeasible at this size: superset class budget "
                  "exhausted");
            }
            double log_count = -log_supersets;
            int extra_sum = 0;
            for (std::size_t v = 0; v < counts.size(); ++v) {
              log_count += internal::LogChoose(remaining[v], e[v]);
              extra_sum += static_cast<int>(v) * e[v];
            }
            total_mass[total - removed_sum - extra_sum] +=
                class_mass * std::exp(log_count);
            return absl::OkStatus();
          });
      if (!status.ok()) return status;
    }
  }
  for (std::size_t t = 0; t < total_mass.size(); ++t) {
    if (total_mass[t] == 0.0) continue;
    const FiniteDistribution& row = mech.tables()[t];
    for (int o = 0; o < outputs; ++o) law[o] += total_mass[t] * row[o];
  }
  return FiniteDistribution::Create(std::move(law));
}

// One run of DelStab on a count-summary mechanism. Returns nullopt for
// bottom. The stable family is sampled class by class: a summary histogram
// with probability proportional to its subset count, then concrete users
// uniformly within each summary value.
inline absl::StatusOr<std::optional<int>> DelStabRun(
    const CountSummaryMechanism& mech, const Dataset& ds,
    const PrivacyParams& pp, Rng& rng, std::int64_t budget = kDefaultBudget) {
  absl::StatusOr<internal::DelStabSetup> setup =
      internal::PrepareDelStab(mech, ds, pp);
  if (!setup.ok()) return setup.status();
  const int kappa = setup->params.kappa;
  const int n = ds.n();
  const int r = setup->noise.Sample(rng);
  absl::StatusOr<std::vector<int>> summaries =
      internal::UserSummaries(mech, ds);
  if (!summaries.ok()) return summaries.status();
  const std::vector<int> counts =
      internal::SummaryHistogram(*summaries, mech.max_summary());
  internal::CountSummaryStability stability(
      mech, {setup->params.eps_bar, setup->params.delta_bar});
  std::int64_t budget_left = budget;
  absl::StatusOr<std::vector<internal::RemovalClass>> classes =
      internal::StableRemovalClasses(stability, counts, r, kappa, budget_left);
  if (!classes.ok()) return classes.status();
  if (classes->empty()) return std::optional<int>();

  const std::vector<double> class_probs =
      internal::ClassProbabilities(*classes);
  const std::vector<int>& d = (*classes)[rng.Categorical(class_probs)].removed;
  std::vector<bool> in_s(n, false);
  for (std::size_t v = 0; v < counts.size(); ++v) {
    if (d[v] == 0) continue;
    std::vector<int> holders;
    for (int i = 0; i < n; ++i) {
      if ((*summaries)[i] == static_cast<int>(v)) holders.push_back(i);
    }
    const std::vector<bool> pick =
        rng.Subset(static_cast<int>(holders.size()), d[v]);
    for (std::size_t j = 0; j < holders.size(); ++j) {
      if (pick[j]) in_s[holders[j]] = true;
    }
  }
  std::vector<int> outside;
  for (int i = 0; i < n; ++i) {
    if (!in_s[i]) outside.push_back(i);
  }
  std::vector<bool> in_t = in_s;
  const std::vector<bool> pick =
      rng.Subset(static_cast<int>(outside.size()), 4 * kappa - r);
  for (std::size_t j = 0; j < outside.size(); ++j) {
    if (pick[j]) in_t[outside[j]] = true;
  }
  absl::StatusOr<FiniteDistribution> out = mech.Evaluate(ds.WithoutUsers(in_t));
  if (!out.ok()) return out.status();
  return std::optional<int>(static_cast<int>(rng.Sample(*out)));
}

// One run of DelStab on an arbitrary exact mechanism, enumerating every
// candidate set S of the drawn size and checking LDDP at x without S by
// subset enumeration. Fails with ResourceExhausted when the enumeration
// exceeds `budget` mechanism evaluations.
inline absl::StatusOr<std::optional<int>> DelStabRun(
    const ExactMechanism& mech, const Dataset& ds, const PrivacyParams& pp,
    Rng& rng, std::int64_t budget = kDefaultBudget) {
  absl::StatusOr<internal::DelStabSetup> setup =
      internal::PrepareDelStab(mech, ds, pp);
  if (!setup.ok()) return setup.status();
  const int kappa = setup->params.kappa;
  const int n = ds.n();
  const int r = setup->noise.Sample(rng);
  const double work =
      internal::Choose(n, r) * internal::Choose(n - r, 4 * kappa - r);
  if (work > static_cast<double>(budget)) {
    return internal::BudgetExceeded(work, budget, "DelStab stable-set search");
  }
  const PrivacyParams inner{setup->params.eps_bar, setup->params.delta_bar};
  std::vector<std::vector<int>> stable;
  absl::Status status = internal::ForEachSubset(
      n, r, [&](const std::vector<int>& idx) -> absl::Status {
        absl::StatusOr<bool> ok =
            LddpCheck(mech, ds.WithoutUsers(internal::MaskFromIndices(n, idx)),
                      4 * kappa - r, inner, budget);
        if (!ok.ok()) return ok.status();
        if (*ok) stable.push_back(idx);
        return absl::OkStatus();
      });
  if (!status.ok()) return status;
  if (stable.empty()) return std::optional<int>();

  const std::vector<int>& s =
      stable[rng.UniformInt(static_cast<std::uint64_t>(stable.size()))];
  std::vector<bool> in_t = internal::MaskFromIndices(n, s);
  std::vector<int> outside;
  for (int i = 0; i < n; ++i) {
    if (!in_t[i]) outside.push_back(i);
  }
  const std::vector<bool> pick =
      rng.Subset(static_cast<int>(outside.size()), 4 * kappa - r);
  for (std::size_t j = 0; j < outside.size(); ++j) {
    if (pick[j]) in_t[outside[j]] = true;
  }
  absl::StatusOr<FiniteDistribution> out = mech.Evaluate(ds.WithoutUsers(in_t));
  if (!out.ok()) return out.status();
  return std::optional<int>(static_cast<int>(rng.Sample(*out)));
}

}  // namespace user_dp

#endif  // USER_DP_DELSTAB_H_
