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

// Brute-force and sampled verification of user-level and item-level DP for
// exact mechanisms, and an empirical estimator of sample perfect
// generalization.

#ifndef USER_DP_AUDIT_H_
#define USER_DP_AUDIT_H_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/str_cat.h"
#include "boost/math/special_functions/beta.hpp"
#include "user_dp/combinatorics.h"
#include "user_dp/core.h"
#include "user_dp/learners.h"
#include "user_dp/mechanism.h"
#include "user_dp/random.h"

namespace user_dp {

enum class AuditMode { kExhaustive, kSampled };

inline const char* AuditModeName(AuditMode mode) {
  return mode == AuditMode::kExhaustive ? "exhaustive" : "sampled";
}

// Outcome of a DP audit. The verdict passes iff
// max_divergence <= delta + tolerance.
struct AuditReport {
  AuditMode mode = AuditMode::kExhaustive;
  std::string neighbor_relation;  // "user" or "item"
  double epsilon = 0.0;
  double delta = 0.0;
  std::int64_t budget = 0;
  std::uint64_t seed = 0;
  std::int64_t datasets_checked = 0;
  std::int64_t pairs_checked = 0;
  // max over pairs of both hockey-stick divergences at epsilon.
  double max_divergence = 0.0;
  // max over pairs and outputs of |ln P(o) - ln P'(o)|.
  double max_log_ratio = 0.0;
  std::optional<std::pair<Dataset, Dataset>> worst_pair;
  double tolerance = kDivergenceTolerance;
  bool pass = true;
};

namespace internal {

class AuditAccumulator {
 public:
  explicit AuditAccumulator(AuditReport& report) : report_(report) {}

  absl::Status Add(const FiniteDistribution& a, const FiniteDistribution& b,
                   const Dataset& da, const Dataset& db) {
    absl::StatusOr<double> forward = HockeyStick(a, b, report_.epsilon);
    if (!forward.ok()) return forward.status();
    absl::StatusOr<double> backward = HockeyStick(b, a, report_.epsilon);
    if (!backward.ok()) return backward.status();
    absl::StatusOr<double> log_ratio = MaxLogRatio(a, b);
    if (!log_ratio.ok()) return log_ratio.status();
    ++report_.pairs_checked;
    const double divergence = std::max(*forward, *backward);
    if (!report_.worst_pair.has_value() ||
        divergence > report_.max_divergence) {
      report_.max_divergence = std::max(report_.max_divergence, divergence);
      report_.worst_pair = std::make_pair(da, db);
    }
    report_.max_log_ratio = std::max(report_.max_log_ratio, *log_ratio);
    return absl::OkStatus();
  }

  void Finish() {
    report_.pass =
        report_.max_divergence <= report_.delta + report_.tolerance;
  }

 private:
  AuditReport& report_;
};

inline absl::StatusOr<double> CheckedPower(int base, int exponent) {
  const double value = std::pow(static_cast<double>(base), exponent);
  if (!std::isfinite(value) || value > 9e15) {
    return absl::ResourceExhaustedError(
        "audit infeasible at this size: dataset space too large");
  }
  return value;
}

// Decodes dataset `index` in base `universe` over n * m item slots.
inline Dataset DecodeDataset(std::int64_t index, int universe, int n, int m) {
  std::vector<UserRecord> users(n, UserRecord(m));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < m; ++j) {
      users[i][j] = static_cast<int>(index % universe);
      index /= universe;
    }
  }
  return *Dataset::Create(universe, m, std::move(users));
}

inline absl::Status CheckAuditShape(const ExactMechanism& mech, int universe,
                                    int n, int m) {
  if (universe != mech.universe_size() || n != mech.input_users() ||
      m != mech.items_per_user()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "audit shape (|Z|=", universe, ", n=", n, ", m=", m,
        ") does not match the mechanism (|Z|=", mech.universe_size(),
        ", n=", mech.input_users(), ", m=", mech.items_per_user(), ")"));
  }
  if (n < 1) return absl::InvalidArgumentError("audit needs n >= 1");
  return absl::OkStatus();
}

// Neighbor relation: user-level neighbors replace one user's whole record
// (slots i*m .. i*m+m-1); item-level neighbors replace a single slot.
inline absl::StatusOr<AuditReport> RunAudit(
    const ExactMechanism& mech, int universe, int n, int m,
    const PrivacyParams& pp, AuditMode mode, std::int64_t budget,
    std::uint64_t seed, bool user_level,
    const std::optional<FiniteDistribution>& replacement) {
  if (absl::Status s = CheckAuditShape(mech, universe, n, m); !s.ok()) {
    return s;
  }
  if (!(pp.epsilon >= 0.0) || !(pp.delta >= 0.0 && pp.delta < 1.0)) {
    return absl::InvalidArgumentError("invalid privacy parameters");
  }
  if (budget < 1) return absl::InvalidArgumentError("budget must be >= 1");
  if (replacement.has_value() &&
      replacement->size() != static_cast<std::size_t>(universe)) {
    return absl::InvalidArgumentError(
        "replacement distribution must cover the universe");
  }
  AuditReport report;
  report.mode = mode;
  report.neighbor_relation = user_level ? "user" : "item";
  report.epsilon = pp.epsilon;
  report.delta = pp.delta;
  report.budget = budget;
  report.seed = seed;
  AuditAccumulator acc(report);

  const int block = user_level ? m : 1;
  const int blocks = user_level ? n : n * m;
  absl::StatusOr<double> block_values = CheckedPower(universe, block);
  if (!block_values.ok()) return block_values.status();
  const auto values = static_cast<std::int64_t>(*block_values);

  if (mode == AuditMode::kExhaustive) {
    absl::StatusOr<double> datasets = CheckedPower(universe, n * m);
    if (!datasets.ok()) return datasets.status();
    const double ordered_pairs = *datasets * blocks * (values - 1);
    if (*datasets + ordered_pairs > static_cast<double>(budget)) {
      return BudgetExceeded(*datasets + ordered_pairs, budget,
                            "exhaustive neighbor enumeration");
    }
    const auto count = static_cast<std::int64_t>(*datasets);
    std::vector<std::optional<FiniteDistribution>> cache;
    if (!mech.reduces_pairs()) cache.resize(count);
    auto law = [&](std::int64_t index,
                   const Dataset& ds) -> absl::StatusOr<FiniteDistribution> {
      if (!cache[index].has_value()) {
        absl::StatusOr<FiniteDistribution> out = mech.Evaluate(ds);
        if (!out.ok()) return out.status();
        cache[index] = *std::move(out);
      }
      return *cache[index];
    };
    for (std::int64_t index = 0; index < count; ++index) {
      const Dataset ds = DecodeDataset(index, universe, n, m);
      ++report.datasets_checked;
      std::int64_t stride = 1;
      for (int b = 0; b < blocks; ++b) {
        const std::int64_t current = index / stride % values;
        // Each unordered pair once: only raise the block's value.
        for (std::int64_t v = current + 1; v < values; ++v) {
          const std::int64_t other = index + (v - current) * stride;
          const Dataset neighbor = DecodeDataset(other, universe, n, m);
          absl::StatusOr<ExactMechanism::DistributionPair> pair;
          if (mech.reduces_pairs()) {
            pair = mech.EvaluatePair(ds, neighbor);
          } else {
            absl::StatusOr<FiniteDistribution> a = law(index, ds);
            if (!a.ok()) return a.status();
            absl::StatusOr<FiniteDistribution> b = law(other, neighbor);
            if (!b.ok()) return b.status();
            pair = ExactMechanism::DistributionPair(*std::move(a),
                                                    *std::move(b));
          }
          if (!pair.ok()) return pair.status();
          if (absl::Status s = acc.Add(pair->first, pair->second, ds, neighbor);
              !s.ok()) {
            return s;
          }
        }
        stride *= values;
      }
    }
  } else {
    const FiniteDistribution uniform = FiniteDistribution::Uniform(universe);
    const FiniteDistribution& fresh =
        replacement.has_value() ? *replacement : uniform;
    for (std::int64_t j = 0; j < budget; ++j) {
      Rng rng(DeriveSeed(seed, static_cast<std::uint64_t>(j)));
      const Dataset ds = SampleDataset(uniform, n, m, rng);
      const int b = static_cast<int>(rng.UniformInt(blocks));
      UserRecord record = ds.user(user_level ? b : b / m);
      if (user_level) {
        for (int& item : record) item = static_cast<int>(rng.Sample(fresh));
      } else {
        record[b % m] = static_cast<int>(rng.Sample(fresh));
      }
      const Dataset neighbor =
          ds.WithUser(user_level ? b : b / m, std::move(record));
      absl::StatusOr<ExactMechanism::DistributionPair> pair =
          mech.EvaluatePair(ds, neighbor);
      if (!pair.ok()) return pair.status();
      ++report.datasets_checked;
      if (absl::Status s = acc.Add(pair->first, pair->second, ds, neighbor);
          !s.ok()) {
        return s;
      }
    }
  }
  acc.Finish();
  return report;
}

}  // namespace internal

// Checks (eps, delta)-user-level DP over datasets of n users with m items
// each. Exhaustive mode visits every dataset in the universe^(nm) space and
// every single-user replacement; sampled mode checks `budget` random pairs,
// pair j drawn from its own stream DeriveSeed(seed, j), with replacement
// records drawn item-wise from `replacement` (uniform by default).
inline absl::StatusOr<AuditReport> VerifyUserDp(
    const ExactMechanism& mech, int universe_size, int n, int m,
    const PrivacyParams& pp, AuditMode mode,
    std::int64_t budget = kDefaultBudget, std::uint64_t seed = 0,
    const std::optional<FiniteDistribution>& replacement = std::nullopt) {
  return internal::RunAudit(mech, universe_size, n, m, pp, mode, budget, seed,
                            /*user_level=*/true, replacement);
}

// As VerifyUserDp with single-item replacements.
inline absl::StatusOr<AuditReport> VerifyItemDp(
    const ExactMechanism& mech, int universe_size, int n, int m,
    const PrivacyParams& pp, AuditMode mode,
    std::int64_t budget = kDefaultBudget, std::uint64_t seed = 0,
    const std::optional<FiniteDistribution>& replacement = std::nullopt) {
  return internal::RunAudit(mech, universe_size, n, m, pp, mode, budget, seed,
                            /*user_level=*/false, replacement);
}

// Two-sided exact binomial (Clopper-Pearson) interval.
struct BinomialInterval {
  double lower;
  double upper;
};

inline BinomialInterval ClopperPearson(std::int64_t successes,
                                       std::int64_t trials,
                                       double confidence = 0.95) {
  const double tail = (1.0 - confidence) / 2.0;
  const auto k = static_cast<double>(successes);
  const auto n = static_cast<double>(trials);
  BinomialInterval ci{0.0, 1.0};
  if (successes > 0) ci.lower = boost::math::ibeta_inv(k, n - k + 1.0, tail);
  if (successes < trials) {
    ci.upper = boost::math::ibeta_inv(k + 1.0, n - k, 1.0 - tail);
  }
  return ci;
}

struct SpgEstimate {
  std::int64_t successes = 0;
  std::int64_t trials = 0;
  double fraction = 0.0;
  BinomialInterval interval{0.0, 1.0};  // 95% Clopper-Pearson
};

// Fraction of independent dataset pairs x, x' ~ d^n (n users holding one
// item each) with mech(x) and mech(x') (eps', delta')-indistinguishable.
// Trial t uses the stream DeriveSeed(seed, t).
inline absl::StatusOr<SpgEstimate> EstimateSamplePerfectGeneralization(
    const ExactMechanism& mech, const FiniteDistribution& d, int n_samples,
    const PrivacyParams& pp_prime, std::int64_t trials, std::uint64_t seed) {
  if (mech.items_per_user() != 1 || mech.input_users() != n_samples) {
    return absl::InvalidArgumentError(
        "mechanism must take n_samples users holding one item each");
  }
  if (d.size() != static_cast<std::size_t>(mech.universe_size())) {
    return absl::InvalidArgumentError("d must cover the mechanism's universe");
  }
  if (trials < 1) return absl::InvalidArgumentError("trials must be >= 1");
  SpgEstimate estimate;
  estimate.trials = trials;
  for (std::int64_t t = 0; t < trials; ++t) {
    Rng rng(DeriveSeed(seed, static_cast<std::uint64_t>(t)));
    const Dataset x = SampleDataset(d, n_samples, 1, rng);
    const Dataset x2 = SampleDataset(d, n_samples, 1, rng);
    absl::StatusOr<ExactMechanism::DistributionPair> pair =
        mech.EvaluatePair(x, x2);
    if (!pair.ok()) return pair.status();
    absl::StatusOr<bool> close =
        ApproxIndistinguishable(pair->first, pair->second, pp_prime);
    if (!close.ok()) return close.status();
    if (*close) ++estimate.successes;
  }
  estimate.fraction =
      static_cast<double>(estimate.successes) / static_cast<double>(trials);
  estimate.interval = ClopperPearson(estimate.successes, trials);
  return estimate;
}

}  // namespace user_dp

#endif  // USER_DP_AUDIT_H_
