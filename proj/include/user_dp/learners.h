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

// User-level pure-DP learners built on the exponential mechanism: PAC
// learning through probabilistic representations, hypothesis selection,
// discrete distribution learning over grid covers and agnostic PAC learning,
// plus the two trivial item/user reductions used as baselines.

#ifndef USER_DP_LEARNERS_H_
#define USER_DP_LEARNERS_H_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <utility>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/str_cat.h"
#include "user_dp/core.h"
#include "user_dp/combinatorics.h"
#include "user_dp/em.h"
#include "user_dp/random.h"

namespace user_dp {

// A distribution over finite hypothesis sets. `size_bound` bounds the natural
// log of every sampled set's size.
struct ProbabilisticRepresentation {
  std::function<std::vector<Concept>(Rng&)> sampler;
  double size_bound = 0.0;
};

// Thresholds over {0, ..., domain_size - 1}: c_t(x) = 1[x >= t] for
// t = 0, ..., domain_size.
inline std::vector<Concept> ThresholdConcepts(int domain_size) {
  std::vector<Concept> concepts;
  for (int t = 0; t <= domain_size; ++t) {
    Concept c(domain_size);
    for (int x = 0; x < domain_size; ++x) c[x] = x >= t ? 1 : 0;
    concepts.push_back(std::move(c));
  }
  return concepts;
}

// Always returns the whole class; size is ln |C|.
inline ProbabilisticRepresentation PointMassRepresentation(
    std::vector<Concept> concepts) {
  const double size = std::log(static_cast<double>(concepts.size()));
  return {[concepts = std::move(concepts)](Rng&) { return concepts; }, size};
}

// `sample_size` concepts drawn uniformly without replacement from the class.
inline ProbabilisticRepresentation RandomSubsetRepresentation(
    std::vector<Concept> concepts, int sample_size) {
  sample_size = std::clamp(sample_size, 1, static_cast<int>(concepts.size()));
  const double size = std::log(static_cast<double>(sample_size));
  return {[concepts = std::move(concepts), sample_size](Rng& rng) {
            const std::vector<bool> pick =
                rng.Subset(static_cast<int>(concepts.size()), sample_size);
            std::vector<Concept> out;
            for (std::size_t i = 0; i < concepts.size(); ++i) {
              if (pick[i]) out.push_back(concepts[i]);
            }
            return out;
          },
          size};
}

namespace internal {

inline absl::StatusOr<std::vector<Concept>> DrawHypotheses(
    const ProbabilisticRepresentation& pr, Rng& rng) {
  if (!pr.sampler) return absl::InvalidArgumentError("representation is empty");
  std::vector<Concept> hypotheses = pr.sampler(rng);
  if (hypotheses.empty()) {
    return absl::InvalidArgumentError("representation drew an empty set");
  }
  if (std::log(static_cast<double>(hypotheses.size())) >
      pr.size_bound + kIdentityTolerance) {
    return absl::InvalidArgumentError(absl::StrCat(
        "drew ", hypotheses.size(), " hypotheses, above the size bound ",
        pr.size_bound));
  }
  return hypotheses;
}

}  // namespace internal

// Keeps the first `items` examples of every user.
inline absl::StatusOr<Dataset> TruncateItems(const Dataset& ds, int items) {
  if (items < 1 || items > ds.m()) {
    return absl::InvalidArgumentError("item count outside [1, m]");
  }
  std::vector<UserRecord> users;
  users.reserve(ds.n());
  for (const UserRecord& u : ds.users()) {
    users.emplace_back(u.begin(), u.begin() + items);
  }
  return Dataset::Create(ds.universe_size(), items, std::move(users));
}

// Examples per user that the PAC learner uses: min(m, floor(1/alpha)).
inline int PacItemsPerUser(int m, double alpha) {
  return std::max(1, std::min(m, static_cast<int>(std::floor(1.0 / alpha))));
}

// Users needed by the PAC learner: ceil(kappa * size / (eps alpha m')) with
// m' = PacItemsPerUser(m, alpha). `kappa` is the unspecified constant.
inline absl::StatusOr<int> PacUserCount(double size_bound, double eps,
                                        double alpha, int m,
                                        double kappa = 1.0) {
  if (!(eps > 0.0) || !(alpha > 0.0 && alpha < 1.0) || m < 1 ||
      !(kappa > 0.0) || !(size_bound >= 0.0)) {
    return absl::InvalidArgumentError("invalid PAC user-count parameters");
  }
  const int used = PacItemsPerUser(m, alpha);
  return std::max(
      1, static_cast<int>(std::ceil(kappa * size_bound / (eps * alpha * used))));
}

// Selection law of the PAC learner for a fixed hypothesis set.
inline absl::StatusOr<FiniteDistribution> PacSelectionDistribution(
    const std::vector<Concept>& hypotheses, const Dataset& ds, double eps) {
  absl::StatusOr<ScoreVector> sv = PacScores(hypotheses, ds);
  if (!sv.ok()) return sv.status();
  return ExponentialMechanismDistribution(*sv, eps);
}

// Draws H from the representation and runs the exponential mechanism with
// the clipped PAC score (sensitivity 1). When `alpha` is positive, users keep
// only their first PacItemsPerUser(m, alpha) examples.
inline absl::StatusOr<Concept> PacLearn(const ProbabilisticRepresentation& pr,
                                        const Dataset& ds, double eps,
                                        Rng& rng, double alpha = 0.0) {
  absl::StatusOr<std::vector<Concept>> hypotheses =
      internal::DrawHypotheses(pr, rng);
  if (!hypotheses.ok()) return hypotheses.status();
  if (hypotheses->size() == 1) return hypotheses->front();
  Dataset data = ds;
  if (alpha > 0.0 && ds.n() > 0) {
    absl::StatusOr<Dataset> truncated =
        TruncateItems(ds, PacItemsPerUser(ds.m(), alpha));
    if (!truncated.ok()) return truncated.status();
    data = *std::move(truncated);
  }
  absl::StatusOr<ScoreVector> sv = PacScores(*hypotheses, data);
  if (!sv.ok()) return sv.status();
  absl::StatusOr<int> index = ExponentialMechanismSelect(*sv, eps, rng);
  if (!index.ok()) return index.status();
  return (*hypotheses)[*index];
}

// Selection law of clipped pairwise Scheffe scoring with
// tau = DefaultTau(alpha, m, c_tau) and sensitivity 2 tau.
inline absl::StatusOr<FiniteDistribution> HypothesisSelectDistribution(
    const ScheffeScorer& scorer, const Dataset& ds, double eps, double alpha,
    double c_tau = 1.0) {
  absl::StatusOr<double> tau = DefaultTau(alpha, ds.m(), c_tau);
  if (!tau.ok()) return tau.status();
  absl::StatusOr<ScoreVector> sv = scorer.Scores(ds, *tau);
  if (!sv.ok()) return sv.status();
  return ExponentialMechanismDistribution(*sv, eps);
}

inline absl::StatusOr<int> HypothesisSelect(const ScheffeScorer& scorer,
                                            const Dataset& ds, double eps,
                                            double alpha, double c_tau,
                                            Rng& rng) {
  absl::StatusOr<FiniteDistribution> pmf =
      HypothesisSelectDistribution(scorer, ds, eps, alpha, c_tau);
  if (!pmf.ok()) return pmf.status();
  return static_cast<int>(rng.Sample(*pmf));
}

inline absl::StatusOr<int> HypothesisSelect(
    std::vector<FiniteDistribution> candidates, const Dataset& ds, double eps,
    double alpha, double c_tau, Rng& rng) {
  absl::StatusOr<ScheffeScorer> scorer =
      ScheffeScorer::Create(std::move(candidates));
  if (!scorer.ok()) return scorer.status();
  return HypothesisSelect(*scorer, ds, eps, alpha, c_tau, rng);
}

// All pmfs over {0, ..., k - 1} whose masses are multiples of
// 1 / denominator.
struct GridCover {
  int k = 0;
  int denominator = 0;
  std::vector<FiniteDistribution> members;

  double resolution() const { return 1.0 / denominator; }
};

// C(denominator + k - 1, k - 1), the number of grid pmfs.
inline double GridCoverSize(int k, int denominator) {
  return internal::Choose(denominator + k - 1, k - 1);
}

inline absl::StatusOr<GridCover> GridCoverWithDenominator(
    int k, int denominator, std::int64_t budget = kDefaultBudget) {
  if (k < 2) return absl::InvalidArgumentError("grid cover needs k >= 2");
  if (denominator < 1) {
    return absl::InvalidArgumentError("grid denominator must be >= 1");
  }
  const double size = GridCoverSize(k, denominator);
  if (size > static_cast<double>(budget)) {
    return internal::BudgetExceeded(size, budget, "grid cover");
  }
  GridCover cover{k, denominator, {}};
  cover.members.reserve(static_cast<std::size_t>(size));
  std::vector<int> caps(k, denominator);
  absl::Status status = internal::ForEachBoundedComposition(
      caps, denominator, [&](const std::vector<int>& parts) -> absl::Status {
        std::vector<double> masses(k);
        for (int z = 0; z < k; ++z) {
          masses[z] = static_cast<double>(parts[z]) / denominator;
        }
        absl::StatusOr<FiniteDistribution> member =
            FiniteDistribution::Create(std::move(masses));
        if (!member.ok()) return member.status();
        cover.members.push_back(*std::move(member));
        return absl::OkStatus();
      });
  if (!status.ok()) return status;
  return cover;
}

// Grid with resolution 1 / ceil(10 k / alpha); every pmf over k symbols lies
// within TV k / (2 ceil(10 k / alpha)) <= 0.05 alpha of a member.
inline absl::StatusOr<GridCover> BuildGridCover(
    int k, double alpha, std::int64_t budget = kDefaultBudget) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    return absl::InvalidArgumentError("alpha must lie in (0, 1)");
  }
  const double denominator = std::ceil(10.0 * k / alpha);
  if (denominator > 1e9) {
    return absl::InvalidArgumentError("grid resolution too fine");
  }
  return GridCoverWithDenominator(k, static_cast<int>(denominator), budget);
}

// Largest-remainder rounding of `p` to multiples of 1 / denominator; every
// coordinate moves by less than 1 / denominator.
inline std::vector<int> RoundToGrid(const FiniteDistribution& p,
                                    int denominator) {
  const std::size_t k = p.size();
  std::vector<int> units(k);
  std::vector<std::pair<double, std::size_t>> remainders(k);
  int assigned = 0;
  for (std::size_t z = 0; z < k; ++z) {
    const double scaled = p[z] * denominator;
    units[z] = static_cast<int>(std::floor(scaled));
    remainders[z] = {scaled - units[z], z};
    assigned += units[z];
  }
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (int i = 0; assigned < denominator; ++i, ++assigned) {
    ++units[remainders[i % k].second];
  }
  while (assigned > denominator) {
    // Only reachable through rounding in p; trim the largest coordinate.
    auto it = std::max_element(units.begin(), units.end());
    --*it;
    --assigned;
  }
  return units;
}

// Private discrete distribution learner over {0, ..., k - 1}: hypothesis
// selection over the grid cover for (k, alpha). Scheffe sets of the cover are
// precomputed once.
class DiscreteDistributionLearner {
 public:
  static absl::StatusOr<DiscreteDistributionLearner> Create(
      int k, double alpha, std::int64_t budget = kDefaultBudget) {
    absl::StatusOr<GridCover> cover = BuildGridCover(k, alpha, budget);
    if (!cover.ok()) return cover.status();
    return FromCover(*std::move(cover), alpha);
  }

  static absl::StatusOr<DiscreteDistributionLearner> FromCover(
      GridCover cover, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) {
      return absl::InvalidArgumentError("alpha must lie in (0, 1)");
    }
    absl::StatusOr<ScheffeScorer> scorer = ScheffeScorer::Create(cover.members);
    if (!scorer.ok()) return scorer.status();
    return DiscreteDistributionLearner(cover.k, alpha, *std::move(scorer));
  }

  int k() const { return k_; }
  double alpha() const { return alpha_; }
  const std::vector<FiniteDistribution>& members() const {
    return scorer_.candidates();
  }
  const ScheffeScorer& scorer() const { return scorer_; }

  // Law of the selected cover index.
  absl::StatusOr<FiniteDistribution> SelectionDistribution(
      const Dataset& ds, double eps, double c_tau = 1.0) const {
    if (ds.universe_size() != k_) {
      return absl::InvalidArgumentError(absl::StrCat(
          "dataset universe ", ds.universe_size(), " is not [", k_, "]"));
    }
    return HypothesisSelectDistribution(scorer_, ds, eps, alpha_, c_tau);
  }

  absl::StatusOr<FiniteDistribution> Learn(const Dataset& ds, double eps,
                                           double c_tau, Rng& rng) const {
    absl::StatusOr<FiniteDistribution> pmf =
        SelectionDistribution(ds, eps, c_tau);
    if (!pmf.ok()) return pmf.status();
    return members()[rng.Sample(*pmf)];
  }

 private:
  DiscreteDistributionLearner(int k, double alpha, ScheffeScorer scorer)
      : k_(k), alpha_(alpha), scorer_(std::move(scorer)) {}

  int k_;
  double alpha_;
  ScheffeScorer scorer_;
};

inline absl::StatusOr<FiniteDistribution> LearnDiscrete(
    const Dataset& ds, int k, double alpha, double eps, double c_tau,
    Rng& rng) {
  absl::StatusOr<DiscreteDistributionLearner> learner =
      DiscreteDistributionLearner::Create(k, alpha);
  if (!learner.ok()) return learner.status();
  return learner->Learn(ds, eps, c_tau, rng);
}

// Selection law of the agnostic learner for a fixed hypothesis set.
inline absl::StatusOr<FiniteDistribution> AgnosticSelectionDistribution(
    const std::vector<Concept>& hypotheses, const Dataset& ds, double eps,
    double alpha, double c_tau = 1.0) {
  if (hypotheses.size() == 1) return FiniteDistribution::PointMass(1, 0);
  absl::StatusOr<ComparisonFamily> family = AgnosticFamily(hypotheses);
  if (!family.ok()) return family.status();
  absl::StatusOr<double> tau = DefaultTau(alpha, ds.m(), c_tau);
  if (!tau.ok()) return tau.status();
  absl::StatusOr<ScoreVector> sv = PairwiseClippedScores(*family, ds, *tau);
  if (!sv.ok()) return sv.status();
  return ExponentialMechanismDistribution(*sv, eps);
}

// Draws H from the representation and runs clipped pairwise EM with the
// agnostic comparison family.
inline absl::StatusOr<Concept> AgnosticPacLearn(
    const ProbabilisticRepresentation& pr, const Dataset& ds, double eps,
    double alpha, double c_tau, Rng& rng) {
  absl::StatusOr<std::vector<Concept>> hypotheses =
      internal::DrawHypotheses(pr, rng);
  if (!hypotheses.ok()) return hypotheses.status();
  if (hypotheses->size() == 1) return hypotheses->front();
  absl::StatusOr<FiniteDistribution> pmf =
      AgnosticSelectionDistribution(*hypotheses, ds, eps, alpha, c_tau);
  if (!pmf.ok()) return pmf.status();
  return (*hypotheses)[rng.Sample(*pmf)];
}

// Keeps one example per user.
inline Dataset BaselineDiscard(const Dataset& ds) {
  std::vector<UserRecord> users;
  users.reserve(ds.n());
  for (const UserRecord& u : ds.users()) users.push_back({u.front()});
  return *Dataset::Create(ds.universe_size(), 1, std::move(users));
}

// Concatenates all examples in user order and regroups them into users of
// `m_group` examples each.
inline absl::StatusOr<Dataset> BaselineGroup(const Dataset& ds, int m_group) {
  if (m_group < 1) return absl::InvalidArgumentError("m_group must be >= 1");
  const long total = static_cast<long>(ds.n()) * ds.m();
  if (total % m_group != 0) {
    return absl::InvalidArgumentError(absl::StrCat(
        "total item count ", total, " is not divisible by ", m_group));
  }
  std::vector<UserRecord> users;
  UserRecord current;
  for (const UserRecord& u : ds.users()) {
    for (int item : u) {
      current.push_back(item);
      if (static_cast<int>(current.size()) == m_group) {
        users.push_back(std::move(current));
        current.clear();
      }
    }
  }
  return Dataset::Create(ds.universe_size(), m_group, std::move(users));
}

// n users with m i.i.d. draws from `d` each.
inline Dataset SampleDataset(const FiniteDistribution& d, int n, int m,
                             Rng& rng) {
  std::vector<UserRecord> users(n, UserRecord(m));
  for (UserRecord& u : users) {
    for (int& item : u) item = static_cast<int>(rng.Sample(d));
  }
  return *Dataset::Create(static_cast<int>(d.size()), m, std::move(users));
}

}  // namespace user_dp

#endif  // USER_DP_LEARNERS_H_
