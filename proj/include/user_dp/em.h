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

// The exponential mechanism and the user-level scoring functions built on it:
// the clipped PAC score and clipped pairwise comparison scores with their
// Scheffe and agnostic comparison families.

#ifndef USER_DP_EM_H_
#define USER_DP_EM_H_

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <unordered_map>
#include <utility>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/str_cat.h"
#include "user_dp/core.h"
#include "user_dp/random.h"

namespace user_dp {

// One score per candidate, lower is better, together with the user-level
// sensitivity shared by all scores.
struct ScoreVector {
  std::vector<double> scores;
  double sensitivity = 1.0;
};

// mass(H) proportional to exp(-eps * score_H / (2 * sensitivity)), normalized
// in log space after subtracting the maximum exponent.
inline absl::StatusOr<FiniteDistribution> ExponentialMechanismDistribution(
    const ScoreVector& sv, double eps) {
  if (sv.scores.empty()) {
    return absl::InvalidArgumentError("empty candidate set");
  }
  if (!(sv.sensitivity > 0.0) || !std::isfinite(sv.sensitivity)) {
    return absl::InvalidArgumentError("sensitivity must be positive");
  }
  if (!(eps > 0.0) || !std::isfinite(eps)) {
    return absl::InvalidArgumentError("eps must be positive");
  }
  std::vector<double> log_weights(sv.scores.size());
  double top = -kInfinity;
  for (std::size_t i = 0; i < sv.scores.size(); ++i) {
    if (!std::isfinite(sv.scores[i])) {
      return absl::InvalidArgumentError(
          absl::StrCat("score ", i, " is not finite"));
    }
    log_weights[i] = -eps * sv.scores[i] / (2.0 * sv.sensitivity);
    top = std::max(top, log_weights[i]);
  }
  for (double& w : log_weights) w = std::exp(w - top);
  return FiniteDistribution::FromWeights(std::move(log_weights));
}

inline absl::StatusOr<int> ExponentialMechanismSelect(const ScoreVector& sv,
                                                      double eps, Rng& rng) {
  absl::StatusOr<FiniteDistribution> pmf =
      ExponentialMechanismDistribution(sv, eps);
  if (!pmf.ok()) return pmf.status();
  return static_cast<int>(rng.Sample(*pmf));
}

// Universe of labeled examples (x, y) with x in {0, ..., domain_size - 1} and
// y in {0, 1}, indexed as item = 2x + y.
struct LabeledUniverse {
  int domain_size = 0;

  int size() const { return 2 * domain_size; }
  static int Item(int x, int y) { return 2 * x + y; }
  static int Point(int item) { return item / 2; }
  static int Label(int item) { return item % 2; }
};

// A binary concept, labels[x] in {0, 1}.
using Concept = std::vector<int>;

inline bool IsConsistent(const Concept& c, int item) {
  return c[LabeledUniverse::Point(item)] == LabeledUniverse::Label(item);
}

// Err_D(c) for a distribution over the labeled universe.
inline double ConceptError(const Concept& c, const FiniteDistribution& d) {
  double err = 0.0;
  for (std::size_t z = 0; z < d.size(); ++z) {
    if (!IsConsistent(c, static_cast<int>(z))) err += d[z];
  }
  return err;
}

// Number of users with at least one example the hypothesis gets wrong. Each
// user contributes at most one, so the user-level sensitivity is 1.
template <typename ConsistentFn>
int PacScore(const Dataset& ds, ConsistentFn&& consistent) {
  int score = 0;
  for (const UserRecord& user : ds.users()) {
    for (int item : user) {
      if (!consistent(item)) {
        ++score;
        break;
      }
    }
  }
  return score;
}

inline absl::StatusOr<ScoreVector> PacScores(const std::vector<Concept>& concepts,
                                             const Dataset& ds) {
  if (concepts.empty()) return absl::InvalidArgumentError("no hypotheses");
  ScoreVector sv;
  sv.sensitivity = 1.0;
  sv.scores.reserve(concepts.size());
  for (const Concept& c : concepts) {
    if (2 * static_cast<int>(c.size()) != ds.universe_size()) {
      return absl::InvalidArgumentError(absl::StrCat(
          "concept over ", c.size(), " points does not match labeled "
          "universe of size ", ds.universe_size()));
    }
    sv.scores.push_back(
        PacScore(ds, [&c](int item) { return IsConsistent(c, item); }));
  }
  return sv;
}

// Comparison functions psi(H, H', z) in [-1, 1] over a candidate set and a
// finite universe.
class ComparisonFamily {
 public:
  using Psi = std::function<double(int, int, int)>;

  // Checks |psi| <= 1 on every (H, H', z) when there are at most
  // kExhaustiveCheckLimit triples, and on that many seeded random triples
  // otherwise.
  static constexpr std::int64_t kExhaustiveCheckLimit = 1 << 20;

  static absl::StatusOr<ComparisonFamily> Create(int candidate_count,
                                                 int universe_size, Psi psi) {
    if (candidate_count < 1 || universe_size < 1) {
      return absl::InvalidArgumentError(
          "comparison family needs candidates and a universe");
    }
    auto check = [&](int h, int h2, int z) -> absl::Status {
      const double v = psi(h, h2, z);
      if (!(std::abs(v) <= 1.0)) {
        return absl::InvalidArgumentError(absl::StrCat(
            "psi(", h, ", ", h2, ", ", z, ") = ", v, " lies outside [-1, 1]"));
      }
      return absl::OkStatus();
    };
    const std::int64_t triples = static_cast<std::int64_t>(candidate_count) *
                                 candidate_count * universe_size;
    if (triples <= kExhaustiveCheckLimit) {
      for (int h = 0; h < candidate_count; ++h) {
        for (int h2 = 0; h2 < candidate_count; ++h2) {
          if (h == h2) continue;
          for (int z = 0; z < universe_size; ++z) {
            if (absl::Status s = check(h, h2, z); !s.ok()) return s;
          }
        }
      }
    } else {
      Rng rng(0x5eed);
      for (std::int64_t t = 0; t < kExhaustiveCheckLimit; ++t) {
        const int h = static_cast<int>(rng.UniformInt(candidate_count));
        const int h2 = static_cast<int>(rng.UniformInt(candidate_count));
        const int z = static_cast<int>(rng.UniformInt(universe_size));
        if (absl::Status s = check(h, h2, z); !s.ok()) return s;
      }
    }
    return ComparisonFamily(candidate_count, universe_size, std::move(psi));
  }

  int candidate_count() const { return candidate_count_; }
  int universe_size() const { return universe_size_; }
  double psi(int h, int h2, int z) const { return psi_(h, h2, z); }

 private:
  ComparisonFamily(int candidate_count, int universe_size, Psi psi)
      : candidate_count_(candidate_count),
        universe_size_(universe_size),
        psi_(std::move(psi)) {}

  int candidate_count_;
  int universe_size_;
  Psi psi_;
};

namespace internal {

// Users grouped by their item multiset; per-user sums only depend on it.
struct UserProfiles {
  std::vector<std::vector<int>> item_counts;  // [profile][item]
  std::vector<int> multiplicity;              // users per profile
};

inline UserProfiles GroupUsers(const Dataset& ds) {
  std::map<std::vector<int>, int> groups;
  for (const UserRecord& user : ds.users()) {
    std::vector<int> counts(ds.universe_size(), 0);
    for (int item : user) ++counts[item];
    ++groups[std::move(counts)];
  }
  UserProfiles profiles;
  for (auto& [counts, mult] : groups) {
    profiles.item_counts.push_back(counts);
    profiles.multiplicity.push_back(mult);
  }
  return profiles;
}

}  // namespace internal

// score_H = max_{H' != H} sum_i clip_{-tau,tau}(sum_{z in x_i} psi(H, H', z)),
// declared sensitivity 2 tau.
inline absl::StatusOr<ScoreVector> PairwiseClippedScores(
    const ComparisonFamily& cf, const Dataset& ds, double tau) {
  if (!(tau > 0.0)) return absl::InvalidArgumentError("tau must be positive");
  if (cf.candidate_count() < 2) {
    return absl::InvalidArgumentError("need at least two candidates");
  }
  if (cf.universe_size() != ds.universe_size()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "family universe ", cf.universe_size(), " does not match dataset "
        "universe ", ds.universe_size()));
  }
  const internal::UserProfiles profiles = internal::GroupUsers(ds);
  std::vector<int> present;
  {
    const std::vector<int> counts = ds.ItemCounts();
    for (int z = 0; z < ds.universe_size(); ++z) {
      if (counts[z] > 0) present.push_back(z);
    }
  }
  const int k = cf.candidate_count();
  ScoreVector sv;
  sv.sensitivity = 2.0 * tau;
  sv.scores.assign(k, -kInfinity);
  std::vector<double> psi_row(ds.universe_size(), 0.0);
  for (int h = 0; h < k; ++h) {
    for (int h2 = 0; h2 < k; ++h2) {
      if (h == h2) continue;
      for (int z : present) psi_row[z] = cf.psi(h, h2, z);
      double pair_score = 0.0;
      for (std::size_t p = 0; p < profiles.multiplicity.size(); ++p) {
        double user_sum = 0.0;
        for (int z : present) {
          const int c = profiles.item_counts[p][z];
          for (int rep = 0; rep < c; ++rep) user_sum += psi_row[z];
        }
        pair_score += profiles.multiplicity[p] *
                      std::clamp(user_sum, -tau, tau);
      }
      sv.scores[h] = std::max(sv.scores[h], pair_score);
    }
  }
  return sv;
}

namespace internal {

// P(W) for W = {z : p(z) > q(z)}, summed in index order.
inline double ScheffeMass(const FiniteDistribution& p,
                          const FiniteDistribution& q) {
  double mass = 0.0;
  for (std::size_t z = 0; z < p.size(); ++z) {
    if (p[z] > q[z]) mass += p[z];
  }
  return mass;
}

inline absl::Status CheckCandidates(
    const std::vector<FiniteDistribution>& candidates) {
  if (candidates.empty()) return absl::InvalidArgumentError("no candidates");
  for (const FiniteDistribution& c : candidates) {
    if (c.size() != candidates.front().size()) {
      return absl::InvalidArgumentError(
          "candidates are defined over different domains");
    }
  }
  return absl::OkStatus();
}

}  // namespace internal

// psi_{P,P'}(z) = P(W) - 1[z in W] with W = {z : P(z) > P'(z)}, so that
// E_{z~D} psi_{P,P'}(z) = P(W) - D(W).
inline absl::StatusOr<ComparisonFamily> ScheffeFamily(
    std::vector<FiniteDistribution> candidates) {
  if (absl::Status s = internal::CheckCandidates(candidates); !s.ok()) return s;
  auto shared = std::make_shared<const std::vector<FiniteDistribution>>(
      std::move(candidates));
  const int count = static_cast<int>(shared->size());
  const int universe = static_cast<int>(shared->front().size());
  return ComparisonFamily::Create(
      count, universe, [shared](int h, int h2, int z) {
        const FiniteDistribution& p = (*shared)[h];
        const FiniteDistribution& q = (*shared)[h2];
        return internal::ScheffeMass(p, q) - (p[z] > q[z] ? 1.0 : 0.0);
      });
}

// psi_{c,c'}((x, y)) = 1[c(x) != y] - 1[c'(x) != y], whose mean under D is
// Err_D(c) - Err_D(c').
inline absl::StatusOr<ComparisonFamily> AgnosticFamily(
    std::vector<Concept> concepts) {
  if (concepts.empty()) return absl::InvalidArgumentError("no concepts");
  for (const Concept& c : concepts) {
    if (c.size() != concepts.front().size() || c.empty()) {
      return absl::InvalidArgumentError("concepts must share one domain");
    }
  }
  auto shared = std::make_shared<const std::vector<Concept>>(std::move(concepts));
  const int count = static_cast<int>(shared->size());
  const int universe = 2 * static_cast<int>(shared->front().size());
  return ComparisonFamily::Create(
      count, universe, [shared](int h, int h2, int z) {
        const double wrong = IsConsistent((*shared)[h], z) ? 0.0 : 1.0;
        const double wrong2 = IsConsistent((*shared)[h2], z) ? 0.0 : 1.0;
        return wrong - wrong2;
      });
}

// tau = c_tau * (alpha m + sqrt(m ln(1/alpha))).
inline absl::StatusOr<double> DefaultTau(double alpha, int m,
                                         double c_tau = 1.0) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    return absl::InvalidArgumentError("alpha must lie in (0, 1)");
  }
  if (m < 1) return absl::InvalidArgumentError("m must be >= 1");
  if (!(c_tau > 0.0)) return absl::InvalidArgumentError("c_tau must be > 0");
  return c_tau * (alpha * m + std::sqrt(m * std::log(1.0 / alpha)));
}

// Clipped pairwise Scheffe scores computed through Scheffe sets. A user's sum
// for the pair (P, P') is m P(W) - |x_i cap W|, so each candidate only needs
// the distinct sets W(P, P') it induces. The sets are data independent and
// precomputed once; scoring a dataset then costs
// O(candidates * distinct sets * user profiles).
class ScheffeScorer {
 public:
  static constexpr int kMaxUniverse = 64;

  static absl::StatusOr<ScheffeScorer> Create(
      std::vector<FiniteDistribution> candidates) {
    if (absl::Status s = internal::CheckCandidates(candidates); !s.ok()) {
      return s;
    }
    if (candidates.size() < 2) {
      return absl::InvalidArgumentError("need at least two candidates");
    }
    const std::size_t universe = candidates.front().size();
    if (universe > static_cast<std::size_t>(kMaxUniverse)) {
      return absl::InvalidArgumentError(
          absl::StrCat("Scheffe scorer supports universes up to ",
                       kMaxUniverse, " symbols"));
    }
    // Small universes dedupe masks with a direct-address table.
    const bool dense = universe <= 16;
    std::vector<char> seen(dense ? std::size_t{1} << universe : 0, 0);
    std::vector<std::vector<SetTerm>> terms(candidates.size());
    for (std::size_t h = 0; h < candidates.size(); ++h) {
      std::vector<std::uint64_t> masks;
      const FiniteDistribution& p = candidates[h];
      for (std::size_t h2 = 0; h2 < candidates.size(); ++h2) {
        if (h == h2) continue;
        const FiniteDistribution& q = candidates[h2];
        std::uint64_t mask = 0;
        for (std::size_t z = 0; z < universe; ++z) {
          if (p[z] > q[z]) mask |= std::uint64_t{1} << z;
        }
        if (dense) {
          if (seen[mask]) continue;
          seen[mask] = 1;
        }
        masks.push_back(mask);
      }
      if (dense) {
        for (std::uint64_t mask : masks) seen[mask] = 0;
      }
      std::sort(masks.begin(), masks.end());
      masks.erase(std::unique(masks.begin(), masks.end()), masks.end());
      for (std::uint64_t mask : masks) {
        double mass = 0.0;
        for (std::size_t z = 0; z < universe; ++z) {
          if (mask >> z & 1) mass += p[z];
        }
        terms[h].push_back({mask, mass});
      }
    }
    return ScheffeScorer(std::move(candidates), std::move(terms));
  }

  const std::vector<FiniteDistribution>& candidates() const {
    return candidates_;
  }

  absl::StatusOr<ScoreVector> Scores(const Dataset& ds, double tau) const {
    if (!(tau > 0.0)) return absl::InvalidArgumentError("tau must be positive");
    if (static_cast<std::size_t>(ds.universe_size()) !=
        candidates_.front().size()) {
      return absl::InvalidArgumentError(
          "dataset universe does not match candidate domain");
    }
    const internal::UserProfiles profiles = internal::GroupUsers(ds);
    const double m = ds.m();
    std::unordered_map<std::uint64_t, std::vector<int>> in_set_counts;
    auto counts_for = [&](std::uint64_t mask) -> const std::vector<int>& {
      auto it = in_set_counts.find(mask);
      if (it != in_set_counts.end()) return it->second;
      std::vector<int> counts(profiles.multiplicity.size(), 0);
      for (std::size_t p = 0; p < counts.size(); ++p) {
        for (int z = 0; z < ds.universe_size(); ++z) {
          if (mask >> z & 1) counts[p] += profiles.item_counts[p][z];
        }
      }
      return in_set_counts.emplace(mask, std::move(counts)).first->second;
    };
    ScoreVector sv;
    sv.sensitivity = 2.0 * tau;
    sv.scores.assign(candidates_.size(), -kInfinity);
    for (std::size_t h = 0; h < candidates_.size(); ++h) {
      for (const SetTerm& term : terms_[h]) {
        const std::vector<int>& counts = counts_for(term.mask);
        double pair_score = 0.0;
        for (std::size_t p = 0; p < counts.size(); ++p) {
          pair_score += profiles.multiplicity[p] *
                        std::clamp(m * term.mass - counts[p], -tau, tau);
        }
        sv.scores[h] = std::max(sv.scores[h], pair_score);
      }
    }
    return sv;
  }

 private:
  struct SetTerm {
    std::uint64_t mask;
    double mass;
  };

  ScheffeScorer(std::vector<FiniteDistribution> candidates,
                std::vector<std::vector<SetTerm>> terms)
      : candidates_(std::move(candidates)), terms_(std::move(terms)) {}

  std::vector<FiniteDistribution> candidates_;
  std::vector<std::vector<SetTerm>> terms_;
};

}  // namespace user_dp

#endif  // USER_DP_EM_H_
