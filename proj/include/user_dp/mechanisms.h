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

// Concrete exact mechanisms used by audits, DelStab demos and tests.

#ifndef USER_DP_MECHANISMS_H_
#define USER_DP_MECHANISMS_H_

#include <cmath>
#include <cstdint>
#include <memory>
#include <utility>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/str_cat.h"
#include "user_dp/combinatorics.h"
#include "user_dp/core.h"
#include "user_dp/em.h"
#include "user_dp/learners.h"
#include "user_dp/mechanism.h"

namespace user_dp {

// Ignores its input.
class ConstantMechanism : public ExactMechanism {
 public:
  ConstantMechanism(int universe_size, int items_per_user, int input_users,
                    FiniteDistribution output)
      : universe_size_(universe_size),
        items_per_user_(items_per_user),
        input_users_(input_users),
        output_(std::move(output)) {}

  int input_users() const override { return input_users_; }
  int items_per_user() const override { return items_per_user_; }
  int universe_size() const override { return universe_size_; }
  int output_size() const override {
    return static_cast<int>(output_.size());
  }

  absl::StatusOr<FiniteDistribution> Evaluate(const Dataset& ds) const override {
    if (absl::Status s = CheckInput(ds); !s.ok()) return s;
    return output_;
  }

 private:
  int universe_size_;
  int items_per_user_;
  int input_users_;
  FiniteDistribution output_;
};

// Publishes the first user's first item.
class FirstItemMechanism : public ExactMechanism {
 public:
  FirstItemMechanism(int universe_size, int items_per_user, int input_users)
      : universe_size_(universe_size),
        items_per_user_(items_per_user),
        input_users_(input_users) {}

  int input_users() const override { return input_users_; }
  int items_per_user() const override { return items_per_user_; }
  int universe_size() const override { return universe_size_; }
  int output_size() const override { return universe_size_; }

  absl::StatusOr<FiniteDistribution> Evaluate(const Dataset& ds) const override {
    if (absl::Status s = CheckInput(ds); !s.ok()) return s;
    if (ds.n() == 0) return absl::InvalidArgumentError("no users");
    return FiniteDistribution::PointMass(universe_size_, ds.user(0).front());
  }

 private:
  int universe_size_;
  int items_per_user_;
  int input_users_;
};

namespace internal {

inline std::vector<double> BinomialPmf(int trials, double p) {
  std::vector<double> pmf(trials + 1);
  for (int k = 0; k <= trials; ++k) {
    double log_mass = LogChoose(trials, k);
    if (k > 0) log_mass += k * std::log(p);
    if (k < trials) log_mass += (trials - k) * std::log1p(-p);
    pmf[k] = std::exp(log_mass);
  }
  return pmf;
}

inline std::vector<double> Convolve(const std::vector<double>& a,
                                    const std::vector<double>& b) {
  std::vector<double> out(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  }
  return out;
}

// Probability that randomized response with parameter eps reports the
// opposite bit.
inline double FlipProbability(double eps) { return 1.0 / (1.0 + std::exp(eps)); }

}  // namespace internal

// Every one of the input_users * m bits (universe {0, 1}) is reported through
// randomized response at `item_epsilon`, and the mechanism publishes the
// number of reported ones. The law depends on the data only through the
// number of ones, which is the per-user summary.
inline absl::StatusOr<CountSummaryMechanism> RandomizedResponseCount(
    int input_users, int items_per_user, double item_epsilon) {
  if (input_users < 0 || items_per_user < 1) {
    return absl::InvalidArgumentError("invalid randomized-response shape");
  }
  if (!(item_epsilon > 0.0)) {
    return absl::InvalidArgumentError("item epsilon must be positive");
  }
  const int bits = input_users * items_per_user;
  const double flip = internal::FlipProbability(item_epsilon);
  std::vector<FiniteDistribution> tables;
  tables.reserve(bits + 1);
  for (int ones = 0; ones <= bits; ++ones) {
    std::vector<double> law = internal::Convolve(
        internal::BinomialPmf(ones, 1.0 - flip),
        internal::BinomialPmf(bits - ones, flip));
    absl::StatusOr<FiniteDistribution> row =
        FiniteDistribution::FromWeights(std::move(law));
    if (!row.ok()) return row.status();
    tables.push_back(*std::move(row));
  }
  return CountSummaryMechanism::FromItemWeights(items_per_user, input_users,
                                                {0, 1}, std::move(tables));
}

// Randomized response applied independently to each of `input_users`
// single-bit records; publishes the whole noisy vector (output index has bit
// i set when user i's report is 1).
class CoordinateRandomizedResponse : public ExactMechanism {
 public:
  // Dense output laws are materialized only up to this many users.
  static constexpr int kMaxDenseUsers = 20;

  CoordinateRandomizedResponse(int input_users, double item_epsilon)
      : input_users_(input_users),
        item_epsilon_(item_epsilon),
        flip_(internal::FlipProbability(item_epsilon)) {}

  int input_users() const override { return input_users_; }
  int items_per_user() const override { return 1; }
  int universe_size() const override { return 2; }
  int output_size() const override {
    return input_users_ <= kMaxDenseUsers ? 1 << input_users_ : 0;
  }
  double item_epsilon() const { return item_epsilon_; }

  absl::StatusOr<FiniteDistribution> Evaluate(const Dataset& ds) const override {
    if (absl::Status s = CheckInput(ds); !s.ok()) return s;
    if (input_users_ > kMaxDenseUsers) {
      return absl::ResourceExhaustedError(absl::StrCat(
          "dense output law needs 2^", input_users_, " outcomes"));
    }
    std::vector<double> law(std::size_t{1} << input_users_);
    for (std::size_t out = 0; out < law.size(); ++out) {
      double mass = 1.0;
      for (int i = 0; i < input_users_; ++i) {
        const int reported = static_cast<int>(out >> i & 1);
        mass *= reported == ds.user(i).front() ? 1.0 - flip_ : flip_;
      }
      law[out] = mass;
    }
    return FiniteDistribution::FromWeights(std::move(law));
  }

  // Only the d coordinates where the inputs differ carry information, and the
  // likelihood ratio is a function of how many of them report `a`'s bit. The
  // pair is returned as the laws of that count: Bin(d, 1 - q) and Bin(d, q)
  // with q the flip probability.
  bool reduces_pairs() const override { return true; }

  absl::StatusOr<DistributionPair> EvaluatePair(
      const Dataset& a, const Dataset& b) const override {
    if (absl::Status s = CheckInput(a); !s.ok()) return s;
    if (absl::Status s = CheckInput(b); !s.ok()) return s;
    int differing = 0;
    for (int i = 0; i < input_users_; ++i) {
      if (a.user(i).front() != b.user(i).front()) ++differing;
    }
    absl::StatusOr<FiniteDistribution> law_a = FiniteDistribution::FromWeights(
        internal::BinomialPmf(differing, 1.0 - flip_));
    if (!law_a.ok()) return law_a.status();
    absl::StatusOr<FiniteDistribution> law_b = FiniteDistribution::FromWeights(
        internal::BinomialPmf(differing, flip_));
    if (!law_b.ok()) return law_b.status();
    return DistributionPair(*std::move(law_a), *std::move(law_b));
  }

 private:
  int input_users_;
  double item_epsilon_;
  double flip_;
};

// The PAC learner's selection over a fixed hypothesis set.
class PacEmMechanism : public ExactMechanism {
 public:
  PacEmMechanism(std::vector<Concept> hypotheses, double eps, int input_users,
                 int items_per_user)
      : hypotheses_(std::move(hypotheses)),
        eps_(eps),
        input_users_(input_users),
        items_per_user_(items_per_user) {}

  int input_users() const override { return input_users_; }
  int items_per_user() const override { return items_per_user_; }
  int universe_size() const override {
    return 2 * static_cast<int>(hypotheses_.front().size());
  }
  int output_size() const override {
    return static_cast<int>(hypotheses_.size());
  }

  absl::StatusOr<FiniteDistribution> Evaluate(const Dataset& ds) const override {
    if (absl::Status s = CheckInput(ds); !s.ok()) return s;
    return PacSelectionDistribution(hypotheses_, ds, eps_);
  }

 private:
  std::vector<Concept> hypotheses_;
  double eps_;
  int input_users_;
  int items_per_user_;
};

// Clipped pairwise Scheffe selection over a fixed candidate list.
class HypothesisSelectionMechanism : public ExactMechanism {
 public:
  static absl::StatusOr<HypothesisSelectionMechanism> Create(
      std::vector<FiniteDistribution> candidates, double eps, double alpha,
      double c_tau, int input_users, int items_per_user) {
    absl::StatusOr<ScheffeScorer> scorer =
        ScheffeScorer::Create(std::move(candidates));
    if (!scorer.ok()) return scorer.status();
    absl::StatusOr<double> tau = DefaultTau(alpha, items_per_user, c_tau);
    if (!tau.ok()) return tau.status();
    return HypothesisSelectionMechanism(
        std::make_shared<const ScheffeScorer>(*std::move(scorer)), eps, alpha,
        c_tau, input_users, items_per_user);
  }

  int input_users() const override { return input_users_; }
  int items_per_user() const override { return items_per_user_; }
  int universe_size() const override {
    return static_cast<int>(scorer_->candidates().front().size());
  }
  int output_size() const override {
    return static_cast<int>(scorer_->candidates().size());
  }
  const ScheffeScorer& scorer() const { return *scorer_; }

  absl::StatusOr<FiniteDistribution> Evaluate(const Dataset& ds) const override {
    if (absl::Status s = CheckInput(ds); !s.ok()) return s;
    return HypothesisSelectDistribution(*scorer_, ds, eps_, alpha_, c_tau_);
  }

 private:
  HypothesisSelectionMechanism(std::shared_ptr<const ScheffeScorer> scorer,
                               double eps, double alpha, double c_tau,
                               int input_users, int items_per_user)
      : scorer_(std::move(scorer)),
        eps_(eps),
        alpha_(alpha),
        c_tau_(c_tau),
        input_users_(input_users),
        items_per_user_(items_per_user) {}

  std::shared_ptr<const ScheffeScorer> scorer_;
  double eps_;
  double alpha_;
  double c_tau_;
  int input_users_;
  int items_per_user_;
};

}  // namespace user_dp

#endif  // USER_DP_MECHANISMS_H_
