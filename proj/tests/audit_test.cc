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

#include "user_dp/audit.h"

#include <algorithm>
#include <cmath>
#include <vector>

#include "gtest/gtest.h"
#include "user_dp/core.h"
#include "user_dp/learners.h"
#include "user_dp/mechanisms.h"

namespace user_dp {
namespace {

// Randomized response on the single bit held by one user.
CountSummaryMechanism OneBitRr(double eps) {
  return *RandomizedResponseCount(1, 1, eps);
}

TEST(AuditTest, ConstantMechanismPasses) {
  ConstantMechanism mech(3, 2, 2, FiniteDistribution::Uniform(4));
  AuditReport r = *VerifyUserDp(mech, 3, 2, 2, {0.0, 0.0}, AuditMode::kExhaustive);
  EXPECT_TRUE(r.pass);
  EXPECT_EQ(r.max_divergence, 0.0);
  EXPECT_EQ(r.max_log_ratio, 0.0);
  EXPECT_EQ(r.datasets_checked, 81);
  // Unordered pairs: 81 datasets, 2 users, 8 other records each, halved.
  EXPECT_EQ(r.pairs_checked, 81 * 2 * 8 / 2);
}

TEST(AuditTest, FirstItemMechanismFails) {
  FirstItemMechanism mech(2, 2, 2);
  AuditReport r = *VerifyUserDp(mech, 2, 2, 2, {5.0, 0.5}, AuditMode::kExhaustive);
  EXPECT_FALSE(r.pass);
  EXPECT_NEAR(r.max_divergence, 1.0, 1e-12);
  ASSERT_TRUE(r.worst_pair.has_value());
  EXPECT_NE(r.worst_pair->first.user(0).front(),
            r.worst_pair->second.user(0).front());
  EXPECT_TRUE(std::isinf(r.max_log_ratio));
}

TEST(AuditTest, OneBitRandomizedResponseAtExactEpsilon) {
  const double eps = 0.7;
  CountSummaryMechanism mech = OneBitRr(eps);
  // Closed form: ratio (1 - q) / q with q = 1 / (1 + e^eps) equals e^eps.
  const double q = 1 / (1 + std::exp(eps));
  EXPECT_NEAR(std::log((1 - q) / q), eps, 1e-12);
  AuditReport pass =
      *VerifyItemDp(mech, 2, 1, 1, {eps, 0.0}, AuditMode::kExhaustive);
  EXPECT_TRUE(pass.pass);
  EXPECT_NEAR(pass.max_log_ratio, eps, 1e-12);
  AuditReport fail =
      *VerifyItemDp(mech, 2, 1, 1, {0.99 * eps, 0.0}, AuditMode::kExhaustive);
  EXPECT_FALSE(fail.pass);
  // Hockey stick at 0.99 eps: (1 - q) - e^{0.99 eps} q.
  EXPECT_NEAR(fail.max_divergence, (1 - q) - std::exp(0.99 * eps) * q, 1e-12);
}

TEST(AuditTest, RandomizedResponseCountItemVersusUserLevel) {
  const double eps = 0.5;
  CountSummaryMechanism mech = *RandomizedResponseCount(3, 2, eps);
  EXPECT_TRUE(
      VerifyItemDp(mech, 2, 3, 2, {eps, 0.0}, AuditMode::kExhaustive)->pass);
  EXPECT_FALSE(
      VerifyUserDp(mech, 2, 3, 2, {eps, 0.0}, AuditMode::kExhaustive)->pass);
  // Group privacy over m = 2 items.
  EXPECT_TRUE(
      VerifyUserDp(mech, 2, 3, 2, {2 * eps, 0.0}, AuditMode::kExhaustive)->pass);
}

TEST(AuditTest, UserLevelPassImpliesItemLevelPass) {
  std::vector<Concept> hypotheses = ThresholdConcepts(2);
  hypotheses.resize(2);
  PacEmMechanism mech(hypotheses, 1.0, 2, 2);
  AuditReport user =
      *VerifyUserDp(mech, 4, 2, 2, {1.0, 0.0}, AuditMode::kExhaustive);
  AuditReport item =
      *VerifyItemDp(mech, 4, 2, 2, {1.0, 0.0}, AuditMode::kExhaustive);
  ASSERT_TRUE(user.pass);
  EXPECT_TRUE(item.pass);
  EXPECT_LE(item.max_divergence, user.max_divergence + 1e-15);
  EXPECT_LE(item.max_log_ratio, user.max_log_ratio + 1e-15);
}

TEST(AuditTest, PacMechanismIsPureDp) {
  std::vector<Concept> hypotheses = {{0, 1}, {1, 1}};
  PacEmMechanism mech(hypotheses, 1.0, 3, 2);
  AuditReport r =
      *VerifyUserDp(mech, 4, 3, 2, {1.0, 0.0}, AuditMode::kExhaustive);
  EXPECT_TRUE(r.pass);
  EXPECT_LE(r.max_log_ratio, 1.0 + 1e-9);
  EXPECT_EQ(r.datasets_checked, 4096);
}

TEST(AuditTest, SampledNeverExceedsExhaustive) {
  CountSummaryMechanism mech = *RandomizedResponseCount(3, 2, 0.9);
  AuditReport full =
      *VerifyUserDp(mech, 2, 3, 2, {1.0, 0.1}, AuditMode::kExhaustive);
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    AuditReport sampled = *VerifyUserDp(mech, 2, 3, 2, {1.0, 0.1},
                                        AuditMode::kSampled, 200, seed);
    EXPECT_EQ(sampled.pairs_checked, 200);
    EXPECT_LE(sampled.max_divergence, full.max_divergence + 1e-15);
    EXPECT_LE(sampled.max_log_ratio, full.max_log_ratio + 1e-15);
  }
}

TEST(AuditTest, SampledIsReproducible) {
  CountSummaryMechanism mech = *RandomizedResponseCount(4, 2, 0.9);
  AuditReport a =
      *VerifyUserDp(mech, 2, 4, 2, {1.0, 0.1}, AuditMode::kSampled, 300, 42);
  AuditReport b =
      *VerifyUserDp(mech, 2, 4, 2, {1.0, 0.1}, AuditMode::kSampled, 300, 42);
  EXPECT_EQ(a.max_divergence, b.max_divergence);
  EXPECT_EQ(a.max_log_ratio, b.max_log_ratio);
  ASSERT_TRUE(a.worst_pair.has_value() && b.worst_pair.has_value());
  EXPECT_EQ(a.worst_pair->first.users(), b.worst_pair->first.users());
  EXPECT_EQ(a.worst_pair->second.users(), b.worst_pair->second.users());
}

TEST(AuditTest, SymmetricUnderNeighborSwap) {
  // An asymmetric mechanism: both directions are checked, so a large
  // divergence in either direction fails the verdict.
  std::vector<FiniteDistribution> tables = {
      *FiniteDistribution::Create({0.9, 0.1}),
      *FiniteDistribution::Create({0.5, 0.5})};
  CountSummaryMechanism forward =
      *CountSummaryMechanism::FromItemWeights(1, 1, {0, 1}, tables);
  std::reverse(tables.begin(), tables.end());
  CountSummaryMechanism backward =
      *CountSummaryMechanism::FromItemWeights(1, 1, {0, 1}, tables);
  for (double eps : {0.1, 0.5, 1.0, 2.0}) {
    AuditReport a = *VerifyUserDp(forward, 2, 1, 1, {eps, 0.05},
                                  AuditMode::kExhaustive);
    AuditReport b = *VerifyUserDp(backward, 2, 1, 1, {eps, 0.05},
                                  AuditMode::kExhaustive);
    EXPECT_EQ(a.pass, b.pass) << eps;
    EXPECT_DOUBLE_EQ(a.max_divergence, b.max_divergence);
  }
}

TEST(AuditTest, ShapeAndBudgetErrors) {
  CountSummaryMechanism mech = *RandomizedResponseCount(3, 2, 0.9);
  EXPECT_EQ(VerifyUserDp(mech, 2, 2, 2, {1, 0}, AuditMode::kExhaustive)
                .status()
                .code(),
            absl::StatusCode::kInvalidArgument);
  EXPECT_EQ(VerifyUserDp(mech, 2, 3, 2, {1, 0}, AuditMode::kExhaustive, 10)
                .status()
                .code(),
            absl::StatusCode::kResourceExhausted);
}

TEST(ClopperPearsonTest, KnownValues) {
  // Closed forms at the boundary: (alpha/2)^(1/n) and 1 - (alpha/2)^(1/n).
  BinomialInterval all = ClopperPearson(20, 20);
  EXPECT_NEAR(all.lower, std::pow(0.025, 1.0 / 20), 1e-12);
  EXPECT_EQ(all.upper, 1.0);
  BinomialInterval none = ClopperPearson(0, 20);
  EXPECT_EQ(none.lower, 0.0);
  EXPECT_NEAR(none.upper, 1 - std::pow(0.025, 1.0 / 20), 1e-12);
  BinomialInterval mid = ClopperPearson(5, 10);
  EXPECT_NEAR(mid.lower, 0.18708602844739, 1e-9);
  EXPECT_NEAR(mid.upper, 0.81291397155261, 1e-9);
}

TEST(SpgTest, TrivialCases) {
  ConstantMechanism constant(2, 1, 5, FiniteDistribution::Uniform(3));
  SpgEstimate c = *EstimateSamplePerfectGeneralization(
      constant, FiniteDistribution::Uniform(2), 5, {0.0, 0.0}, 50, 1);
  EXPECT_EQ(c.fraction, 1.0);
  CoordinateRandomizedResponse rr(5, 0.1);
  SpgEstimate point = *EstimateSamplePerfectGeneralization(
      rr, FiniteDistribution::PointMass(2, 1), 5, {0.0, 0.0}, 50, 1);
  EXPECT_EQ(point.fraction, 1.0);
  EXPECT_EQ(point.successes, 50);
}

TEST(SpgTest, CoordinateRandomizedResponseTrend) {
  const double eps0 = 0.1;
  const int n = 25;
  const double eps_prime = 4 * eps0 * std::sqrt(n * std::log(1e6));
  CoordinateRandomizedResponse rr(n, eps0);
  const FiniteDistribution d = FiniteDistribution::Uniform(2);
  SpgEstimate at = *EstimateSamplePerfectGeneralization(
      rr, d, n, {eps_prime, 1e-3}, 200, 7);
  EXPECT_GE(at.fraction, 0.95);
  EXPECT_LE(at.interval.lower, at.fraction);
  SpgEstimate tenth = *EstimateSamplePerfectGeneralization(
      rr, d, n, {eps_prime / 10, 1e-3}, 200, 7);
  EXPECT_LE(tenth.fraction, 0.5);
  EXPECT_GE(tenth.interval.upper, tenth.fraction);
}

TEST(SpgTest, ShapeErrors) {
  CoordinateRandomizedResponse rr(5, 0.1);
  EXPECT_FALSE(EstimateSamplePerfectGeneralization(
                   rr, FiniteDistribution::Uniform(2), 4, {1, 0}, 5, 1)
                   .ok());
  EXPECT_FALSE(EstimateSamplePerfectGeneralization(
                   rr, FiniteDistribution::Uniform(3), 5, {1, 0}, 5, 1)
                   .ok());
}

}  // namespace
}  // namespace user_dp
