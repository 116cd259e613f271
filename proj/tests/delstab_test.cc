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

#include "user_dp/delstab.h"

#include <cmath>
#include <functional>
#include <optional>
#include <vector>

#include "delstab_oracle.h"
#include "gtest/gtest.h"
#include "user_dp/calculus.h"
#include "user_dp/core.h"
#include "user_dp/mechanisms.h"
#include "user_dp/noise.h"
#include "user_dp/random.h"

namespace user_dp {
namespace {

using testing_util::DelStabOracle;
using testing_util::ForSubsets;
using testing_util::OnesDataset;

double Tv(const std::vector<double>& a, const FiniteDistribution& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::fabs(a[i] - b[i]);
  return s / 2;
}

TEST(LddpCheckTest, ConstantMechanismAlwaysStable) {
  ConstantMechanism mech(2, 2, 3, *FiniteDistribution::Create({0.2, 0.8}));
  Dataset ds = OnesDataset({0, 1, 2, 2, 0});
  for (double delta : {0.0, 0.1}) {
    EXPECT_TRUE(*LddpCheck(mech, ds, 2, {0.1, delta}));
  }
}

TEST(LddpCheckTest, IdenticalUsersAlwaysStable) {
  absl::StatusOr<CountSummaryMechanism> mech = RandomizedResponseCount(3, 2, 5.0);
  ASSERT_TRUE(mech.ok());
  Dataset ds = OnesDataset({1, 1, 1, 1, 1});
  EXPECT_TRUE(*LddpCheck(*mech, ds, 2, {0.01, 0.0}));
  const ExactMechanism& generic = *mech;
  EXPECT_TRUE(*LddpCheck(generic, ds, 2, {0.01, 0.0}));
}

TEST(LddpCheckTest, ArityAndRangeErrors) {
  absl::StatusOr<CountSummaryMechanism> mech = RandomizedResponseCount(3, 2, 1.0);
  Dataset ds = OnesDataset({1, 0, 1, 2});
  EXPECT_FALSE(LddpCheck(*mech, ds, 2, {1, 0}).ok());
  EXPECT_FALSE(LddpCheck(*mech, ds, 5, {1, 0}).ok());
  const ExactMechanism& generic = *mech;
  EXPECT_FALSE(LddpCheck(generic, ds, 2, {1, 0}).ok());
  EXPECT_EQ(LddpCheck(generic, ds, 1, {1, 0}, /*budget=*/2).status().code(),
            absl::StatusCode::kResourceExhausted);
}

TEST(LddpCheckTest, ThreeUserRandomizedResponseMatchesPairEnumeration) {
  // Randomized-response count over 2 single-bit users; the 3-user dataset
  // loses one user.
  absl::StatusOr<CountSummaryMechanism> mech = RandomizedResponseCount(2, 1, 1.0);
  ASSERT_TRUE(mech.ok());
  for (int code = 0; code < 8; ++code) {
    std::vector<UserRecord> users = {{code & 1}, {code >> 1 & 1}, {code >> 2}};
    Dataset ds = *Dataset::Create(2, 1, users);
    for (double eps : {0.5, 0.99, 1.0, 1.5}) {
      for (double delta : {0.0, 0.05, 0.2}) {
        bool oracle = true;
        for (int s = 0; s < 3; ++s) {
          for (int s2 = 0; s2 < 3; ++s2) {
            std::vector<bool> a(3, false), b(3, false);
            a[s] = true;
            b[s2] = true;
            oracle = oracle && *ApproxIndistinguishable(
                                   *mech->Evaluate(ds.WithoutUsers(a)),
                                   *mech->Evaluate(ds.WithoutUsers(b)),
                                   {eps, delta});
          }
        }
        EXPECT_EQ(*LddpCheck(*mech, ds, 1, {eps, delta}), oracle)
            << code << " " << eps << " " << delta;
      }
    }
  }
}

TEST(LddpCheckTest, CountSummaryAgreesWithGenericEnumeration) {
  Rng rng(21);
  for (int t = 0; t < 60; ++t) {
    const int n = 6 + static_cast<int>(rng.UniformInt(4));
    const int r = 1 + static_cast<int>(rng.UniformInt(3));
    std::vector<int> ones(n);
    for (int& k : ones) k = static_cast<int>(rng.UniformInt(3));
    Dataset ds = OnesDataset(ones);
    const double item_eps = 0.2 + 2 * rng.Uniform();
    absl::StatusOr<CountSummaryMechanism> mech =
        RandomizedResponseCount(n - r, 2, item_eps);
    const PrivacyParams pp{0.5 + rng.Uniform(), 0.05 * rng.Uniform()};
    const ExactMechanism& generic = *mech;
    EXPECT_EQ(*LddpCheck(*mech, ds, r, pp), *LddpCheck(generic, ds, r, pp));
  }
}

TEST(DelStabTest, TooFewUsersIsAnError) {
  absl::StatusOr<CountSummaryMechanism> mech = RandomizedResponseCount(0, 2, 1.0);
  Dataset ds = OnesDataset(std::vector<int>(15, 1));  // 4 kappa = 16 at (6, 0.5)
  EXPECT_EQ(DelStabDistribution(*mech, ds, {6, 0.5}).status().code(),
            absl::StatusCode::kInvalidArgument);
  Rng rng(1);
  EXPECT_FALSE(DelStabRun(*mech, ds, {6, 0.5}, rng).ok());
  EXPECT_FALSE(DelStabDistribution(*mech, OnesDataset(std::vector<int>(17, 1)),
                                   {6, 0.5})
                   .ok());  // input_users must be n - 16
}

TEST(DelStabTest, ConstantMechanismNeverBottom) {
  FiniteDistribution out = *FiniteDistribution::Create({0.1, 0.6, 0.3});
  // A count summary whose table rows are all equal.
  std::vector<FiniteDistribution> tables(2 * 4 + 1, out);
  absl::StatusOr<CountSummaryMechanism> mech =
      CountSummaryMechanism::FromItemWeights(2, 4, {0, 1}, tables);
  ASSERT_TRUE(mech.ok());
  Dataset ds = OnesDataset({0, 1, 2, 2, 1, 0, 0, 1, 2, 1, 1, 0, 2, 2, 0, 1,
                            1, 0, 2, 1});
  FiniteDistribution law = *DelStabDistribution(*mech, ds, {6, 0.5});
  EXPECT_EQ(law.size(), 4u);
  EXPECT_NEAR(law[DelStabBottomIndex(*mech)], 0.0, 1e-15);
  for (int o = 0; o < 3; ++o) EXPECT_NEAR(law[o], out[o], 1e-12);
}

TEST(DelStabTest, AdversarialTableAlwaysBottom) {
  const int input = 30 - 16;
  std::vector<FiniteDistribution> tables;
  for (int t = 0; t <= 2 * input; ++t) {
    tables.push_back(FiniteDistribution::PointMass(2 * input + 1, t));
  }
  absl::StatusOr<CountSummaryMechanism> mech =
      CountSummaryMechanism::FromItemWeights(2, input, {0, 1}, tables);
  std::vector<int> ones(30);
  for (int i = 0; i < 30; ++i) ones[i] = i % 2;
  Dataset ds = OnesDataset(ones);
  FiniteDistribution law = *DelStabDistribution(*mech, ds, {6, 0.5});
  EXPECT_NEAR(law[DelStabBottomIndex(*mech)], 1.0, 1e-12);
  std::vector<double> sizes = *StableSetSizes(*mech, ds, {6, 0.5});
  for (double s : sizes) EXPECT_EQ(s, 0.0);
  Rng rng(3);
  for (int i = 0; i < 20; ++i) {
    EXPECT_FALSE(DelStabRun(*mech, ds, {6, 0.5}, rng)->has_value());
  }
}

TEST(DelStabTest, IdenticalUsersMatchSubsampledMechanism) {
  absl::StatusOr<CountSummaryMechanism> mech = RandomizedResponseCount(4, 2, 0.7);
  Dataset ds = OnesDataset(std::vector<int>(20, 1));
  FiniteDistribution law = *DelStabDistribution(*mech, ds, {6, 0.5});
  FiniteDistribution direct = *mech->Evaluate(OnesDataset({1, 1, 1, 1}));
  EXPECT_NEAR(law[DelStabBottomIndex(*mech)], 0.0, 1e-15);
  for (std::size_t o = 0; o < direct.size(); ++o) {
    EXPECT_NEAR(law[o], direct[o], 1e-12);
  }
  Rng rng(9);
  for (int i = 0; i < 50; ++i) {
    EXPECT_TRUE(DelStabRun(*mech, ds, {6, 0.5}, rng)->has_value());
  }
}

// n = 17 is the smallest user count with a nontrivial mechanism at
// (eps, delta) = (6, 0.5), where kappa = 4.
std::vector<int> MixedOnes17() {
  return {1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 0, 0, 0, 2, 2, 2, 0};
}

TEST(DelStabTest, ExactLawMatchesSubsetEnumeration) {
  for (double item_eps : {0.8, 1.6, 3.0}) {
    absl::StatusOr<CountSummaryMechanism> mech =
        RandomizedResponseCount(1, 2, item_eps);
    ASSERT_TRUE(mech.ok());
    Dataset ds = OnesDataset(MixedOnes17());
    for (PrivacyParams pp : {PrivacyParams{6, 0.5}, PrivacyParams{7.5, 0.6}}) {
      if (ComputeDelStabParams(pp)->kappa != 4) continue;
      FiniteDistribution law = *DelStabDistribution(*mech, ds, pp);
      std::vector<double> oracle = DelStabOracle(*mech, ds, pp);
      ASSERT_EQ(oracle.size(), law.size());
      for (std::size_t o = 0; o < law.size(); ++o) {
        EXPECT_NEAR(law[o], oracle[o], 1e-9) << item_eps << " " << o;
      }
    }
  }
}

TEST(DelStabTest, SamplerMatchesExactLaw) {
  // Chosen so that the bottom mass is about 0.12.
  absl::StatusOr<CountSummaryMechanism> mech = RandomizedResponseCount(2, 2, 0.8);
  std::vector<int> ones = MixedOnes17();
  ones.push_back(2);
  Dataset ds = OnesDataset(ones);
  FiniteDistribution law = *DelStabDistribution(*mech, ds, {6, 0.5});
  ASSERT_GT(law[DelStabBottomIndex(*mech)], 0.01);
  ASSERT_LT(law[DelStabBottomIndex(*mech)], 0.99);
  std::vector<double> freq(law.size(), 0.0);
  const int runs = 10000;
  for (int i = 0; i < runs; ++i) {
    Rng rng(DeriveSeed(5, i));
    std::optional<int> out = *DelStabRun(*mech, ds, {6, 0.5}, rng);
    freq[out.has_value() ? *out : DelStabBottomIndex(*mech)] += 1.0 / runs;
  }
  EXPECT_LE(Tv(freq, law), 0.02);
}

TEST(DelStabTest, GenericSamplerMatchesExactLaw) {
  absl::StatusOr<CountSummaryMechanism> mech = RandomizedResponseCount(1, 2, 1.6);
  Dataset ds = OnesDataset(MixedOnes17());
  FiniteDistribution law = *DelStabDistribution(*mech, ds, {6, 0.5});
  const ExactMechanism& generic = *mech;
  std::vector<double> freq(law.size(), 0.0);
  const int runs = 400;
  for (int i = 0; i < runs; ++i) {
    Rng rng(DeriveSeed(6, i));
    std::optional<int> out = *DelStabRun(generic, ds, {6, 0.5}, rng);
    freq[out.has_value() ? *out : DelStabBottomIndex(*mech)] += 1.0 / runs;
  }
  // Four outcomes and 400 runs: the expected TV is about 0.03.
  EXPECT_LE(Tv(freq, law), 0.1);
}

TEST(DelStabTest, UtilityWhenFullyStable) {
  absl::StatusOr<CountSummaryMechanism> mech = RandomizedResponseCount(2, 2, 0.4);
  std::vector<int> ones = MixedOnes17();
  ones.push_back(0);
  Dataset ds = OnesDataset(ones);
  DelStabParams params = *ComputeDelStabParams({6, 0.5});
  // The mechanism must be LDDP at distance 4 kappa on the whole dataset.
  ASSERT_TRUE(*LddpCheck(*mech, ds, 4 * params.kappa,
                         {params.eps_bar, params.delta_bar}));
  FiniteDistribution law = *DelStabDistribution(*mech, ds, {6, 0.5});
  // Subsample-then-run: uniform T of size 16 among 18 users.
  std::vector<double> oracle(mech->output_size(), 0.0);
  int count = 0;
  std::vector<int> everyone(18);
  for (int i = 0; i < 18; ++i) everyone[i] = i;
  ForSubsets(18, everyone, 16, [&](const std::vector<bool>& gone) {
    FiniteDistribution out = *mech->Evaluate(ds.WithoutUsers(gone));
    for (std::size_t o = 0; o < out.size(); ++o) oracle[o] += out[o];
    ++count;
  });
  const double bottom = law[DelStabBottomIndex(*mech)];
  EXPECT_LT(bottom, 1.0);
  for (std::size_t o = 0; o < oracle.size(); ++o) {
    EXPECT_NEAR(law[o] / (1 - bottom), oracle[o] / count, 1e-12);
  }
}

TEST(DelStabTest, NeighborPropertiesOnRandomPairs) {
  const PrivacyParams pp{6, 0.5};
  DelStabParams params = *ComputeDelStabParams(pp);
  absl::StatusOr<CountSummaryMechanism> mech = RandomizedResponseCount(4, 2, 1.6);
  const std::vector<UserRecord> records = {{0, 0}, {0, 1}, {1, 0}, {1, 1}};
  Rng rng(2024);
  for (int t = 0; t < 40; ++t) {
    std::vector<int> ones(20);
    for (int& k : ones) k = rng.Bernoulli(0.6) ? 1 : 2 * static_cast<int>(rng.UniformInt(2));
    Dataset ds = OnesDataset(ones);
    Dataset other = ds.WithUser(static_cast<int>(rng.UniformInt(20)),
                                records[rng.UniformInt(4)]);
    FiniteDistribution a = *DelStabDistribution(*mech, ds, pp);
    FiniteDistribution b = *DelStabDistribution(*mech, other, pp);
    EXPECT_LE(*HockeyStick(a, b, pp.epsilon), pp.delta + 1e-9);
    EXPECT_LE(*HockeyStick(b, a, pp.epsilon), pp.delta + 1e-9);
    const int bot = DelStabBottomIndex(*mech);
    EXPECT_LE(a[bot], params.delta_bar + std::exp(params.eps_bar) * b[bot] + 1e-12);
    EXPECT_LE(b[bot], params.delta_bar + std::exp(params.eps_bar) * a[bot] + 1e-12);
    std::vector<double> sa = *StableSetSizes(*mech, ds, pp);
    std::vector<double> sb = *StableSetSizes(*mech, other, pp);
    for (int r = 0; r + 1 < static_cast<int>(sa.size()); ++r) {
      if (sb[r] > 0) {
        EXPECT_GT(sa[r + 1], 0) << r;
      }
      if (sa[r] > 0) {
        EXPECT_GT(sb[r + 1], 0) << r;
      }
    }
  }
}

TEST(DelStabTest, BudgetExhaustion) {
  absl::StatusOr<CountSummaryMechanism> mech = RandomizedResponseCount(4, 2, 1.6);
  Dataset ds = OnesDataset({0, 1, 2, 0, 1, 2, 0, 1, 2, 0, 1, 2, 0, 1, 2, 0, 1,
                            2, 0, 1});
  EXPECT_EQ(DelStabDistribution(*mech, ds, {6, 0.5}, /*budget=*/3).status().code(),
            absl::StatusCode::kResourceExhausted);
  const ExactMechanism& generic = *mech;
  Rng rng(1);
  EXPECT_EQ(DelStabRun(generic, ds, {6, 0.5}, rng, /*budget=*/10).status().code(),
            absl::StatusCode::kResourceExhausted);
}

}  // namespace
}  // namespace user_dp
