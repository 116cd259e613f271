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

// Brute-force reference for DelStab shared by the unit and acceptance tests.

#ifndef USER_DP_TESTS_DELSTAB_ORACLE_H_
#define USER_DP_TESTS_DELSTAB_ORACLE_H_

#include <cmath>
#include <functional>
#include <vector>

#include "user_dp/core.h"
#include "user_dp/mechanism.h"

namespace user_dp {
namespace testing_util {

// Dataset over {0, 1} with m = 2 whose users have the given numbers of ones.
inline Dataset OnesDataset(const std::vector<int>& ones) {
  std::vector<UserRecord> users;
  for (int k : ones) {
    users.push_back(k == 0 ? UserRecord{0, 0}
                           : k == 1 ? UserRecord{1, 0} : UserRecord{1, 1});
  }
  return *Dataset::Create(2, 2, std::move(users));
}

// Calls fn(mask) for every subset of `pool` (indices into [n]) of size k.
inline void ForSubsets(int n, const std::vector<int>& pool, int k,
                const std::function<void(const std::vector<bool>&)>& fn) {
  std::vector<int> idx(k);
  std::function<void(int, int)> rec = [&](int start, int depth) {
    if (depth == k) {
      std::vector<bool> mask(n, false);
      for (int i : idx) mask[pool[i]] = true;
      fn(mask);
      return;
    }
    for (int i = start; i < static_cast<int>(pool.size()); ++i) {
      idx[depth] = i;
      rec(i + 1, depth + 1);
    }
  };
  rec(0, 0);
}

// Direct transcription of the algorithm by subset enumeration. Only
// ApproxIndistinguishable and Evaluate are used from the library.
inline std::vector<double> DelStabOracle(const ExactMechanism& mech,
                                         const Dataset& ds,
                                         const PrivacyParams& pp) {
  const double eps_bar = pp.epsilon / 3;
  const double delta_bar =
      pp.delta / (std::exp(2 * eps_bar) + std::exp(eps_bar) + 2);
  const int kappa =
      1 + static_cast<int>(std::ceil(std::log(1 / delta_bar) / eps_bar));
  std::vector<double> noise(2 * kappa + 1);
  double z = 0;
  for (int x = 0; x <= 2 * kappa; ++x) {
    noise[x] = std::exp(-eps_bar * std::abs(x - kappa));
    z += noise[x];
  }
  const int n = ds.n();
  std::vector<int> everyone(n);
  for (int i = 0; i < n; ++i) everyone[i] = i;
  std::vector<double> law(mech.output_size() + 1, 0.0);
  for (int r = 0; r <= 2 * kappa; ++r) {
    std::vector<std::vector<bool>> stable;
    ForSubsets(n, everyone, r, [&](const std::vector<bool>& s) {
      std::vector<int> rest;
      for (int i = 0; i < n; ++i) {
        if (!s[i]) rest.push_back(i);
      }
      std::vector<FiniteDistribution> outs;
      ForSubsets(n, rest, 4 * kappa - r, [&](const std::vector<bool>& t) {
        std::vector<bool> gone = s;
        for (int i = 0; i < n; ++i) gone[i] = gone[i] || t[i];
        outs.push_back(*mech.Evaluate(ds.WithoutUsers(gone)));
      });
      bool ok = true;
      for (std::size_t a = 0; a < outs.size() && ok; ++a) {
        for (std::size_t b = a + 1; b < outs.size() && ok; ++b) {
          ok = *ApproxIndistinguishable(outs[a], outs[b], {eps_bar, delta_bar});
        }
      }
      if (ok) stable.push_back(s);
    });
    const double pr = noise[r] / z;
    if (stable.empty()) {
      law.back() += pr;
      continue;
    }
    for (const std::vector<bool>& s : stable) {
      std::vector<int> rest;
      for (int i = 0; i < n; ++i) {
        if (!s[i]) rest.push_back(i);
      }
      std::vector<std::vector<bool>> supersets;
      ForSubsets(n, rest, 4 * kappa - r, [&](const std::vector<bool>& t) {
        std::vector<bool> gone = s;
        for (int i = 0; i < n; ++i) gone[i] = gone[i] || t[i];
        supersets.push_back(gone);
      });
      const double w = pr / stable.size() / supersets.size();
      for (const std::vector<bool>& gone : supersets) {
        FiniteDistribution out = *mech.Evaluate(ds.WithoutUsers(gone));
        for (std::size_t o = 0; o < out.size(); ++o) law[o] += w * out[o];
      }
    }
  }
  return law;
}

}  // namespace testing_util
}  // namespace user_dp

#endif  // USER_DP_TESTS_DELSTAB_ORACLE_H_
