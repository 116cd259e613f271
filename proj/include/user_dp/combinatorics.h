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

// Counting and enumeration helpers shared by the exact computations.

#ifndef USER_DP_COMBINATORICS_H_
#define USER_DP_COMBINATORICS_H_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "user_dp/core.h"

namespace user_dp {

// Default cap on enumerated subsets, summary classes or audit pairs.
inline constexpr std::int64_t kDefaultBudget = 20'000'000;

namespace internal {

inline double LogChoose(int n, int k) {
  if (k < 0 || k > n) return -kInfinity;
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

// C(n, k) as a double, saturating at infinity.
inline double Choose(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  k = std::min(k, n - k);
  double result = 1.0;
  for (int i = 1; i <= k; ++i) result = result * (n - k + i) / i;
  return std::round(result);
}

// Calls fn(indices) for every k-subset of {0, ..., n - 1} in lexicographic
// order. Stops at the first non-OK status.
template <typename Fn>
absl::Status ForEachSubset(int n, int k, Fn&& fn) {
  if (k < 0 || k > n) return absl::OkStatus();
  std::vector<int> idx(k);
  for (int i = 0; i < k; ++i) idx[i] = i;
  while (true) {
    if (absl::Status s = fn(static_cast<const std::vector<int>&>(idx));
        !s.ok()) {
      return s;
    }
    int i = k - 1;
    while (i >= 0 && idx[i] == n - k + i) --i;
    if (i < 0) return absl::OkStatus();
    ++idx[i];
    for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

// Calls fn(parts) for every vector with 0 <= parts[v] <= caps[v] summing to
// `total`, in lexicographic order.
template <typename Fn>
absl::Status ForEachBoundedComposition(const std::vector<int>& caps, int total,
                                       Fn&& fn) {
  std::vector<int> suffix_cap(caps.size() + 1, 0);
  for (std::size_t v = caps.size(); v-- > 0;) {
    suffix_cap[v] = suffix_cap[v + 1] + caps[v];
  }
  std::vector<int> parts(caps.size(), 0);
  absl::Status status = absl::OkStatus();
  auto recurse = [&](auto& self, std::size_t v, int remaining) -> bool {
    if (v == caps.size()) {
      if (remaining != 0) return true;
      status = fn(static_cast<const std::vector<int>&>(parts));
      return status.ok();
    }
    const int lo = std::max(0, remaining - suffix_cap[v + 1]);
    const int hi = std::min(caps[v], remaining);
    for (int t = lo; t <= hi; ++t) {
      parts[v] = t;
      if (!self(self, v + 1, remaining - t)) return false;
    }
    parts[v] = 0;
    return true;
  };
  if (total >= 0 && total <= suffix_cap[0]) recurse(recurse, 0, total);
  return status;
}

inline std::vector<bool> MaskFromIndices(int n, const std::vector<int>& idx) {
  std::vector<bool> mask(n, false);
  for (int i : idx) mask[i] = true;
  return mask;
}

inline absl::Status BudgetExceeded(double needed, std::int64_t budget,
                                   const char* what) {
  return absl::ResourceExhaustedError(absl::StrCat(
      "audit infeasible at this size: ", what, " needs ", needed,
      " evaluations, budget is ", budget));
}

}  // namespace internal
}  // namespace user_dp

#endif  // USER_DP_COMBINATORICS_H_
