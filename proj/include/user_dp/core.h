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

// Exact finite distributions, user-level datasets, privacy parameters and the
// divergences that relate them.

#ifndef USER_DP_CORE_H_
#define USER_DP_CORE_H_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <span>
#include <utility>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/str_cat.h"

namespace user_dp {

// Masses must sum to one within this tolerance.
inline constexpr double kNormalizationTolerance = 1e-9;
// Tolerance for comparisons that are identities in exact arithmetic.
inline constexpr double kIdentityTolerance = 1e-12;
// Added to delta when deciding audit verdicts; covers floating error only.
inline constexpr double kDivergenceTolerance = 1e-9;

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

// A probability mass function over the indexed outcomes {0, ..., size() - 1}.
class FiniteDistribution {
 public:
  // Validates nonnegativity and normalization. Masses are stored as given.
  static absl::StatusOr<FiniteDistribution> Create(std::vector<double> masses) {
    if (masses.empty()) {
      return absl::InvalidArgumentError("distribution needs a nonempty domain");
    }
    double total = 0.0;
    for (std::size_t i = 0; i < masses.size(); ++i) {
      if (!(masses[i] >= 0.0) || !std::isfinite(masses[i])) {
        return absl::InvalidArgumentError(
            absl::StrCat("mass at index ", i, " is not a finite nonnegative "
                         "number: ", masses[i]));
      }
      total += masses[i];
    }
    if (std::abs(total - 1.0) > kNormalizationTolerance) {
      return absl::InvalidArgumentError(
          absl::StrCat("masses sum to ", total, ", expected 1"));
    }
    return FiniteDistribution(std::move(masses));
  }

  // Normalizes nonnegative weights with a positive finite total. The total
  // is summed in sorted order so that permuting the weights permutes the
  // result exactly.
  static absl::StatusOr<FiniteDistribution> FromWeights(
      std::vector<double> weights) {
    if (weights.empty()) {
      return absl::InvalidArgumentError("distribution needs a nonempty domain");
    }
    for (double w : weights) {
      if (!(w >= 0.0) || !std::isfinite(w)) {
        return absl::InvalidArgumentError("weights must be finite and >= 0");
      }
    }
    std::vector<double> sorted = weights;
    std::sort(sorted.begin(), sorted.end());
    double total = 0.0;
    for (double w : sorted) total += w;
    if (!(total > 0.0)) {
      return absl::InvalidArgumentError("weights have zero total");
    }
    for (double& w : weights) w /= total;
    return FiniteDistribution(std::move(weights));
  }

  static FiniteDistribution Uniform(std::size_t size) {
    return FiniteDistribution(
        std::vector<double>(size, 1.0 / static_cast<double>(size)));
  }

  static FiniteDistribution PointMass(std::size_t size, std::size_t index) {
    std::vector<double> masses(size, 0.0);
    masses[index] = 1.0;
    return FiniteDistribution(std::move(masses));
  }

  std::size_t size() const { return masses_.size(); }
  double operator[](std::size_t i) const { return masses_[i]; }
  std::span<const double> masses() const { return masses_; }

  friend bool operator==(const FiniteDistribution&,
                         const FiniteDistribution&) = default;

 private:
  explicit FiniteDistribution(std::vector<double> masses)
      : masses_(std::move(masses)) {}

  std::vector<double> masses_;
};

// One user's record: m item indices into the universe.
using UserRecord = std::vector<int>;

// n users, each holding exactly m items from a universe of the given size.
class Dataset {
 public:
  static absl::StatusOr<Dataset> Create(int universe_size, int m,
                                        std::vector<UserRecord> users) {
    if (universe_size <= 0) {
      return absl::InvalidArgumentError("universe_size must be positive");
    }
    if (m <= 0) return absl::InvalidArgumentError("m must be positive");
    for (std::size_t i = 0; i < users.size(); ++i) {
      if (users[i].size() != static_cast<std::size_t>(m)) {
        return absl::InvalidArgumentError(absl::StrCat(
            "user ", i, " has ", users[i].size(), " items, expected ", m));
      }
      for (int item : users[i]) {
        if (item < 0 || item >= universe_size) {
          return absl::InvalidArgumentError(absl::StrCat(
              "user ", i, " has item ", item, " outside universe of size ",
              universe_size));
        }
      }
    }
    return Dataset(universe_size, m, std::move(users));
  }

  int universe_size() const { return universe_size_; }
  int m() const { return m_; }
  int n() const { return static_cast<int>(users_.size()); }
  const UserRecord& user(int i) const { return users_[i]; }
  const std::vector<UserRecord>& users() const { return users_; }

  // Copy without the users whose indices are flagged in `removed`.
  Dataset WithoutUsers(const std::vector<bool>& removed) const {
    std::vector<UserRecord> kept;
    kept.reserve(users_.size());
    for (std::size_t i = 0; i < users_.size(); ++i) {
      if (!removed[i]) kept.push_back(users_[i]);
    }
    return Dataset(universe_size_, m_, std::move(kept));
  }

  // Copy with user `i` replaced; the record must already be valid.
  Dataset WithUser(int i, UserRecord record) const {
    Dataset copy = *this;
    copy.users_[i] = std::move(record);
    return copy;
  }

  // Histogram of items over all users.
  std::vector<int> ItemCounts() const {
    std::vector<int> counts(universe_size_, 0);
    for (const UserRecord& u : users_) {
      for (int item : u) ++counts[item];
    }
    return counts;
  }

  friend bool operator==(const Dataset&, const Dataset&) = default;

 private:
  Dataset(int universe_size, int m, std::vector<UserRecord> users)
      : universe_size_(universe_size), m_(m), users_(std::move(users)) {}

  int universe_size_;
  int m_;
  std::vector<UserRecord> users_;
};

// An (epsilon, delta) pair; epsilon in nats.
struct PrivacyParams {
  double epsilon = 0.0;
  double delta = 0.0;

  friend bool operator==(const PrivacyParams&, const PrivacyParams&) = default;
};

// Parameters accepted by mechanisms: epsilon > 0 and 0 <= delta < 1.
inline absl::Status ValidatePrivacyParams(const PrivacyParams& pp) {
  if (!(pp.epsilon > 0.0) || !std::isfinite(pp.epsilon)) {
    return absl::InvalidArgumentError(
        absl::StrCat("epsilon must be positive and finite, got ", pp.epsilon));
  }
  if (!(pp.delta >= 0.0 && pp.delta < 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("delta must lie in [0, 1), got ", pp.delta));
  }
  return absl::OkStatus();
}

namespace internal {

inline absl::Status CheckSameDomain(const FiniteDistribution& a,
                                    const FiniteDistribution& b) {
  if (a.size() != b.size()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "domain size mismatch: ", a.size(), " vs ", b.size()));
  }
  return absl::OkStatus();
}

// Unchecked hockey-stick divergence. A zero mass in `b` contributes the full
// mass of `a` even when exp(eps) overflows.
inline double HockeyStickUnchecked(std::span<const double> a,
                                   std::span<const double> b, double eps) {
  const double scale = std::exp(eps);
  double total = 0.0;
  for (std::size_t x = 0; x < a.size(); ++x) {
    if (a[x] <= 0.0) continue;
    const double excess = b[x] > 0.0 ? a[x] - scale * b[x] : a[x];
    if (excess > 0.0) total += excess;
  }
  return total;
}

}  // namespace internal

// sum_x [a(x) - e^eps b(x)]_+ over the support of `a`.
inline absl::StatusOr<double> HockeyStick(const FiniteDistribution& a,
                                          const FiniteDistribution& b,
                                          double eps) {
  if (absl::Status s = internal::CheckSameDomain(a, b); !s.ok()) return s;
  if (!(eps >= 0.0)) {
    return absl::InvalidArgumentError("eps must be nonnegative");
  }
  return internal::HockeyStickUnchecked(a.masses(), b.masses(), eps);
}

// Both-direction (eps, delta)-indistinguishability.
inline absl::StatusOr<bool> ApproxIndistinguishable(
    const FiniteDistribution& a, const FiniteDistribution& b,
    const PrivacyParams& pp) {
  if (absl::Status s = internal::CheckSameDomain(a, b); !s.ok()) return s;
  if (!(pp.epsilon >= 0.0) || !(pp.delta >= 0.0)) {
    return absl::InvalidArgumentError("privacy parameters must be >= 0");
  }
  return internal::HockeyStickUnchecked(a.masses(), b.masses(), pp.epsilon) <=
             pp.delta &&
         internal::HockeyStickUnchecked(b.masses(), a.masses(), pp.epsilon) <=
             pp.delta;
}

inline absl::StatusOr<double> TvDistance(const FiniteDistribution& a,
                                         const FiniteDistribution& b) {
  if (absl::Status s = internal::CheckSameDomain(a, b); !s.ok()) return s;
  double total = 0.0;
  for (std::size_t x = 0; x < a.size(); ++x) total += std::abs(a[x] - b[x]);
  return 0.5 * total;
}

// KL(a || b) in nats. Returns kInfinity when supp(a) is not inside supp(b).
inline absl::StatusOr<double> KlDivergence(const FiniteDistribution& a,
                                           const FiniteDistribution& b) {
  if (absl::Status s = internal::CheckSameDomain(a, b); !s.ok()) return s;
  double total = 0.0;
  for (std::size_t x = 0; x < a.size(); ++x) {
    if (a[x] <= 0.0) continue;
    if (b[x] <= 0.0) return kInfinity;
    total += a[x] * std::log(a[x] / b[x]);
  }
  return std::max(total, 0.0);
}

// chi^2(a || b) = sum (a - b)^2 / b. Returns kInfinity when supp(a) is not
// inside supp(b).
inline absl::StatusOr<double> Chi2Divergence(const FiniteDistribution& a,
                                             const FiniteDistribution& b) {
  if (absl::Status s = internal::CheckSameDomain(a, b); !s.ok()) return s;
  double total = 0.0;
  for (std::size_t x = 0; x < a.size(); ++x) {
    if (b[x] <= 0.0) {
      if (a[x] > 0.0) return kInfinity;
      continue;
    }
    const double diff = a[x] - b[x];
    total += diff * diff / b[x];
  }
  return total;
}

// max_x |ln a(x) - ln b(x)| over the union of supports; kInfinity if the
// supports differ.
inline absl::StatusOr<double> MaxLogRatio(const FiniteDistribution& a,
                                          const FiniteDistribution& b) {
  if (absl::Status s = internal::CheckSameDomain(a, b); !s.ok()) return s;
  double worst = 0.0;
  for (std::size_t x = 0; x < a.size(); ++x) {
    if (a[x] <= 0.0 && b[x] <= 0.0) continue;
    if (a[x] <= 0.0 || b[x] <= 0.0) return kInfinity;
    worst = std::max(worst, std::abs(std::log(a[x]) - std::log(b[x])));
  }
  return worst;
}

inline absl::StatusOr<double> Clip(double lo, double hi, double x) {
  if (lo > hi) {
    return absl::InvalidArgumentError(
        absl::StrCat("clip bounds out of order: [", lo, ", ", hi, "]"));
  }
  return std::min(hi, std::max(lo, x));
}

}  // namespace user_dp

#endif  // USER_DP_CORE_H_
