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

// Closed-form privacy parameter arithmetic. All logarithms are natural.
//
// Constants that the asymptotic statements leave unspecified are explicit
// arguments defaulting to 1; none of the outputs below carries a hidden
// constant.

#ifndef USER_DP_CALCULUS_H_
#define USER_DP_CALCULUS_H_

#include <cmath>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/str_cat.h"
#include "user_dp/core.h"

namespace user_dp {

namespace internal {

inline absl::Status CheckCalculusParams(const PrivacyParams& pp) {
  if (!(pp.epsilon >= 0.0) || !std::isfinite(pp.epsilon) ||
      !(pp.delta >= 0.0 && pp.delta <= 1.0)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "invalid privacy parameters (", pp.epsilon, ", ", pp.delta, ")"));
  }
  return absl::OkStatus();
}

}  // namespace internal

// If A ~(first) B and B ~(second) C then A ~(result) C:
// (eps + eps', e^eps delta' + e^eps' delta) with first = (eps, delta) and
// second = (eps', delta').
inline absl::StatusOr<PrivacyParams> ComposeTriangle(
    const PrivacyParams& first, const PrivacyParams& second) {
  if (absl::Status s = internal::CheckCalculusParams(first); !s.ok()) return s;
  if (absl::Status s = internal::CheckCalculusParams(second); !s.ok()) return s;
  return PrivacyParams{
      first.epsilon + second.epsilon,
      std::exp(second.epsilon) * first.delta +
          std::exp(first.epsilon) * second.delta};
}

// k-neighbor guarantee from an item-level one:
// (k eps, (e^{k eps} - 1) / (e^eps - 1) * delta).
inline absl::StatusOr<PrivacyParams> GroupPrivacy(const PrivacyParams& pp,
                                                  int k) {
  if (absl::Status s = internal::CheckCalculusParams(pp); !s.ok()) return s;
  if (k < 1) return absl::InvalidArgumentError("group size must be >= 1");
  if (k == 1) return pp;
  // The geometric sum 1 + e^eps + ... + e^{(k-1)eps}; equals k at eps = 0.
  const double factor = pp.epsilon == 0.0
                            ? static_cast<double>(k)
                            : std::expm1(k * pp.epsilon) /
                                  std::expm1(pp.epsilon);
  return PrivacyParams{k * pp.epsilon, factor * pp.delta};
}

// Running on a uniformly random eta-fraction of the input:
// (ln(1 + eta (e^eps - 1)), eta delta).
inline absl::StatusOr<PrivacyParams> SubsampleAmplify(const PrivacyParams& pp,
                                                      double eta) {
  if (absl::Status s = internal::CheckCalculusParams(pp); !s.ok()) return s;
  if (!(eta > 0.0 && eta <= 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("sampling ratio must lie in (0, 1], got ", eta));
  }
  if (eta == 1.0) return pp;
  return PrivacyParams{std::log1p(eta * std::expm1(pp.epsilon)),
                       eta * pp.delta};
}

// Internal parameters of the propose-test-release transformation.
struct DelStabParams {
  double eps_bar;
  double delta_bar;
  int kappa;
};

// kappa(eps, delta) = 1 + ceil(ln(1/delta) / eps), the half-width of the
// truncated discrete Laplace support. A ratio within a relative 1e-12 of an
// integer counts as that integer, so ln(1/e^-1) = 1 + ulp still gives 1.
inline absl::StatusOr<int> TruncationKappa(double eps, double delta) {
  if (!(eps > 0.0) || !std::isfinite(eps)) {
    return absl::InvalidArgumentError("kappa needs eps > 0");
  }
  if (!(delta > 0.0 && delta < 1.0)) {
    return absl::InvalidArgumentError("kappa needs 0 < delta < 1");
  }
  const double ratio = std::log(1.0 / delta) / eps;
  const double nearest = std::round(ratio);
  const double steps = std::fabs(ratio - nearest) <= 1e-12 * std::max(1.0, nearest)
                           ? nearest
                           : std::ceil(ratio);
  if (steps > 1e8) {
    return absl::InvalidArgumentError("kappa is too large to represent");
  }
  return 1 + static_cast<int>(steps);
}

// eps_bar = eps / 3, delta_bar = delta / (e^{2 eps_bar} + e^{eps_bar} + 2),
// kappa = kappa(eps_bar, delta_bar).
inline absl::StatusOr<DelStabParams> ComputeDelStabParams(
    const PrivacyParams& pp) {
  if (absl::Status s = ValidatePrivacyParams(pp); !s.ok()) return s;
  if (pp.delta == 0.0) {
    return absl::InvalidArgumentError("DelStab requires delta > 0");
  }
  const double eps_bar = pp.epsilon / 3.0;
  const double delta_bar =
      pp.delta / (std::exp(2.0 * eps_bar) + std::exp(eps_bar) + 2.0);
  absl::StatusOr<int> kappa = TruncationKappa(eps_bar, delta_bar);
  if (!kappa.ok()) return kappa.status();
  return DelStabParams{eps_bar, delta_bar, *kappa};
}

// Item-level parameters (eps', delta') whose mechanisms DelStab turns into
// (eps, delta)-user-level ones:
//   eps'   = eps^2 / (ln(1/delta) sqrt(m ln(m/delta)))
//   delta' = c_delta * delta * eps / (m ln(1/delta)).
inline absl::StatusOr<PrivacyParams> TranslateItemToUser(
    const PrivacyParams& pp, int m, double c_delta = 1.0) {
  if (absl::Status s = ValidatePrivacyParams(pp); !s.ok()) return s;
  if (pp.delta == 0.0) {
    return absl::InvalidArgumentError("translation requires delta > 0");
  }
  if (m < 1) return absl::InvalidArgumentError("m must be >= 1");
  if (!(c_delta > 0.0)) return absl::InvalidArgumentError("c_delta must be > 0");
  const double log_inv_delta = std::log(1.0 / pp.delta);
  const double inner = m * std::log(m / pp.delta);
  if (!(inner > 0.0)) {
    return absl::InvalidArgumentError("m * ln(m / delta) must be positive");
  }
  return PrivacyParams{
      pp.epsilon * pp.epsilon / (log_inv_delta * std::sqrt(inner)),
      c_delta * pp.delta * pp.epsilon / (m * log_inv_delta)};
}

// Shape of the user complexity bound with unit constants:
// c * (ln(1/delta)/eps + n_item/m). For annotating harness output only.
inline absl::StatusOr<double> UserComplexityEstimate(double n_item,
                                                     const PrivacyParams& pp,
                                                     int m, double c = 1.0) {
  if (absl::Status s = ValidatePrivacyParams(pp); !s.ok()) return s;
  if (pp.delta == 0.0) return absl::InvalidArgumentError("needs delta > 0");
  if (m < 1) return absl::InvalidArgumentError("m must be >= 1");
  if (!(n_item >= 0.0)) return absl::InvalidArgumentError("n_item must be >= 0");
  return c * (std::log(1.0 / pp.delta) / pp.epsilon + n_item / m);
}

// Same-epsilon variant: c * (ln(1/delta)/eps
//   + ln(1/delta)^{1.5} / (eps sqrt(m)) * n_item), where n_item is the
// item-level complexity at the same epsilon.
inline absl::StatusOr<double> UserComplexityEstimateSameEps(
    double n_item, const PrivacyParams& pp, int m, double c = 1.0) {
  if (absl::Status s = ValidatePrivacyParams(pp); !s.ok()) return s;
  if (pp.delta == 0.0) return absl::InvalidArgumentError("needs delta > 0");
  if (m < 1) return absl::InvalidArgumentError("m must be >= 1");
  if (!(n_item >= 0.0)) return absl::InvalidArgumentError("n_item must be >= 0");
  const double log_inv_delta = std::log(1.0 / pp.delta);
  return c * (log_inv_delta / pp.epsilon +
              std::pow(log_inv_delta, 1.5) / (pp.epsilon * std::sqrt(m)) *
                  n_item);
}

}  // namespace user_dp

#endif  // USER_DP_CALCULUS_H_
