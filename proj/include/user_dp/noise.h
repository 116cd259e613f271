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

#ifndef USER_DP_NOISE_H_
#define USER_DP_NOISE_H_

#include <cmath>
#include <cstdlib>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "user_dp/calculus.h"
#include "user_dp/core.h"
#include "user_dp/random.h"

namespace user_dp {

// Discrete Laplace centered at kappa = 1 + ceil(ln(1/delta)/eps) and
// truncated to {0, ..., 2 kappa}: pmf(x) proportional to exp(-eps |x - kappa|).
class TruncatedDiscreteLaplace {
 public:
  static absl::StatusOr<TruncatedDiscreteLaplace> Create(double eps,
                                                         double delta) {
    absl::StatusOr<int> kappa = TruncationKappa(eps, delta);
    if (!kappa.ok()) return kappa.status();
    std::vector<double> weights(2 * static_cast<std::size_t>(*kappa) + 1);
    for (int x = 0; x <= 2 * *kappa; ++x) {
      weights[x] = std::exp(-eps * std::abs(x - *kappa));
    }
    absl::StatusOr<FiniteDistribution> pmf =
        FiniteDistribution::FromWeights(std::move(weights));
    if (!pmf.ok()) return pmf.status();
    return TruncatedDiscreteLaplace(eps, delta, *kappa, *std::move(pmf));
  }

  double epsilon() const { return epsilon_; }
  double delta() const { return delta_; }
  int kappa() const { return kappa_; }
  const FiniteDistribution& pmf() const { return pmf_; }

  // One inverse-CDF draw over the explicit support.
  int Sample(Rng& rng) const { return static_cast<int>(rng.Sample(pmf_)); }

 private:
  TruncatedDiscreteLaplace(double eps, double delta, int kappa,
                           FiniteDistribution pmf)
      : epsilon_(eps), delta_(delta), kappa_(kappa), pmf_(std::move(pmf)) {}

  double epsilon_;
  double delta_;
  int kappa_;
  FiniteDistribution pmf_;
};

}  // namespace user_dp

#endif  // USER_DP_NOISE_H_
