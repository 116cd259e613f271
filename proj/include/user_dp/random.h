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

// Seeded randomness. Streams are fixed by the mt19937_64 recurrence and the
// bit-level conversions below, so a seed reproduces the same draws on every
// platform; no standard-library distribution objects are involved.

#ifndef USER_DP_RANDOM_H_
#define USER_DP_RANDOM_H_

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "user_dp/core.h"

namespace user_dp {

// SplitMix64 finalizer applied to (master, index). Used to give every trial,
// grid cell or audit pair its own independent stream.
inline std::uint64_t DeriveSeed(std::uint64_t master, std::uint64_t index) {
  std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t NextBits() { return engine_(); }

  // Uniform on [0, 1) with 53 bits of resolution.
  double Uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // Uniform on {0, ..., bound - 1} by rejection; bound > 0.
  std::uint64_t UniformInt(std::uint64_t bound) {
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
    std::uint64_t draw;
    do {
      draw = engine_();
    } while (draw >= limit);
    return draw % bound;
  }

  bool Bernoulli(double p) { return Uniform() < p; }

  // Inverse-CDF draw from `masses` using one uniform. Falls back to the last
  // positive index when rounding leaves the cumulative sum below the draw.
  std::size_t Categorical(std::span<const double> masses) {
    const double u = Uniform();
    double cumulative = 0.0;
    std::size_t last_positive = 0;
    for (std::size_t i = 0; i < masses.size(); ++i) {
      if (masses[i] <= 0.0) continue;
      cumulative += masses[i];
      last_positive = i;
      if (u < cumulative) return i;
    }
    return last_positive;
  }

  std::size_t Sample(const FiniteDistribution& d) {
    return Categorical(d.masses());
  }

  // Uniform k-subset of {0, ..., n - 1} as a membership mask (selection
  // sampling, Knuth's Algorithm S).
  std::vector<bool> Subset(int n, int k) {
    std::vector<bool> chosen(n, false);
    int needed = k;
    for (int i = 0; i < n && needed > 0; ++i) {
      if (UniformInt(static_cast<std::uint64_t>(n - i)) <
          static_cast<std::uint64_t>(needed)) {
        chosen[i] = true;
        --needed;
      }
    }
    return chosen;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace user_dp

#endif  // USER_DP_RANDOM_H_
