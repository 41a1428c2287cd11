// Copyright 2026 The Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef ADSEED_RANDOM_H_
#define ADSEED_RANDOM_H_

#include <cstdint>
#include <random>

namespace adseed {

// Seeded pseudo-random stream. Every stochastic routine takes one of these
// explicitly; nothing in the library touches global random state.
//
// Substream(i) depends only on (seed, i), never on how many values have been
// drawn, so Monte Carlo sample i sees the same randomness no matter which
// worker runs it or in which order.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed);

  RandomStream Substream(std::uint64_t index) const;

  // Uniform double in [0, 1) with 53 random bits.
  double Uniform();
  bool Bernoulli(double p) { return Uniform() < p; }
  // Uniform integer in [0, n). n must be positive.
  std::uint64_t UniformInt(std::uint64_t n);

  std::uint64_t seed() const { return seed_; }
  std::mt19937_64& engine() { return engine_; }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

std::uint64_t SplitMix64(std::uint64_t x);

}  // namespace adseed

#endif  // ADSEED_RANDOM_H_
