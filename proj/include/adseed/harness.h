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

// Instance generators and closed-form reference values.

#ifndef ADSEED_HARNESS_H_
#define ADSEED_HARNESS_H_

#include <string>

#include "adseed/core.h"
#include "adseed/eval.h"
#include "adseed/functions.h"
#include "adseed/random.h"
#include "json.hpp"

namespace adseed {

struct GapReference {
  std::string family;  // "na" or "la"
  double parameter = 0;
  double adaptive_value = 0;
  double comparison_value = 0;
  double ratio = 0;  // comparison_value / adaptive_value
  // Values as the parameter tends to its limit (delta -> 0, m -> infinity).
  double limit_adaptive = 0;
  double limit_comparison = 0;
  double limit_ratio = 0;
};

nlohmann::json GapReferenceToJson(const GapReference& reference);

// --- Non-adaptive gap ----------------------------------------------------------

// One first-stage node with ceil(1/delta^2) neighbors of probability delta,
// budget 2 and f(T) = [T non-empty].
Problem GenGapNa(double delta);
// adaptive 1 - (1-delta)^ceil(1/delta^2); non-adaptive optimum
// 1 - (1-delta)^floor(1/delta).
GapReference GapNaReference(double delta);

// Seeds the hub and then its lowest realized neighbor.
class GapNaAdaptiveExecutor : public AdaptiveExecutor {
 public:
  explicit GapNaAdaptiveExecutor(const Instance& instance) : instance_(instance) {}
  NodeSet FirstStage() const override { return {0}; }
  NeighborSet SecondStage(const Realization& r, RandomStream& coins) const override;

 private:
  const Instance& instance_;
};

// --- Locally-adaptive gap ------------------------------------------------------

inline constexpr int kMaxGapLaParameter = 64;

// m first-stage nodes, each with a special neighbor (p = 1/m, listed first)
// and m^2 regular neighbors (p = 1); budget m^2 + m + 1; the product-form
// function. Throws InputError for m < 2 or m > max_m.
Problem GenGapLa(int m, int max_m = kMaxGapLaParameter);
// adaptive 1 - (1/2)(1 - 1/m)^m; locally-adaptive upper bound
// 1 - (1/2)(1 - 1/(2m))^m.
GapReference GapLaReference(int m);

// Seeds every first-stage node; then, for the first node whose special
// neighbor realized, that neighbor and all its regular ones, or else the
// regular neighbors of the first node.
class GapLaAdaptiveExecutor : public AdaptiveExecutor {
 public:
  GapLaAdaptiveExecutor(const Instance& instance, const ProductGapFunction& f)
      : instance_(instance), f_(f) {}
  NodeSet FirstStage() const override;
  NeighborSet SecondStage(const Realization& r, RandomStream& coins) const override;

 private:
  const Instance& instance_;
  const ProductGapFunction& f_;
};

// --- Hardness instances --------------------------------------------------------

enum class HardnessMode { kClique, kSparse };

// One first-stage node with l neighbors of probability k/l and budget k, and
// the edge-witness function on a clique or on G(l, density).
Problem GenHardness(int l, double k, HardnessMode mode, double density, RandomStream& stream);

// 1 - Pr[B = 0] - Pr[B = 1]/2 for B ~ Binomial(l, k/l).
double CliqueValue(int l, double k);
// 1 - (k/2 + 1) e^{-k}.
double CliqueLimit(double k);
// (1 - e^{-k/2}) / (1 - (k/2 + 1) e^{-k}).
double HardnessThreshold(double k);

// --- Random instances ----------------------------------------------------------

struct RandomInstanceOptions {
  int nx = 5;
  int deg = 2;
  double p_low = 0.1;
  double p_high = 1.0;
  std::string family = "coverage";  // coverage, mrs, any_nonempty, edge_witness
  double budget = 2;
};

// Neighbors come from a shared pool, so neighbor lists overlap. Ids are
// zero-padded, so id order matches creation order.
Problem GenRandom(const RandomInstanceOptions& options, RandomStream& stream);

}  // namespace adseed

#endif  // ADSEED_HARNESS_H_
