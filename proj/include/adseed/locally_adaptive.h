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

// Locally-adaptive policies: the greedy over adaptive eps-blocks and the
// conversions non-adaptive -> eps-local -> eps-locally-adaptive.

#ifndef ADSEED_LOCALLY_ADAPTIVE_H_
#define ADSEED_LOCALLY_ADAPTIVE_H_

#include <cstdint>
#include <optional>

#include "adseed/core.h"
#include "adseed/eval.h"
#include "adseed/functions.h"
#include "adseed/nonadaptive.h"
#include "adseed/oracle.h"

namespace adseed {

struct BlockSearchOptions {
  std::int64_t samples = 1000;
  std::uint64_t seed = 1;
  std::int64_t cap = kDefaultSubsetCap;  // (S, t) candidates
  // Per-realization exact optimization up to this many subsets.
  std::int64_t exact_cap = 10000;
  std::optional<SecondStageMode> force_mode;
  // Realizations are enumerated instead of sampled up to this many neighbors.
  int enumeration_limit = 12;
};

struct BlockSearchResult {
  AdaptiveBlockSpec block;
  Estimate marginal_value;
  double density = 0;  // marginal_value.mean / (|S| + t)
};

// Best (S, t) with 1 <= |S| <= ceil(1/eps^2), 1 <= t <= ceil(2/eps) and
// |S| + t <= max_cost, given the blocks of `current`. An empty first stage
// in the result means no candidate exists.
BlockSearchResult FindOptimalAdaptiveBlock(const Instance& instance, const SubmodularFunction& f,
                                           const LocallyAdaptivePolicy& current, double epsilon,
                                           double max_cost,
                                           const BlockSearchOptions& options = {});

struct LocallyAdaptiveGreedyResult {
  LocallyAdaptivePolicy policy;
  GreedyTrace trace;
};

// Appends the densest block while C(B) < k - 3/eps^2. Throws InputError when
// k <= 3/eps^2.
LocallyAdaptiveGreedyResult LocallyAdaptiveGreedy(const Instance& instance,
                                                  const SubmodularFunction& f, double budget,
                                                  double epsilon,
                                                  const BlockSearchOptions& options = {});

// The optimal adaptive policy as a single exact block.
LocallyAdaptivePolicy AsLocallyAdaptive(const AdaptiveOptimum& optimum, double epsilon);

struct LocallyAdaptiveSolution {
  LocallyAdaptivePolicy policy;
  GreedyTrace trace;
  bool fallback = false;
  AdaptiveOptimum optimum;  // set when fallback
};

// The greedy, or the brute-force optimum when k <= 3/eps^2.
LocallyAdaptiveSolution SolveLocallyAdaptive(const Instance& instance,
                                             const SubmodularFunction& f, double budget,
                                             double epsilon,
                                             const BlockSearchOptions& options = {},
                                             const OracleLimits& limits = {});

// Splits (S, T) into budgeted eps-blocks. Nodes of S are taken in id order,
// each neighbor belongs to its first parent in that order, and a parent
// whose neighbors overflow 2/eps is repeated across blocks. Blocks of lowest
// marginal density are then dropped until the cost is at most `budget`.
EpsilonLocalPolicy NonAdaptiveToLocal(const Instance& instance, const NonAdaptivePolicy& policy,
                                      double epsilon, double budget,
                                      const NonAdaptiveEvaluator& evaluator);

// Each block (S, k_b, T) becomes a thinning block with keep probability
// 1 - eps, cap floor(k_b) and second-stage budget floor(k_b).
LocallyAdaptivePolicy LocalToLocallyAdaptive(const EpsilonLocalPolicy& local, double epsilon);

}  // namespace adseed

#endif  // ADSEED_LOCALLY_ADAPTIVE_H_
