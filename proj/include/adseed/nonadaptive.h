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

// Non-adaptive policies: the epsilon-block greedy, block finders, the
// first-stage trimming repair, and the contention-resolution executor that
// turns an expected-budget policy into a per-realization feasible one.

#ifndef ADSEED_NONADAPTIVE_H_
#define ADSEED_NONADAPTIVE_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "adseed/core.h"
#include "adseed/eval.h"
#include "adseed/functions.h"
#include "adseed/io.h"
#include "adseed/oracle.h"

namespace adseed {

// Largest budget handled by the brute-force fallback.
inline constexpr double kSmallBudgetLimit = 10;

// Exact F where a structured form exists or |T| fits the enumeration limit,
// otherwise the mean over a shared bank of realizations.
class NonAdaptiveEvaluator {
 public:
  NonAdaptiveEvaluator(const Instance& instance, const SubmodularFunction& f,
                       std::int64_t samples, std::uint64_t seed,
                       int enumeration_limit = kDefaultEnumerationLimit);

  double Value(std::span<const int> second) const;
  bool IsExact(std::span<const int> second) const;
  // Exact value, or a fresh Monte Carlo estimate with `samples` draws.
  Estimate Precise(std::span<const int> second, std::int64_t samples,
                   std::uint64_t seed) const;

 private:
  const Instance& instance_;
  const SubmodularFunction& f_;
  bool structured_;
  int enumeration_limit_;
  std::int64_t bank_samples_;
  std::uint64_t bank_seed_;
  std::optional<RealizationBank> bank_;
};

// A non-adaptive block: first-stage node x and extra neighbors B. Density
// is F_T(B) / (1 + C(B)).
struct BlockCandidate {
  int x = -1;
  NeighborSet block;
  double marginal = 0;
  double density = 0;
  double cost = 0;  // 1 + C(B)
};

// Orders candidates: higher density, then smaller cost, then (x, B).
bool BetterBlock(const BlockCandidate& a, const BlockCandidate& b);

class BlockFinder {
 public:
  virtual ~BlockFinder() = default;
  // The block to add to `state` with cost at most max_cost; x == -1 when no
  // block exists.
  virtual BlockCandidate Find(const Instance& instance, const SubmodularFunction& f,
                              const NonAdaptivePolicy& state, double max_cost) const = 0;
  // Budget the greedy keeps in reserve, 3/eps for eps-blocks.
  virtual double Reserve() const = 0;
};

struct EnumerationFinderOptions {
  std::int64_t cap = kDefaultSubsetCap;
  std::int64_t samples = 1000;          // shared realizations per iteration
  std::int64_t refine_samples = 10000;  // re-estimate of the winner
  std::uint64_t seed = 1;
  int enumeration_limit = kDefaultEnumerationLimit;
};

// Tries every x and every B within N(x) \ T with C(B) <= 1/eps.
class EnumerationBlockFinder : public BlockFinder {
 public:
  EnumerationBlockFinder(double epsilon, EnumerationFinderOptions options = {});

  BlockCandidate Find(const Instance& instance, const SubmodularFunction& f,
                      const NonAdaptivePolicy& state, double max_cost) const override;
  double Reserve() const override { return 3.0 / epsilon_; }
  double epsilon() const { return epsilon_; }

 private:
  double epsilon_;
  EnumerationFinderOptions options_;
};

struct GreedyStep {
  int iteration = 0;
  std::string block;
  double marginal = 0;
  double density = 0;
  double cost = 0;   // cumulative
  double value = 0;  // cumulative
};

struct GreedyTrace {
  std::vector<GreedyStep> steps;
  // Columns: iteration, block, density, cost, value.
  std::string ToCsv() const;
};

struct NonAdaptiveGreedyResult {
  NonAdaptivePolicy policy;
  GreedyTrace trace;
};

// Adds the finder's block while |S| + C(T) <= k - reserve, never letting the
// cost pass k. Stops early when no block has positive density. Throws
// InputError when k <= reserve.
NonAdaptiveGreedyResult NonAdaptiveGreedy(const Instance& instance, const SubmodularFunction& f,
                                          double budget, const BlockFinder& finder,
                                          const EvalOptions& value_options = {});

// Exact optimal adaptive policy by brute force, for k <= kSmallBudgetLimit.
AdaptiveOptimum SmallKFallback(const Instance& instance, const SubmodularFunction& f,
                               double budget, const OracleLimits& limits = {});

// Removes ceil(c) first-stage nodes one at a time, each time the one whose
// removal (with the second-stage nodes only it reaches) loses least value.
// Throws InputError when ceil(c) >= |S|.
NonAdaptivePolicy TrimFirstStage(const Instance& instance, const SubmodularFunction& f,
                                 const NonAdaptivePolicy& policy, double c,
                                 const NonAdaptiveEvaluator& evaluator);

// keep_prob = 1 - eps, cap = k - |S|.
CrsSpec CrsSpecFor(const NonAdaptivePolicy& policy, double epsilon, double budget);
// Whether eps < 1/5 and k - |S| > eps^-4.
bool CrsGuaranteeApplies(const NonAdaptivePolicy& policy, double epsilon, double budget);

// Seeds S; in realization R keeps each node of R & T with keep_prob and
// seeds the kept set iff its size is at most cap.
class CrsExecutor : public AdaptiveExecutor {
 public:
  CrsExecutor(NonAdaptivePolicy policy, CrsSpec spec);

  NodeSet FirstStage() const override { return policy_.first; }
  NeighborSet SecondStage(const Realization& r, RandomStream& coins) const override;
  const CrsSpec& spec() const { return spec_; }

 private:
  NonAdaptivePolicy policy_;
  CrsSpec spec_;
};

struct AdaptiveConversion {
  bool fallback = false;  // brute force used; `optimum` is set
  AdaptiveOptimum optimum;
  NonAdaptivePolicy policy;  // after trimming
  CrsSpec crs;
  bool trimmed = false;
  bool guarantee_applies = false;
  GreedyTrace trace;
};

// Greedy non-adaptive policy followed by the contention-resolution executor
// with parameter eps/4. Small budgets go to the brute-force fallback, and a
// first stage that leaves too little budget for the second stage is trimmed
// when enough first-stage nodes exist.
AdaptiveConversion NonAdaptiveToAdaptive(const Instance& instance, const SubmodularFunction& f,
                                         double budget, double epsilon,
                                         const BlockFinder& finder,
                                         const NonAdaptiveEvaluator& evaluator,
                                         const OracleLimits& limits = {});

}  // namespace adseed

#endif  // ADSEED_NONADAPTIVE_H_
