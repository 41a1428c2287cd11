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

// Expected-value evaluation of policies, exact and by sampling, and the
// per-realization second-stage optimizer.
//
// Monte Carlo sample i always draws from Substream(i) of the seed, so an
// estimate is reproducible for any worker count, and two policies evaluated
// with the same seed see the same realizations.

#ifndef ADSEED_EVAL_H_
#define ADSEED_EVAL_H_

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "adseed/core.h"
#include "adseed/functions.h"
#include "json.hpp"

namespace adseed {

struct Estimate {
  double mean = 0;
  double std_error = 0;
  std::int64_t samples = 0;
  bool exact = false;
};

Estimate ExactEstimate(double value);
// Sample mean and standard error of the mean.
Estimate SampleEstimate(std::span<const double> values);
nlohmann::json EstimateToJson(const Estimate& estimate);

enum class SecondStageMode { kExact, kGreedy };

// Best subset of `candidates` of size <= t to add to `base`. Exact mode
// enumerates all min(t, |candidates|)-subsets and throws CapExceededError
// when there are more than `cap`; greedy mode adds the largest marginal gain
// (lowest index on ties) until t picks or no positive gain.
NeighborSet SecondStageOpt(const SubmodularFunction& f, std::span<const int> base,
                           std::span<const int> candidates, int t, SecondStageMode mode,
                           std::int64_t cap = kDefaultSubsetCap);

// E[min(cap, N)] for N a sum of independent Bernoulli(probabilities).
double ExpectedTruncatedCount(std::span<const double> probabilities, int cap);

// Exact F(T) for coverage and matroid-rank-sum functions (closed form and
// a truncated count DP per part); nullopt for other families.
std::optional<double> StructuredValue(const Instance& instance, const SubmodularFunction& f,
                                      std::span<const int> second);

enum class EvalMethod { kAuto, kExactEnum, kClosedFormCoverage, kMonteCarlo };

struct EvalOptions {
  EvalMethod method = EvalMethod::kAuto;
  std::int64_t samples = 10000;
  std::uint64_t seed = 1;
  int enumeration_limit = kDefaultEnumerationLimit;
};

// F(T) = E_R[f(T & R)]. kAuto picks the closed form for coverage and
// matroid rank sums, exact enumeration when |T| fits the limit, Monte Carlo
// otherwise.
Estimate ValueNonAdaptive(const Instance& instance, const SubmodularFunction& f,
                          std::span<const int> second, const EvalOptions& options = {});

// Fixed sample of realizations shared by many evaluations (common random
// numbers). Realization i is drawn from Substream(i) of `seed`.
class RealizationBank {
 public:
  RealizationBank(const Instance& instance, std::int64_t samples, std::uint64_t seed);

  std::size_t size() const { return samples_.size(); }
  const Realization& operator[](std::size_t i) const { return samples_[i]; }

  Estimate ValueNonAdaptive(const SubmodularFunction& f, std::span<const int> second) const;

 private:
  std::vector<Realization> samples_;
};

// --- Locally-adaptive execution --------------------------------------------------

struct ExecutionOptions {
  // Exact-mode blocks fall back to greedy above this many subsets.
  std::int64_t exact_cap = 10000;
};

// Number of thinning coins a policy consumes under r: one per realized
// target of each CRS block, in block order and then ascending index.
int CoinCount(const LocallyAdaptivePolicy& policy, const Realization& r);

// Runs the blocks in order. Each block picks among its realized neighbors
// not yet seeded, given the union of earlier picks. coins[i] != 0 keeps the
// i-th coin position (see CoinCount).
NeighborSet ExecutePolicy(const Instance& instance, const SubmodularFunction& f,
                          const LocallyAdaptivePolicy& policy, const Realization& r,
                          std::span<const std::uint8_t> coins,
                          const ExecutionOptions& options = {});
// Same, drawing the coins from `stream`.
NeighborSet ExecutePolicy(const Instance& instance, const SubmodularFunction& f,
                          const LocallyAdaptivePolicy& policy, const Realization& r,
                          RandomStream& stream, const ExecutionOptions& options = {});

// F(B). Exact enumeration covers both the realizations of every block's
// neighbors and every thinning outcome.
Estimate ValueLocallyAdaptive(const Instance& instance, const SubmodularFunction& f,
                              const LocallyAdaptivePolicy& policy,
                              const EvalOptions& options = {},
                              const ExecutionOptions& execution = {});

// --- General adaptive policies -------------------------------------------------------

class AdaptiveExecutor {
 public:
  virtual ~AdaptiveExecutor() = default;
  virtual NodeSet FirstStage() const = 0;
  // Second-stage seeds for realization r; may draw private coins.
  virtual NeighborSet SecondStage(const Realization& r, RandomStream& coins) const = 0;
};

class LocallyAdaptiveExecutor : public AdaptiveExecutor {
 public:
  LocallyAdaptiveExecutor(const Instance& instance, const SubmodularFunction& f,
                          LocallyAdaptivePolicy policy, ExecutionOptions options = {});

  NodeSet FirstStage() const override;
  NeighborSet SecondStage(const Realization& r, RandomStream& coins) const override;

 private:
  const Instance& instance_;
  const SubmodularFunction& f_;
  LocallyAdaptivePolicy policy_;
  ExecutionOptions options_;
};

// Monte Carlo estimate of E_R[f(executor(R))]. Throws InfeasiblePolicyError
// naming the realization if any sample seeds an unrealized or unreachable
// neighbor or more than `budget` nodes in total.
Estimate ValueAdaptiveExecutor(const Instance& instance, const SubmodularFunction& f,
                               const AdaptiveExecutor& executor, double budget,
                               const EvalOptions& options = {});

}  // namespace adseed

#endif  // ADSEED_EVAL_H_
