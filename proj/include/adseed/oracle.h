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

// Exact optima for tiny instances, used as ground truth in tests.
//
// Both optima are computed from tables over all 2^|N(X)| subsets:
//   best_t(A)  = max f(B) over B within A, |B| <= t   (per-realization optimum)
//   E_t(A)     = E_R[best_t(A & R)]                    (multilinear transform)
// The adaptive optimum is max over S of E_{k-|S|}(N(S)); the non-adaptive
// optimum is max F(T) = E_inf(T) over T coverable within budget.

#ifndef ADSEED_ORACLE_H_
#define ADSEED_ORACLE_H_

#include <cstdint>
#include <utility>
#include <vector>

#include "adseed/core.h"
#include "adseed/eval.h"
#include "adseed/functions.h"
#include "json.hpp"

namespace adseed {

struct OracleLimits {
  int max_first_stage = 8;
  int max_neighbors = 14;
  std::int64_t cap = kDefaultSubsetCap;
};

struct AdaptiveOptimum {
  double value = 0;
  NodeSet first;
  int second_budget = 0;
};

struct NonAdaptiveOptimum {
  NonAdaptivePolicy policy;
  double value = 0;
};

struct OracleReport {
  double opt_adaptive = 0;
  double opt_nonadaptive = 0;
  NodeSet best_first_stage;
  NonAdaptivePolicy best_nonadaptive;
  // (realized neighbors of the best first stage, optimal second stage)
  std::vector<std::pair<NeighborSet, NeighborSet>> per_realization;
};

// Throws CapExceededError beyond the limits. The budget is floored to an
// integer for the adaptive problem.
AdaptiveOptimum OptAdaptiveBruteforce(const Instance& instance, const SubmodularFunction& f,
                                      double budget, const OracleLimits& limits = {});
NonAdaptiveOptimum OptNonAdaptiveBruteforce(const Instance& instance,
                                            const SubmodularFunction& f, double budget,
                                            const OracleLimits& limits = {});

OracleReport RunOracle(const Instance& instance, const SubmodularFunction& f, double budget,
                       bool with_witness, const OracleLimits& limits = {});
nlohmann::json OracleReportToJson(const Instance& instance, const OracleReport& report);

// Seeds a fixed first stage, then the best size-t subset of each realization.
class OptimalSecondStageExecutor : public AdaptiveExecutor {
 public:
  OptimalSecondStageExecutor(const Instance& instance, const SubmodularFunction& f,
                             NodeSet first, int second_budget);

  NodeSet FirstStage() const override { return first_; }
  NeighborSet SecondStage(const Realization& r, RandomStream& coins) const override;

 private:
  const SubmodularFunction& f_;
  NodeSet first_;
  NeighborSet reachable_;
  int second_budget_;
};

}  // namespace adseed

#endif  // ADSEED_ORACLE_H_
