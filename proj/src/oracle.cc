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

#include "adseed/oracle.h"

#include <algorithm>
#include <bit>
#include <cmath>

#include "adseed/errors.h"
#include "adseed/parallel.h"

namespace adseed {
namespace {

using Mask = std::uint32_t;

void CheckLimits(const Instance& instance, const OracleLimits& limits) {
  if (instance.num_first_stage() > limits.max_first_stage) {
    throw CapExceededError("oracle supports at most " + std::to_string(limits.max_first_stage) +
                           " first-stage nodes, got " +
                           std::to_string(instance.num_first_stage()));
  }
  if (instance.num_neighbors() > limits.max_neighbors) {
    throw CapExceededError("oracle supports at most " + std::to_string(limits.max_neighbors) +
                           " neighbors, got " + std::to_string(instance.num_neighbors()));
  }
  const std::int64_t tables = std::int64_t{1} << instance.num_neighbors();
  if (tables > limits.cap) {
    throw CapExceededError("oracle tables need " + std::to_string(tables) +
                           " subsets, above the cap of " + std::to_string(limits.cap));
  }
}

std::vector<int> Members(Mask mask) {
  std::vector<int> out;
  for (int i = 0; mask; ++i, mask >>= 1) {
    if (mask & 1) out.push_back(i);
  }
  return out;
}

// f at every subset of the ground set.
std::vector<double> ValueTable(const SubmodularFunction& f, int n) {
  std::vector<double> table(std::size_t{1} << n);
  ParallelFor(table.size(), [&](std::size_t m) { table[m] = f.Value(Members(static_cast<Mask>(m))); });
  return table;
}

// In place: table[A] <- E_R[table[A & R]].
void MultilinearTransform(std::vector<double>& table, std::span<const double> p) {
  const int n = static_cast<int>(p.size());
  for (int i = 0; i < n; ++i) {
    const Mask bit = Mask{1} << i;
    for (Mask m = 0; m < table.size(); ++m) {
      if (m & bit) table[m] = p[i] * table[m] + (1.0 - p[i]) * table[m ^ bit];
    }
  }
}

// best[A] = max f(B), B within A, |B| <= t. Monotone f makes the max over
// subsets of size exactly min(t, |A|) sufficient, and those are reached by
// dropping one element at a time.
std::vector<double> BestWithin(const std::vector<double>& values, int t) {
  std::vector<double> best(values.size());
  for (Mask m = 0; m < values.size(); ++m) {
    if (std::popcount(m) <= t) {
      best[m] = values[m];
      continue;
    }
    double b = 0;
    for (Mask rest = m; rest; rest &= rest - 1) {
      const Mask bit = rest & (~rest + 1);
      b = std::max(b, best[m ^ bit]);
    }
    best[m] = b;
  }
  return best;
}

std::vector<Mask> NeighborMasks(const Instance& instance) {
  const int nx = instance.num_first_stage();
  std::vector<Mask> cover(std::size_t{1} << nx, 0);
  for (Mask s = 1; s < cover.size(); ++s) {
    const int x = std::countr_zero(s);
    Mask kids = 0;
    for (int j : instance.children(x)) kids |= Mask{1} << j;
    cover[s] = cover[s & (s - 1)] | kids;
  }
  return cover;
}

}  // namespace

AdaptiveOptimum OptAdaptiveBruteforce(const Instance& instance, const SubmodularFunction& f,
                                      double budget, const OracleLimits& limits) {
  CheckLimits(instance, limits);
  const int n = instance.num_neighbors();
  const int k = static_cast<int>(std::floor(budget + kBudgetTolerance));
  const std::vector<double> values = ValueTable(f, n);
  const std::vector<Mask> cover = NeighborMasks(instance);
  AdaptiveOptimum best;
  // Larger t tables are only built when some first stage needs them.
  std::vector<std::vector<double>> expected(k + 1);
  for (Mask s = 0; s < cover.size(); ++s) {
    const int size = std::popcount(s);
    if (size > k) continue;
    const int t = std::min(k - size, n);
    if (expected[t].empty()) {
      expected[t] = BestWithin(values, t);
      MultilinearTransform(expected[t], instance.probabilities());
    }
    const double v = expected[t][cover[s]];
    if (s == 0 || v > best.value + 1e-15) {
      best.value = v;
      best.first = Members(s);
      best.second_budget = k - size;
    }
  }
  return best;
}

NonAdaptiveOptimum OptNonAdaptiveBruteforce(const Instance& instance,
                                            const SubmodularFunction& f, double budget,
                                            const OracleLimits& limits) {
  CheckLimits(instance, limits);
  const int n = instance.num_neighbors();
  const int nx = instance.num_first_stage();
  std::vector<double> expected = ValueTable(f, n);
  MultilinearTransform(expected, instance.probabilities());

  // min_first[T] = fewest first-stage nodes whose neighbors cover T.
  const std::vector<Mask> cover = NeighborMasks(instance);
  std::vector<int> min_first(std::size_t{1} << n, nx + 1);
  for (Mask s = 0; s < cover.size(); ++s) {
    min_first[cover[s]] = std::min(min_first[cover[s]], std::popcount(s));
  }
  for (int i = 0; i < n; ++i) {
    const Mask bit = Mask{1} << i;
    for (Mask m = 0; m < min_first.size(); ++m) {
      if (!(m & bit)) min_first[m] = std::min(min_first[m], min_first[m | bit]);
    }
  }

  NonAdaptiveOptimum best;
  Mask best_t = 0;
  for (Mask t = 0; t < expected.size(); ++t) {
    if (min_first[t] > nx) continue;
    double cost = min_first[t];
    for (Mask rest = t; rest; rest &= rest - 1) {
      cost += instance.probability(std::countr_zero(rest));
    }
    if (cost > budget + kBudgetTolerance) continue;
    if (expected[t] > best.value + 1e-15) {
      best.value = expected[t];
      best_t = t;
    }
  }
  best.policy.second = Members(best_t);
  if (best_t != 0) {
    for (Mask s = 0; s < cover.size(); ++s) {
      if ((cover[s] & best_t) == best_t && std::popcount(s) == min_first[best_t]) {
        best.policy.first = Members(s);
        break;
      }
    }
  }
  return best;
}

OracleReport RunOracle(const Instance& instance, const SubmodularFunction& f, double budget,
                       bool with_witness, const OracleLimits& limits) {
  OracleReport report;
  const AdaptiveOptimum adaptive = OptAdaptiveBruteforce(instance, f, budget, limits);
  const NonAdaptiveOptimum na = OptNonAdaptiveBruteforce(instance, f, budget, limits);
  report.opt_adaptive = adaptive.value;
  report.opt_nonadaptive = na.value;
  report.best_first_stage = adaptive.first;
  report.best_nonadaptive = na.policy;
  if (with_witness) {
    const NeighborSet ground = instance.NeighborsOf(adaptive.first);
    ForEachRealization(
        instance, ground,
        [&](const Realization& r, double) {
          const NeighborSet present = r.Present();
          report.per_realization.emplace_back(
              present, SecondStageOpt(f, {}, present, adaptive.second_budget,
                                      SecondStageMode::kExact, limits.cap));
        },
        limits.max_neighbors);
  }
  return report;
}

nlohmann::json OracleReportToJson(const Instance& instance, const OracleReport& report) {
  auto ids = [&](std::span<const int> set, bool first_stage) {
    nlohmann::json out = nlohmann::json::array();
    for (int i : set) {
      out.push_back(first_stage ? instance.first_stage_id(i) : instance.neighbor_id(i));
    }
    return out;
  };
  nlohmann::json witness = nlohmann::json::array();
  for (const auto& [present, chosen] : report.per_realization) {
    witness.push_back({{"realization", ids(present, false)}, {"second", ids(chosen, false)}});
  }
  nlohmann::json out = {
      {"opt_adaptive", report.opt_adaptive},
      {"opt_nonadaptive", report.opt_nonadaptive},
      {"best_first_stage", ids(report.best_first_stage, true)},
      {"best_nonadaptive",
       {{"first", ids(report.best_nonadaptive.first, true)},
        {"second", ids(report.best_nonadaptive.second, false)}}}};
  if (!report.per_realization.empty()) out["per_realization_choices"] = witness;
  return out;
}

OptimalSecondStageExecutor::OptimalSecondStageExecutor(const Instance& instance,
                                                       const SubmodularFunction& f,
                                                       NodeSet first, int second_budget)
    : f_(f),
      first_(std::move(first)),
      reachable_(instance.NeighborsOf(first_)),
      second_budget_(second_budget) {}

NeighborSet OptimalSecondStageExecutor::SecondStage(const Realization& r,
                                                    RandomStream&) const {
  return SecondStageOpt(f_, {}, r.Filter(reachable_), second_budget_, SecondStageMode::kExact);
}

}  // namespace adseed
