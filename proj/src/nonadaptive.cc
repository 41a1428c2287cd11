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

#include "adseed/nonadaptive.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

#include "adseed/errors.h"
#include "adseed/parallel.h"

namespace adseed {
namespace {

constexpr double kDensityTolerance = 1e-12;

std::string BlockLabel(const Instance& instance, int x, std::span<const int> block) {
  std::string out = instance.first_stage_id(x) + ":";
  for (std::size_t i = 0; i < block.size(); ++i) {
    if (i) out += "+";
    out += instance.neighbor_id(block[i]);
  }
  return out;
}

// Visits every non-empty subset of `items` with expected size <= limit.
void ForEachAffordableSubset(const Instance& instance, std::span<const int> items, double limit,
                             const std::function<void(const NeighborSet&, double)>& visit) {
  NeighborSet chosen;
  std::function<void(std::size_t, double)> dfs = [&](std::size_t from, double cost) {
    for (std::size_t i = from; i < items.size(); ++i) {
      const double c = cost + instance.probability(items[i]);
      if (c > limit + kBudgetTolerance) continue;
      chosen.push_back(items[i]);
      visit(chosen, c);
      dfs(i + 1, c);
      chosen.pop_back();
    }
  };
  dfs(0, 0.0);
}

}  // namespace

NonAdaptiveEvaluator::NonAdaptiveEvaluator(const Instance& instance,
                                           const SubmodularFunction& f,
                                           std::int64_t samples, std::uint64_t seed,
                                           int enumeration_limit)
    : instance_(instance),
      f_(f),
      structured_(StructuredValue(instance, f, {}).has_value()),
      enumeration_limit_(enumeration_limit),
      bank_samples_(samples),
      bank_seed_(seed) {
  if (!structured_ && instance.num_neighbors() > enumeration_limit_) {
    bank_.emplace(instance, bank_samples_, bank_seed_);
  }
}

bool NonAdaptiveEvaluator::IsExact(std::span<const int> second) const {
  return structured_ || static_cast<int>(second.size()) <= enumeration_limit_;
}

double NonAdaptiveEvaluator::Value(std::span<const int> second) const {
  if (structured_) return *StructuredValue(instance_, f_, second);
  if (static_cast<int>(second.size()) <= enumeration_limit_) {
    EvalOptions options;
    options.method = EvalMethod::kExactEnum;
    options.enumeration_limit = enumeration_limit_;
    return ValueNonAdaptive(instance_, f_, second, options).mean;
  }
  return bank_->ValueNonAdaptive(f_, second).mean;
}

Estimate NonAdaptiveEvaluator::Precise(std::span<const int> second, std::int64_t samples,
                                       std::uint64_t seed) const {
  if (IsExact(second)) return ExactEstimate(Value(second));
  EvalOptions options;
  options.method = EvalMethod::kMonteCarlo;
  options.samples = samples;
  options.seed = seed;
  return ValueNonAdaptive(instance_, f_, second, options);
}

bool BetterBlock(const BlockCandidate& a, const BlockCandidate& b) {
  if (b.x < 0) return a.x >= 0;
  if (a.x < 0) return false;
  const double scale = kDensityTolerance * std::max(1.0, std::abs(b.density));
  if (a.density > b.density + scale) return true;
  if (a.density < b.density - scale) return false;
  if (a.cost != b.cost) return a.cost < b.cost;
  if (a.x != b.x) return a.x < b.x;
  return a.block < b.block;
}

EnumerationBlockFinder::EnumerationBlockFinder(double epsilon, EnumerationFinderOptions options)
    : epsilon_(epsilon), options_(options) {
  if (!(epsilon > 0)) throw InputError("epsilon must be positive");
}

BlockCandidate EnumerationBlockFinder::Find(const Instance& instance,
                                            const SubmodularFunction& f,
                                            const NonAdaptivePolicy& state,
                                            double max_cost) const {
  const double limit = std::min(1.0 / epsilon_, max_cost - 1.0);
  if (limit < -kBudgetTolerance) return {};
  struct Pending {
    int x;
    NeighborSet block;
    double cost;
  };
  std::vector<Pending> pending;
  for (int x = 0; x < instance.num_first_stage(); ++x) {
    const NeighborSet kids = MakeSet({instance.children(x).begin(), instance.children(x).end()});
    const NeighborSet avail = SetDifference(kids, state.second);
    ForEachAffordableSubset(instance, avail, limit, [&](const NeighborSet& b, double c) {
      if (static_cast<std::int64_t>(pending.size()) >= options_.cap) {
        throw CapExceededError("block enumeration exceeds the cap of " +
                               std::to_string(options_.cap) + " candidates");
      }
      pending.push_back({x, b, 1.0 + c});
    });
  }
  if (pending.empty()) return {};

  const std::uint64_t seed =
      SplitMix64(options_.seed ^ SplitMix64(state.first.size() * 1000003u + state.second.size()));
  const NonAdaptiveEvaluator evaluator(instance, f, options_.samples, seed,
                                       options_.enumeration_limit);
  const double base = evaluator.Value(state.second);
  std::vector<BlockCandidate> scored(pending.size());
  ParallelFor(pending.size(), [&](std::size_t i) {
    const Pending& p = pending[i];
    BlockCandidate c;
    c.x = p.x;
    c.block = p.block;
    c.cost = p.cost;
    c.marginal = evaluator.Value(SetUnion(state.second, p.block)) - base;
    c.density = c.marginal / c.cost;
    scored[i] = std::move(c);
  });
  BlockCandidate best;
  for (BlockCandidate& c : scored) {
    if (BetterBlock(c, best)) best = std::move(c);
  }

  const NeighborSet grown = SetUnion(state.second, best.block);
  if (!evaluator.IsExact(grown)) {
    // Common random numbers for the two terms of the marginal.
    const RealizationBank refine(instance, options_.refine_samples, SplitMix64(seed + 1));
    best.marginal = refine.ValueNonAdaptive(f, grown).mean -
                    refine.ValueNonAdaptive(f, state.second).mean;
    best.density = best.marginal / best.cost;
  }
  return best;
}

std::string GreedyTrace::ToCsv() const {
  std::ostringstream out;
  out.precision(12);
  out << "iteration,block,density,cost,value\n";
  for (const GreedyStep& s : steps) {
    out << s.iteration << "," << s.block << "," << s.density << "," << s.cost << "," << s.value
        << "\n";
  }
  return out.str();
}

NonAdaptiveGreedyResult NonAdaptiveGreedy(const Instance& instance, const SubmodularFunction& f,
                                          double budget, const BlockFinder& finder,
                                          const EvalOptions& value_options) {
  const double reserve = finder.Reserve();
  if (budget <= reserve + kBudgetTolerance) {
    std::ostringstream msg;
    msg << "greedy needs a budget above " << reserve << ", got " << budget
        << "; use the small-budget fallback";
    throw InputError(msg.str());
  }
  NonAdaptiveGreedyResult result;
  NonAdaptivePolicy& policy = result.policy;
  while (Cost(instance, policy) <= budget - reserve + kBudgetTolerance) {
    const BlockCandidate c = finder.Find(instance, f, policy, budget - Cost(instance, policy));
    if (c.x < 0 || c.density <= kDensityTolerance) break;
    NonAdaptivePolicy next;
    next.first = SetUnion(policy.first, std::vector<int>{c.x});
    next.second = SetUnion(policy.second, c.block);
    if (Cost(instance, next) > budget + kBudgetTolerance) break;
    policy = std::move(next);
    GreedyStep step;
    step.iteration = static_cast<int>(result.trace.steps.size()) + 1;
    step.block = BlockLabel(instance, c.x, c.block);
    step.marginal = c.marginal;
    step.density = c.density;
    step.cost = Cost(instance, policy);
    step.value = ValueNonAdaptive(instance, f, policy.second, value_options).mean;
    result.trace.steps.push_back(std::move(step));
  }
  return result;
}

AdaptiveOptimum SmallKFallback(const Instance& instance, const SubmodularFunction& f,
                               double budget, const OracleLimits& limits) {
  if (budget > kSmallBudgetLimit + kBudgetTolerance) {
    std::ostringstream msg;
    msg << "the brute-force fallback handles budgets up to " << kSmallBudgetLimit << ", got "
        << budget;
    throw InputError(msg.str());
  }
  return OptAdaptiveBruteforce(instance, f, budget, limits);
}

NonAdaptivePolicy TrimFirstStage(const Instance& instance, const SubmodularFunction&,
                                 const NonAdaptivePolicy& policy, double c,
                                 const NonAdaptiveEvaluator& evaluator) {
  const int remove = static_cast<int>(std::ceil(c - kBudgetTolerance));
  if (remove >= static_cast<int>(policy.first.size())) {
    throw InputError("cannot remove " + std::to_string(remove) + " of " +
                     std::to_string(policy.first.size()) + " first-stage nodes");
  }
  NonAdaptivePolicy current = policy;
  for (int step = 0; step < remove; ++step) {
    const double value = evaluator.Value(current.second);
    double best_loss = 0;
    NonAdaptivePolicy best;
    for (std::size_t i = 0; i < current.first.size(); ++i) {
      NonAdaptivePolicy cand;
      cand.first = current.first;
      cand.first.erase(cand.first.begin() + i);
      const NeighborSet reach = instance.NeighborsOf(cand.first);
      for (int j : current.second) {
        if (SetContains(reach, j)) cand.second.push_back(j);
      }
      const double loss = value - evaluator.Value(cand.second);
      if (i == 0 || loss < best_loss - kDensityTolerance) {
        best_loss = loss;
        best = std::move(cand);
      }
    }
    current = std::move(best);
  }
  return current;
}

CrsSpec CrsSpecFor(const NonAdaptivePolicy& policy, double epsilon, double budget) {
  return CrsSpec{1.0 - epsilon, budget - static_cast<double>(policy.first.size())};
}

bool CrsGuaranteeApplies(const NonAdaptivePolicy& policy, double epsilon, double budget) {
  return epsilon > 0 && epsilon < 0.2 &&
         budget - static_cast<double>(policy.first.size()) > std::pow(epsilon, -4.0);
}

CrsExecutor::CrsExecutor(NonAdaptivePolicy policy, CrsSpec spec)
    : policy_(std::move(policy)), spec_(spec) {
  if (spec_.keep_prob < 0 || spec_.keep_prob > 1) {
    throw InputError("keep probability must lie in [0, 1]");
  }
}

NeighborSet CrsExecutor::SecondStage(const Realization& r, RandomStream& coins) const {
  NeighborSet kept;
  for (int j : policy_.second) {
    if (r.Contains(j) && coins.Bernoulli(spec_.keep_prob)) kept.push_back(j);
  }
  if (static_cast<double>(kept.size()) > spec_.cap + kBudgetTolerance) return {};
  return kept;
}

AdaptiveConversion NonAdaptiveToAdaptive(const Instance& instance, const SubmodularFunction& f,
                                         double budget, double epsilon,
                                         const BlockFinder& finder,
                                         const NonAdaptiveEvaluator& evaluator,
                                         const OracleLimits& limits) {
  AdaptiveConversion out;
  if (budget <= finder.Reserve() + kBudgetTolerance) {
    out.fallback = true;
    out.optimum = SmallKFallback(instance, f, budget, limits);
    out.guarantee_applies = true;
    return out;
  }
  NonAdaptiveGreedyResult greedy = NonAdaptiveGreedy(instance, f, budget, finder);
  out.policy = std::move(greedy.policy);
  out.trace = std::move(greedy.trace);

  const double crs_epsilon = epsilon / 4;
  const double needed = std::pow(crs_epsilon, -4.0);
  const double slack = budget - static_cast<double>(out.policy.first.size());
  if (slack <= needed) {
    // Each removed first-stage node frees one unit for the second stage.
    const double c = std::floor(needed - slack) + 1;
    if (c < static_cast<double>(out.policy.first.size())) {
      out.policy = TrimFirstStage(instance, f, out.policy, c, evaluator);
      out.trimmed = true;
    }
  }
  out.crs = CrsSpecFor(out.policy, crs_epsilon, budget);
  out.guarantee_applies = CrsGuaranteeApplies(out.policy, crs_epsilon, budget);
  return out;
}

}  // namespace adseed
