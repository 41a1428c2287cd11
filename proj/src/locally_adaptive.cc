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

#include "adseed/locally_adaptive.h"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "adseed/errors.h"
#include "adseed/parallel.h"

namespace adseed {
namespace {

constexpr double kDensityTolerance = 1e-12;

// Realizations that block candidates are scored on, with the seeds the
// current policy already placed in each.
struct Scenario {
  Realization realization;
  double weight = 0;
  NeighborSet seeded;
  double seeded_value = 0;
};

struct Scenarios {
  std::vector<Scenario> items;
  bool exact = false;  // weights are exact probabilities
};

Scenarios BuildScenarios(const Instance& instance, const SubmodularFunction& f,
                         const LocallyAdaptivePolicy& current, std::int64_t samples,
                         std::uint64_t seed, const BlockSearchOptions& options) {
  const bool has_crs = std::any_of(current.blocks.begin(), current.blocks.end(),
                                   [](const AdaptiveBlockSpec& b) {
                                     return b.mode == BlockMode::kCrs;
                                   });
  Scenarios out;
  std::vector<Scenario>& scenarios = out.items;
  const ExecutionOptions execution{options.exact_cap};
  if (!has_crs && instance.num_neighbors() <= options.enumeration_limit) {
    std::vector<int> all(instance.num_neighbors());
    for (int j = 0; j < instance.num_neighbors(); ++j) all[j] = j;
    ForEachRealization(
        instance, all,
        [&](const Realization& r, double p) {
          if (p > 0) scenarios.push_back({r, p, {}, 0});
        },
        options.enumeration_limit);
    out.exact = true;
  } else {
    scenarios.resize(samples);
    const RandomStream root(seed);
    for (std::int64_t i = 0; i < samples; ++i) {
      RandomStream stream = root.Substream(i);
      scenarios[i].realization = SampleRealization(instance, stream);
      scenarios[i].weight = 1.0 / static_cast<double>(samples);
    }
  }
  const RandomStream coins_root(SplitMix64(seed ^ 0x5eedc011u));
  ParallelFor(scenarios.size(), [&](std::size_t i) {
    Scenario& s = scenarios[i];
    RandomStream coins = coins_root.Substream(i);
    s.seeded = ExecutePolicy(instance, f, current, s.realization, coins, execution);
    s.seeded_value = f.Value(s.seeded);
  });
  return out;
}

// Marginal value of (S, t) in every scenario.
Estimate ScoreBlock(const Instance& instance, const SubmodularFunction& f,
                    const Scenarios& set, const NodeSet& first, int t,
                    const BlockSearchOptions& options) {
  const std::vector<Scenario>& scenarios = set.items;
  const NeighborSet reach = instance.NeighborsOf(first);
  std::vector<double> gains(scenarios.size());
  for (std::size_t i = 0; i < scenarios.size(); ++i) {
    const Scenario& s = scenarios[i];
    const NeighborSet pool = SetDifference(s.realization.Filter(reach), s.seeded);
    if (pool.empty()) continue;
    SecondStageMode mode = SecondStageMode::kGreedy;
    if (options.force_mode) {
      mode = *options.force_mode;
    } else {
      const int size = std::min<int>(t, static_cast<int>(pool.size()));
      if (BinomialCount(static_cast<int>(pool.size()), size) <= options.exact_cap) {
        mode = SecondStageMode::kExact;
      }
    }
    const NeighborSet picks = SecondStageOpt(f, s.seeded, pool, t, mode, options.cap);
    gains[i] = f.Value(SetUnion(s.seeded, picks)) - s.seeded_value;
  }
  if (set.exact) {
    double total = 0;
    for (std::size_t i = 0; i < scenarios.size(); ++i) total += scenarios[i].weight * gains[i];
    return ExactEstimate(total);
  }
  return SampleEstimate(gains);
}

std::string BlockLabel(const Instance& instance, const AdaptiveBlockSpec& block) {
  std::string out;
  for (std::size_t i = 0; i < block.first.size(); ++i) {
    if (i) out += "+";
    out += instance.first_stage_id(block.first[i]);
  }
  return out + ":t=" + std::to_string(block.second_budget);
}

}  // namespace

BlockSearchResult FindOptimalAdaptiveBlock(const Instance& instance, const SubmodularFunction& f,
                                           const LocallyAdaptivePolicy& current, double epsilon,
                                           double max_cost,
                                           const BlockSearchOptions& options) {
  if (!(epsilon > 0)) throw InputError("epsilon must be positive");
  const int nx = instance.num_first_stage();
  const int max_first = std::min(MaxBlockFirstStage(epsilon), nx);
  const int max_second = MaxBlockSecondStage(epsilon);

  std::int64_t count = 0;
  for (int s = 1; s <= max_first; ++s) {
    const std::int64_t sets = BinomialCount(nx, s);
    if (sets > options.cap || sets * max_second > options.cap - count) {
      throw CapExceededError("adaptive block search exceeds the cap of " +
                             std::to_string(options.cap) + " candidates");
    }
    count += sets * max_second;
  }

  struct Candidate {
    NodeSet first;
    int t;
  };
  std::vector<Candidate> candidates;
  std::vector<int> xs(nx);
  for (int x = 0; x < nx; ++x) xs[x] = x;
  for (int s = 1; s <= max_first; ++s) {
    ForEachCombination(xs, s, [&](std::span<const int> combo) {
      for (int t = 1; t <= max_second; ++t) {
        if (s + t > max_cost + kBudgetTolerance) break;
        candidates.push_back({NodeSet(combo.begin(), combo.end()), t});
      }
      return true;
    });
  }
  BlockSearchResult best;
  if (candidates.empty()) return best;

  const Scenarios scenarios =
      BuildScenarios(instance, f, current, options.samples, options.seed, options);
  std::vector<Estimate> scores(candidates.size());
  ParallelFor(candidates.size(), [&](std::size_t i) {
    scores[i] = ScoreBlock(instance, f, scenarios, candidates[i].first, candidates[i].t, options);
  });

  std::size_t winner = candidates.size();
  double best_density = 0, best_cost = 0;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const double cost = static_cast<double>(candidates[i].first.size() + candidates[i].t);
    const double density = scores[i].mean / cost;
    const double slack = kDensityTolerance * std::max(1.0, std::abs(best_density));
    if (winner == candidates.size() || density > best_density + slack ||
        (density >= best_density - slack && cost < best_cost)) {
      winner = i;
      best_density = density;
      best_cost = cost;
    }
  }
  best.block.first = candidates[winner].first;
  best.block.second_budget = candidates[winner].t;
  best.block.mode = BlockMode::kExact;
  best.marginal_value = scores[winner];
  if (!scenarios.exact) {
    const Scenarios fresh = BuildScenarios(instance, f, current, 4 * options.samples,
                                           SplitMix64(options.seed + 1), options);
    best.marginal_value =
        ScoreBlock(instance, f, fresh, best.block.first, best.block.second_budget, options);
  }
  best.density = best.marginal_value.mean / best_cost;
  return best;
}

LocallyAdaptiveGreedyResult LocallyAdaptiveGreedy(const Instance& instance,
                                                  const SubmodularFunction& f, double budget,
                                                  double epsilon,
                                                  const BlockSearchOptions& options) {
  const double reserve = 3.0 / (epsilon * epsilon);
  if (budget <= reserve + kBudgetTolerance) {
    std::ostringstream msg;
    msg << "locally-adaptive greedy needs a budget above " << reserve << ", got " << budget
        << "; use the small-budget fallback";
    throw InputError(msg.str());
  }
  LocallyAdaptiveGreedyResult result;
  result.policy.epsilon = epsilon;
  double value = 0;
  while (Cost(result.policy) < budget - reserve - kBudgetTolerance) {
    BlockSearchOptions round = options;
    round.seed = SplitMix64(options.seed + result.policy.blocks.size());
    const BlockSearchResult found = FindOptimalAdaptiveBlock(
        instance, f, result.policy, epsilon, budget - Cost(result.policy), round);
    if (found.block.first.empty() || found.density <= kDensityTolerance) break;
    result.policy.blocks.push_back(found.block);
    value += found.marginal_value.mean;
    GreedyStep step;
    step.iteration = static_cast<int>(result.policy.blocks.size());
    step.block = BlockLabel(instance, found.block);
    step.marginal = found.marginal_value.mean;
    step.density = found.density;
    step.cost = Cost(result.policy);
    step.value = value;
    result.trace.steps.push_back(std::move(step));
  }
  return result;
}

LocallyAdaptivePolicy AsLocallyAdaptive(const AdaptiveOptimum& optimum, double epsilon) {
  LocallyAdaptivePolicy policy;
  policy.epsilon = epsilon;
  if (!optimum.first.empty()) {
    AdaptiveBlockSpec block;
    block.first = optimum.first;
    block.second_budget = optimum.second_budget;
    block.mode = BlockMode::kExact;
    policy.blocks.push_back(std::move(block));
  }
  return policy;
}

LocallyAdaptiveSolution SolveLocallyAdaptive(const Instance& instance,
                                             const SubmodularFunction& f, double budget,
                                             double epsilon, const BlockSearchOptions& options,
                                             const OracleLimits& limits) {
  LocallyAdaptiveSolution out;
  if (budget <= 3.0 / (epsilon * epsilon) + kBudgetTolerance) {
    out.fallback = true;
    out.optimum = SmallKFallback(instance, f, budget, limits);
    out.policy = AsLocallyAdaptive(out.optimum, epsilon);
    return out;
  }
  LocallyAdaptiveGreedyResult greedy = LocallyAdaptiveGreedy(instance, f, budget, epsilon, options);
  out.policy = std::move(greedy.policy);
  out.trace = std::move(greedy.trace);
  return out;
}

EpsilonLocalPolicy NonAdaptiveToLocal(const Instance& instance, const NonAdaptivePolicy& policy,
                                      double epsilon, double budget,
                                      const NonAdaptiveEvaluator& evaluator) {
  if (!(epsilon > 0)) throw InputError("epsilon must be positive");
  const double low = 1.0 / epsilon;
  const double high = 2.0 / epsilon;
  const int max_first = MaxBlockFirstStage(epsilon);

  // First-stage nodes in id order; each neighbor belongs to its first parent.
  const std::vector<int> rank = instance.FirstStageRanks();
  NodeSet order = policy.first;
  std::sort(order.begin(), order.end(), [&](int a, int b) { return rank[a] < rank[b]; });
  std::vector<NeighborSet> owned(order.size());
  for (int j : policy.second) {
    for (std::size_t i = 0; i < order.size(); ++i) {
      const auto kids = instance.children(order[i]);
      if (std::find(kids.begin(), kids.end(), j) != kids.end()) {
        owned[i].push_back(j);
        break;
      }
    }
  }

  EpsilonLocalPolicy local;
  local.epsilon = epsilon;
  NodeSet first;
  NeighborSet second;
  auto close = [&](NeighborSet t, double k) {
    local.blocks.push_back({MakeSet(first), k, std::move(t)});
    first.clear();
    second.clear();
  };
  for (std::size_t i = 0; i < order.size(); ++i) {
    const int x = order[i];
    NeighborSet rest = MakeSet(owned[i]);
    first.push_back(x);
    while (true) {
      const double cost = ExpectedSize(instance, second) + ExpectedSize(instance, rest);
      if (cost > high + kBudgetTolerance) {
        // Fill the block up to 2/eps with part of x's neighbors, then start a
        // new block at x with the remainder.
        double used = ExpectedSize(instance, second);
        NeighborSet phi;
        for (int j : rest) {
          if (used + instance.probability(j) <= high + kBudgetTolerance) {
            phi.push_back(j);
            used += instance.probability(j);
          }
        }
        if (phi.empty() && second.empty()) phi.push_back(rest.front());
        NeighborSet t = SetUnion(second, phi);
        const double k = std::max(ExpectedSize(instance, t), low);
        close(std::move(t), k);
        first.push_back(x);
        rest = SetDifference(rest, phi);
        continue;
      }
      second = SetUnion(second, rest);
      if (cost > low + kBudgetTolerance) {
        close(second, cost);
      } else if (static_cast<int>(first.size()) >= max_first) {
        close(second, low);
      }
      break;
    }
  }
  if (!first.empty()) close(second, low);

  // Drop the block of least marginal density until the budget is met.
  while (!local.blocks.empty() && Cost(local) > budget + kBudgetTolerance) {
    auto all_second = [&](std::size_t skip) {
      NeighborSet t;
      for (std::size_t b = 0; b < local.blocks.size(); ++b) {
        if (b != skip) t = SetUnion(t, local.blocks[b].second);
      }
      return t;
    };
    const double total = evaluator.Value(all_second(local.blocks.size()));
    std::size_t worst = 0;
    double worst_density = 0;
    for (std::size_t b = 0; b < local.blocks.size(); ++b) {
      const double density = (total - evaluator.Value(all_second(b))) / Cost(local.blocks[b]);
      if (b == 0 || density < worst_density) {
        worst = b;
        worst_density = density;
      }
    }
    local.blocks.erase(local.blocks.begin() + worst);
  }
  return local;
}

LocallyAdaptivePolicy LocalToLocallyAdaptive(const EpsilonLocalPolicy& local, double epsilon) {
  LocallyAdaptivePolicy out;
  out.epsilon = local.epsilon;
  for (const BudgetedBlock& b : local.blocks) {
    const int k = static_cast<int>(std::floor(b.budget + kBudgetTolerance));
    AdaptiveBlockSpec block;
    block.first = b.first;
    block.second_budget = k;
    block.mode = BlockMode::kCrs;
    block.keep_prob = 1.0 - epsilon;
    block.cap = k;
    block.targets = b.second;
    out.blocks.push_back(std::move(block));
  }
  return out;
}

}  // namespace adseed
