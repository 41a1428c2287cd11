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

#include "adseed/eval.h"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "adseed/errors.h"
#include "adseed/parallel.h"

namespace adseed {

Estimate ExactEstimate(double value) { return Estimate{value, 0.0, 0, true}; }

Estimate SampleEstimate(std::span<const double> values) {
  Estimate est;
  est.samples = static_cast<std::int64_t>(values.size());
  if (values.empty()) return est;
  double sum = 0;
  for (double v : values) sum += v;
  est.mean = sum / values.size();
  if (values.size() > 1) {
    double ss = 0;
    for (double v : values) ss += (v - est.mean) * (v - est.mean);
    est.std_error = std::sqrt(ss / (values.size() - 1) / values.size());
  }
  return est;
}

nlohmann::json EstimateToJson(const Estimate& e) {
  return {{"mean", e.mean}, {"std_error", e.std_error}, {"samples", e.samples},
          {"exact", e.exact}};
}

NeighborSet SecondStageOpt(const SubmodularFunction& f, std::span<const int> base,
                           std::span<const int> candidates, int t, SecondStageMode mode,
                           std::int64_t cap) {
  if (t <= 0) return {};
  const NeighborSet sorted_base = MakeSet({base.begin(), base.end()});
  const NeighborSet pool = SetDifference(MakeSet({candidates.begin(), candidates.end()}),
                                         sorted_base);
  if (pool.empty()) return {};
  std::vector<int> work(sorted_base);
  const std::size_t base_size = work.size();

  if (mode == SecondStageMode::kExact) {
    const int size = std::min<int>(t, static_cast<int>(pool.size()));
    const std::int64_t count = BinomialCount(static_cast<int>(pool.size()), size);
    if (count > cap) {
      throw CapExceededError("exact second stage needs " + std::to_string(count) +
                             " subsets, above the cap of " + std::to_string(cap));
    }
    NeighborSet best;
    double best_value = -1;
    ForEachCombination(pool, size, [&](std::span<const int> combo) {
      work.resize(base_size);
      work.insert(work.end(), combo.begin(), combo.end());
      const double v = f.Value(work);
      if (v > best_value) {
        best_value = v;
        best.assign(combo.begin(), combo.end());
      }
      return true;
    });
    return best;
  }

  NeighborSet picks;
  std::vector<std::uint8_t> taken(pool.size(), 0);
  double current = f.Value(work);
  for (int step = 0; step < t; ++step) {
    int best = -1;
    double best_value = current;
    for (std::size_t i = 0; i < pool.size(); ++i) {
      if (taken[i]) continue;
      work.push_back(pool[i]);
      const double v = f.Value(work);
      work.pop_back();
      if (v > best_value) {
        best_value = v;
        best = static_cast<int>(i);
      }
    }
    if (best < 0) break;
    taken[best] = 1;
    work.push_back(pool[best]);
    picks.push_back(pool[best]);
    current = best_value;
  }
  return MakeSet(std::move(picks));
}

namespace {

double ClosedFormCoverage(const Instance& instance, const CoverageFunction& f,
                          std::span<const int> second) {
  std::vector<double> miss(f.universe_size(), 1.0);
  std::vector<std::uint8_t> touched(f.universe_size(), 0);
  for (int j : second) {
    for (int u : f.covers(j)) {
      miss[u] *= 1.0 - instance.probability(j);
      touched[u] = 1;
    }
  }
  double total = 0;
  for (int u = 0; u < f.universe_size(); ++u) {
    if (touched[u]) total += f.weight(u) * (1.0 - miss[u]);
  }
  return total;
}

Estimate MonteCarlo(std::int64_t samples, std::uint64_t seed,
                    const std::function<double(RandomStream&)>& draw) {
  if (samples < 1) throw InputError("Monte Carlo needs at least one sample");
  std::vector<double> values(samples);
  const RandomStream root(seed);
  ParallelFor(values.size(), [&](std::size_t i) {
    RandomStream stream = root.Substream(i);
    values[i] = draw(stream);
  });
  return SampleEstimate(values);
}

std::string DescribeRealization(const Instance& instance, const Realization& r) {
  std::ostringstream out;
  out << "{";
  const NeighborSet present = r.Present();
  for (std::size_t i = 0; i < present.size() && i < 12; ++i) {
    out << (i ? "," : "") << instance.neighbor_id(present[i]);
  }
  if (present.size() > 12) out << ",... (" << present.size() << " present)";
  out << "}";
  return out.str();
}

}  // namespace

double ExpectedTruncatedCount(std::span<const double> probabilities, int cap) {
  if (cap <= 0) return 0.0;
  // dist[n] = Pr[N = n] for n < cap; the rest of the mass sits at >= cap.
  std::vector<double> dist(cap, 0.0);
  dist[0] = 1.0;
  for (double r : probabilities) {
    for (int n = cap - 1; n >= 1; --n) dist[n] = dist[n] * (1.0 - r) + dist[n - 1] * r;
    dist[0] *= 1.0 - r;
  }
  double below = 0, mean = 0;
  for (int n = 0; n < cap; ++n) {
    below += dist[n];
    mean += n * dist[n];
  }
  return mean + cap * std::max(0.0, 1.0 - below);
}

std::optional<double> StructuredValue(const Instance& instance, const SubmodularFunction& f,
                                      std::span<const int> second) {
  const NeighborSet t = MakeSet({second.begin(), second.end()});
  if (const auto* coverage = dynamic_cast<const CoverageFunction*>(&f)) {
    return ClosedFormCoverage(instance, *coverage, t);
  }
  const auto parts = f.AsMatroidRankSum();
  if (!parts) return std::nullopt;
  double total = 0;
  std::vector<double> probs;
  for (const WeightedPart& part : *parts) {
    probs.clear();
    for (int e : part.elements) {
      if (SetContains(t, e)) probs.push_back(instance.probability(e));
    }
    if (!probs.empty()) total += part.weight * ExpectedTruncatedCount(probs, part.capacity);
  }
  return total;
}

Estimate ValueNonAdaptive(const Instance& instance, const SubmodularFunction& f,
                          std::span<const int> second, const EvalOptions& options) {
  const NeighborSet t = MakeSet({second.begin(), second.end()});
  const auto* coverage = dynamic_cast<const CoverageFunction*>(&f);
  EvalMethod method = options.method;
  if (method == EvalMethod::kAuto) {
    if (coverage) {
      method = EvalMethod::kClosedFormCoverage;
    } else if (auto v = StructuredValue(instance, f, t)) {
      return ExactEstimate(*v);
    } else if (static_cast<int>(t.size()) <= options.enumeration_limit) {
      method = EvalMethod::kExactEnum;
    } else {
      method = EvalMethod::kMonteCarlo;
    }
  }
  switch (method) {
    case EvalMethod::kClosedFormCoverage:
      if (!coverage) throw InputError("closed-form evaluation needs a coverage function");
      return ExactEstimate(ClosedFormCoverage(instance, *coverage, t));
    case EvalMethod::kExactEnum: {
      double total = 0;
      ForEachRealization(
          instance, t,
          [&](const Realization& r, double p) { total += p * f.Value(r.Filter(t)); },
          options.enumeration_limit);
      return ExactEstimate(total);
    }
    default:
      return MonteCarlo(options.samples, options.seed, [&](RandomStream& stream) {
        NeighborSet present;
        for (int j : t) {
          if (stream.Bernoulli(instance.probability(j))) present.push_back(j);
        }
        return f.Value(present);
      });
  }
}

RealizationBank::RealizationBank(const Instance& instance, std::int64_t samples,
                                 std::uint64_t seed)
    : samples_(samples) {
  const RandomStream root(seed);
  ParallelFor(samples_.size(), [&](std::size_t i) {
    RandomStream stream = root.Substream(i);
    samples_[i] = SampleRealization(instance, stream);
  });
}

Estimate RealizationBank::ValueNonAdaptive(const SubmodularFunction& f,
                                           std::span<const int> second) const {
  std::vector<double> values(samples_.size());
  for (std::size_t i = 0; i < samples_.size(); ++i) {
    values[i] = f.Value(samples_[i].Filter(second));
  }
  return SampleEstimate(values);
}

int CoinCount(const LocallyAdaptivePolicy& policy, const Realization& r) {
  int count = 0;
  for (const AdaptiveBlockSpec& b : policy.blocks) {
    if (b.mode != BlockMode::kCrs) continue;
    for (int j : b.targets) count += r.Contains(j) ? 1 : 0;
  }
  return count;
}

NeighborSet ExecutePolicy(const Instance& instance, const SubmodularFunction& f,
                          const LocallyAdaptivePolicy& policy, const Realization& r,
                          std::span<const std::uint8_t> coins,
                          const ExecutionOptions& options) {
  NeighborSet seeded;
  std::size_t next_coin = 0;
  for (const AdaptiveBlockSpec& b : policy.blocks) {
    if (b.mode == BlockMode::kCrs) {
      NeighborSet kept;
      for (int j : b.targets) {
        if (!r.Contains(j)) continue;
        if (next_coin >= coins.size()) throw InputError("not enough thinning coins");
        if (coins[next_coin++]) kept.push_back(j);
      }
      if (static_cast<double>(kept.size()) <= b.cap + kBudgetTolerance) {
        seeded = SetUnion(seeded, kept);
      }
      continue;
    }
    const NeighborSet candidates = SetDifference(r.Filter(instance.NeighborsOf(b.first)), seeded);
    SecondStageMode mode = SecondStageMode::kGreedy;
    if (b.mode == BlockMode::kExact) {
      const int size = std::min<int>(b.second_budget, static_cast<int>(candidates.size()));
      if (BinomialCount(static_cast<int>(candidates.size()), size) <= options.exact_cap) {
        mode = SecondStageMode::kExact;
      }
    }
    const NeighborSet picks =
        SecondStageOpt(f, seeded, candidates, b.second_budget, mode, options.exact_cap);
    seeded = SetUnion(seeded, picks);
  }
  return seeded;
}

NeighborSet ExecutePolicy(const Instance& instance, const SubmodularFunction& f,
                          const LocallyAdaptivePolicy& policy, const Realization& r,
                          RandomStream& stream, const ExecutionOptions& options) {
  std::vector<std::uint8_t> coins;
  for (const AdaptiveBlockSpec& b : policy.blocks) {
    if (b.mode != BlockMode::kCrs) continue;
    for (int j : b.targets) {
      if (r.Contains(j)) coins.push_back(stream.Bernoulli(b.keep_prob) ? 1 : 0);
    }
  }
  return ExecutePolicy(instance, f, policy, r, coins, options);
}

Estimate ValueLocallyAdaptive(const Instance& instance, const SubmodularFunction& f,
                              const LocallyAdaptivePolicy& policy, const EvalOptions& options,
                              const ExecutionOptions& execution) {
  EvalMethod method = options.method;
  NeighborSet ground;
  for (const AdaptiveBlockSpec& b : policy.blocks) {
    ground = SetUnion(ground, b.mode == BlockMode::kCrs ? b.targets : instance.NeighborsOf(b.first));
  }
  if (method == EvalMethod::kAuto) {
    method = static_cast<int>(ground.size()) <= options.enumeration_limit
                 ? EvalMethod::kExactEnum
                 : EvalMethod::kMonteCarlo;
  }
  if (method == EvalMethod::kClosedFormCoverage) {
    throw InputError("closed-form evaluation applies to non-adaptive policies only");
  }
  if (method == EvalMethod::kMonteCarlo) {
    return MonteCarlo(options.samples, options.seed, [&](RandomStream& stream) {
      const Realization r = SampleRealization(instance, stream);
      return f.Value(ExecutePolicy(instance, f, policy, r, stream, execution));
    });
  }
  double total = 0;
  ForEachRealization(
      instance, ground,
      [&](const Realization& r, double p) {
        std::vector<double> keep;
        for (const AdaptiveBlockSpec& b : policy.blocks) {
          if (b.mode != BlockMode::kCrs) continue;
          for (int j : b.targets) {
            if (r.Contains(j)) keep.push_back(b.keep_prob);
          }
        }
        std::vector<std::uint8_t> coins(keep.size());
        ForEachOutcome(
            keep,
            [&](std::uint64_t mask, double q) {
              if (q == 0) return;
              for (std::size_t i = 0; i < coins.size(); ++i) coins[i] = mask >> i & 1;
              total += p * q * f.Value(ExecutePolicy(instance, f, policy, r, coins, execution));
            },
            options.enumeration_limit);
      },
      options.enumeration_limit);
  return ExactEstimate(total);
}

LocallyAdaptiveExecutor::LocallyAdaptiveExecutor(const Instance& instance,
                                                 const SubmodularFunction& f,
                                                 LocallyAdaptivePolicy policy,
                                                 ExecutionOptions options)
    : instance_(instance), f_(f), policy_(std::move(policy)), options_(options) {}

NodeSet LocallyAdaptiveExecutor::FirstStage() const {
  NodeSet first;
  for (const AdaptiveBlockSpec& b : policy_.blocks) first = SetUnion(first, b.first);
  return first;
}

NeighborSet LocallyAdaptiveExecutor::SecondStage(const Realization& r,
                                                 RandomStream& coins) const {
  return ExecutePolicy(instance_, f_, policy_, r, coins, options_);
}

Estimate ValueAdaptiveExecutor(const Instance& instance, const SubmodularFunction& f,
                               const AdaptiveExecutor& executor, double budget,
                               const EvalOptions& options) {
  const NodeSet first = executor.FirstStage();
  const NeighborSet reachable = instance.NeighborsOf(first);
  return MonteCarlo(options.samples, options.seed, [&](RandomStream& stream) {
    const Realization r = SampleRealization(instance, stream);
    const NeighborSet second = MakeSet(executor.SecondStage(r, stream));
    for (int j : second) {
      if (!r.Contains(j) || !SetContains(reachable, j)) {
        throw InfeasiblePolicyError("executor seeded '" + instance.neighbor_id(j) +
                                    "', which is not a realized neighbor of its first stage, "
                                    "in realization " + DescribeRealization(instance, r));
      }
    }
    const double seeds = static_cast<double>(first.size() + second.size());
    if (seeds > budget + kBudgetTolerance) {
      std::ostringstream msg;
      msg << "executor seeds " << seeds << " nodes, over the budget " << budget
          << ", in realization " << DescribeRealization(instance, r);
      throw InfeasiblePolicyError(msg.str());
    }
    return f.Value(second);
  });
}

}  // namespace adseed
