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

#include "adseed/sosp.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include "adseed/errors.h"
#include "adseed/eval.h"
#include "adseed/parallel.h"

namespace adseed {
namespace {

constexpr double kBoxTolerance = 1e-12;

const SubmodularFunction& FunctionOf(const SospProblem& problem) {
  if (problem.function == nullptr) throw InputError("problem has no function");
  return *problem.function;
}

double SetCost(const SospProblem& problem, std::span<const int> set) {
  double total = 0;
  for (int i : set) total += problem.p[i];
  return total;
}

// Truncated count distribution: dist[n] = Pr[N = n] for n < cap.
void AddCoin(std::vector<double>& dist, double r) {
  for (std::size_t n = dist.size() - 1; n >= 1; --n) {
    dist[n] = dist[n] * (1.0 - r) + dist[n - 1] * r;
  }
  dist[0] *= 1.0 - r;
}

}  // namespace

SospProblem MakeSospProblem(const Instance& instance, const SubmodularFunction& f) {
  SospProblem problem;
  problem.function = &f;
  problem.p.assign(instance.probabilities().begin(), instance.probabilities().end());
  problem.candidates.resize(instance.num_neighbors());
  std::iota(problem.candidates.begin(), problem.candidates.end(), 0);
  problem.budget = instance.budget();
  return problem;
}

double SospSetValue(const SospProblem& problem, std::span<const int> set) {
  const SubmodularFunction& f = FunctionOf(problem);
  const NeighborSet chosen = SetUnion(problem.base, MakeSet({set.begin(), set.end()}));
  if (const auto parts = f.AsMatroidRankSum()) {
    double total = 0;
    std::vector<double> probs;
    for (const WeightedPart& part : *parts) {
      probs.clear();
      for (int e : part.elements) {
        if (SetContains(chosen, e)) probs.push_back(problem.p[e]);
      }
      if (!probs.empty()) total += part.weight * ExpectedTruncatedCount(probs, part.capacity);
    }
    return total;
  }
  std::vector<double> probs;
  for (int e : chosen) probs.push_back(problem.p[e]);
  double total = 0;
  NeighborSet present;
  ForEachOutcome(probs, [&](std::uint64_t mask, double probability) {
    present.clear();
    for (std::size_t i = 0; i < chosen.size(); ++i) {
      if (mask >> i & 1) present.push_back(chosen[i]);
    }
    total += probability * f.Value(present);
  });
  return total;
}

RelaxedObjective::RelaxedObjective(const SospProblem& problem)
    : num_candidates_(problem.candidates.size()) {
  const auto parts = FunctionOf(problem).AsMatroidRankSum();
  if (!parts) {
    throw InputError("the concave relaxation needs a matroid rank sum, got '" +
                     problem.function->family() + "'");
  }
  std::vector<int> slot_of(problem.p.size(), -1);
  for (std::size_t s = 0; s < problem.candidates.size(); ++s) {
    slot_of[problem.candidates[s]] = static_cast<int>(s);
  }
  for (const WeightedPart& wp : *parts) {
    Part part;
    part.weight = wp.weight;
    part.capacity = wp.capacity;
    for (int e : wp.elements) {
      if (SetContains(problem.base, e)) {
        part.base_probs.push_back(problem.p[e]);
      } else if (slot_of[e] >= 0) {
        part.slots.push_back(slot_of[e]);
      }
    }
    if (!part.slots.empty()) parts_.push_back(std::move(part));
  }
}

double RelaxedObjective::Evaluate(std::span<const double> q, bool relaxed,
                                  std::vector<double>* gradient) const {
  if (q.size() != num_candidates_) throw InputError("q has the wrong length");
  if (gradient) gradient->assign(num_candidates_, 0.0);
  double total = 0;
  std::vector<double> probs;
  for (const Part& part : parts_) {
    probs = part.base_probs;
    for (int s : part.slots) probs.push_back(relaxed ? -std::expm1(-q[s]) : q[s]);
    if (part.capacity == 1) {
      double miss = 1.0;
      for (double r : probs) miss *= 1.0 - r;
      total += part.weight * (1.0 - miss);
      // d/dq_s of 1 - prod(1 - r) is prod_{-s}(1 - r) * exp(-q_s) = miss.
      if (gradient) {
        for (int s : part.slots) (*gradient)[s] += part.weight * miss;
      }
      continue;
    }
    total += part.weight * ExpectedTruncatedCount(probs, part.capacity);
    if (!gradient) continue;
    // d/dr_t E[min(c, N)] = Pr[N without t <= c - 1], assembled from prefix
    // and suffix truncated distributions.
    const std::size_t n = probs.size();
    const std::size_t c = part.capacity;
    std::vector<std::vector<double>> prefix(n + 1, std::vector<double>(c, 0.0));
    std::vector<std::vector<double>> suffix(n + 1, std::vector<double>(c, 0.0));
    prefix[0][0] = 1.0;
    suffix[n][0] = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
      prefix[i + 1] = prefix[i];
      AddCoin(prefix[i + 1], probs[i]);
    }
    for (std::size_t i = n; i-- > 0;) {
      suffix[i] = suffix[i + 1];
      AddCoin(suffix[i], probs[i]);
    }
    const std::size_t first_slot = part.base_probs.size();
    for (std::size_t k = 0; k < part.slots.size(); ++k) {
      const std::size_t t = first_slot + k;
      std::vector<double> tail(c, 0.0);  // tail[b] = Pr[suffix count <= b]
      double run = 0;
      for (std::size_t b = 0; b < c; ++b) {
        run += suffix[t + 1][b];
        tail[b] = run;
      }
      double below = 0;
      for (std::size_t a = 0; a < c; ++a) below += prefix[t][a] * tail[c - 1 - a];
      const int s = part.slots[k];
      (*gradient)[s] += part.weight * below * std::exp(-q[s]);
    }
  }
  return total;
}

double RelaxedObjective::Value(std::span<const double> q) const {
  return Evaluate(q, true, nullptr);
}

double RelaxedObjective::ValueAndGradient(std::span<const double> q,
                                          std::vector<double>& gradient) const {
  return Evaluate(q, true, &gradient);
}

double RelaxedObjective::ExactValue(std::span<const double> q) const {
  return Evaluate(q, false, nullptr);
}

ConcaveSolution SolveConcave(const SospProblem& problem, const ConcaveOptions& options) {
  const RelaxedObjective objective(problem);
  const std::size_t n = problem.candidates.size();
  std::vector<double> cap(n);
  for (std::size_t i = 0; i < n; ++i) cap[i] = problem.p[problem.candidates[i]];

  ConcaveSolution out;
  std::vector<double> q(n, 0.0), grad, v(n), d(n), probe(n), probe_grad;
  std::vector<std::size_t> order(n);
  auto directional = [&](double gamma) {
    for (std::size_t i = 0; i < n; ++i) probe[i] = std::clamp(q[i] + gamma * d[i], 0.0, cap[i]);
    objective.ValueAndGradient(probe, probe_grad);
    double slope = 0;
    for (std::size_t i = 0; i < n; ++i) slope += probe_grad[i] * d[i];
    return slope;
  };

  for (int it = 0;; ++it) {
    const double value = objective.ValueAndGradient(q, grad);
    // Linear maximization: fill the budget by decreasing gradient.
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return grad[a] > grad[b]; });
    std::fill(v.begin(), v.end(), 0.0);
    double left = problem.budget;
    for (std::size_t i : order) {
      if (grad[i] <= 0 || left <= 0) break;
      v[i] = std::min(cap[i], left);
      left -= v[i];
    }
    double gap = 0;
    for (std::size_t i = 0; i < n; ++i) {
      d[i] = v[i] - q[i];
      gap += grad[i] * d[i];
    }
    out.objective = value;
    out.gap = std::max(0.0, gap);
    out.iterations = it;
    if (gap <= options.tolerance || it >= options.max_iterations) break;
    out.history.push_back(value);

    // The objective is concave along d, so its slope is decreasing in gamma.
    // Illinois bracketing keeps slope(lo) >= 0 > slope(hi).
    double gamma = 1.0;
    const double slope_one = directional(1.0);
    if (slope_one < 0) {
      double lo = 0, hi = 1, s_lo = gap, s_hi = slope_one;
      int side = 0;
      for (int b = 0; b < 100 && hi - lo > 1e-15; ++b) {
        double mid = (lo * s_hi - hi * s_lo) / (s_hi - s_lo);
        if (!(mid > lo && mid < hi)) mid = 0.5 * (lo + hi);
        const double s = directional(mid);
        if (s >= 0) {
          lo = mid;
          s_lo = s;
          if (side == 1) s_hi *= 0.5;
          side = 1;
          if (s <= 1e-12 * gap) break;
        } else {
          hi = mid;
          s_hi = s;
          if (side == -1) s_lo *= 0.5;
          side = -1;
        }
      }
      gamma = lo;
    }
    if (gamma <= 0) break;
    for (std::size_t i = 0; i < n; ++i) q[i] = std::clamp(q[i] + gamma * d[i], 0.0, cap[i]);
  }
  out.history.push_back(out.objective);
  out.q.q = std::move(q);
  return out;
}

FractionalSecondStage PipageRound(const SospProblem& problem, const FractionalSecondStage& q) {
  const RelaxedObjective objective(problem);
  const std::size_t n = problem.candidates.size();
  std::vector<double> cap(n);
  for (std::size_t i = 0; i < n; ++i) cap[i] = problem.p[problem.candidates[i]];
  FractionalSecondStage out = q;
  std::vector<double>& x = out.q;
  if (x.size() != n) throw InputError("q has the wrong length");
  auto snap = [&](std::size_t i) {
    if (x[i] <= kBoxTolerance) x[i] = 0;
    if (x[i] >= cap[i] - kBoxTolerance) x[i] = cap[i];
  };
  auto fractional = [&](std::size_t i) { return x[i] > 0 && x[i] < cap[i]; };
  for (std::size_t i = 0; i < n; ++i) snap(i);

  // The exact value is convex along e_i - e_j, so one endpoint is no worse.
  std::vector<double> up, down;
  while (true) {
    std::size_t i = n, j = n;
    for (std::size_t s = 0; s < n && j == n; ++s) {
      if (!fractional(s)) continue;
      (i == n ? i : j) = s;
    }
    if (j == n) break;
    up = x;
    const double t_up = std::min(cap[i] - x[i], x[j]);
    up[i] += t_up;
    up[j] -= t_up;
    if (t_up == cap[i] - x[i]) up[i] = cap[i];
    if (t_up == x[j]) up[j] = 0;
    down = x;
    const double t_down = std::min(x[i], cap[j] - x[j]);
    down[i] -= t_down;
    down[j] += t_down;
    if (t_down == x[i]) down[i] = 0;
    if (t_down == cap[j] - x[j]) down[j] = cap[j];
    x = objective.ExactValue(up) >= objective.ExactValue(down) ? up : down;
    snap(i);
    snap(j);
  }
  return out;
}

namespace {

// Adds the best feasible element by marginal gain per unit of expected size
// until nothing fits or helps.
NeighborSet GreedyFill(const SospProblem& problem, NeighborSet set) {
  while (true) {
    const double cost = SetCost(problem, set);
    const double value = SospSetValue(problem, set);
    int best = -1;
    double best_ratio = 0;
    for (int e : problem.candidates) {
      if (SetContains(set, e) || cost + problem.p[e] > problem.budget + kBudgetTolerance) {
        continue;
      }
      const double gain = SospSetValue(problem, SetUnion(set, std::vector<int>{e})) - value;
      const double ratio = gain / problem.p[e];
      if (gain > kBoxTolerance && ratio > best_ratio) {
        best_ratio = ratio;
        best = e;
      }
    }
    if (best < 0) return set;
    set = SetUnion(set, std::vector<int>{best});
  }
}

}  // namespace

SospResult SospSolve(const SospProblem& problem, ResidualRule rule,
                     const DensityContext& density, const ConcaveOptions& options) {
  SospResult result;
  result.relaxation = SolveConcave(problem, options);
  const FractionalSecondStage rounded = PipageRound(problem, result.relaxation.q);
  NeighborSet integral;
  int residual = -1;
  for (std::size_t s = 0; s < problem.candidates.size(); ++s) {
    const int e = problem.candidates[s];
    if (rounded.q[s] >= problem.p[e]) {
      integral.push_back(e);
    } else if (rounded.q[s] > 0) {
      residual = e;
    }
  }
  integral = MakeSet(std::move(integral));

  if (rule == ResidualRule::kDensity) {
    auto block_density = [&](const NeighborSet& set) {
      return (SospSetValue(problem, set) - density.baseline) /
             (density.fixed_cost + SetCost(problem, set));
    };
    result.set = integral;
    if (residual >= 0) {
      NeighborSet with = SetUnion(integral, std::vector<int>{residual});
      if (block_density(with) > block_density(integral)) result.set = std::move(with);
    }
  } else {
    NeighborSet best = GreedyFill(problem, integral);
    if (residual >= 0) {
      NeighborSet with = SetUnion(integral, std::vector<int>{residual});
      while (SetCost(problem, with) > problem.budget + kBudgetTolerance) {
        // Drop the element with the least value per unit of expected size.
        const double value = SospSetValue(problem, with);
        int worst = -1;
        double worst_ratio = 0;
        for (int e : with) {
          const double loss = value - SospSetValue(problem, SetDifference(with, std::vector<int>{e}));
          const double ratio = loss / problem.p[e];
          if (worst < 0 || ratio < worst_ratio) {
            worst = e;
            worst_ratio = ratio;
          }
        }
        with = SetDifference(with, std::vector<int>{worst});
      }
      with = GreedyFill(problem, std::move(with));
      if (SospSetValue(problem, with) > SospSetValue(problem, best)) best = std::move(with);
    }
    result.set = std::move(best);
  }
  result.value = SospSetValue(problem, result.set);
  return result;
}

SospOptimum SospBruteforce(const SospProblem& problem, std::int64_t cap) {
  std::vector<NeighborSet> feasible;
  NeighborSet chosen;
  const NeighborSet items = MakeSet(problem.candidates);
  std::function<void(std::size_t, double)> dfs = [&](std::size_t from, double cost) {
    if (static_cast<std::int64_t>(feasible.size()) >= cap) {
      throw CapExceededError("more than " + std::to_string(cap) + " feasible subsets");
    }
    feasible.push_back(chosen);
    for (std::size_t i = from; i < items.size(); ++i) {
      const double c = cost + problem.p[items[i]];
      if (c > problem.budget + kBudgetTolerance) continue;
      chosen.push_back(items[i]);
      dfs(i + 1, c);
      chosen.pop_back();
    }
  };
  dfs(0, 0.0);
  std::vector<double> values(feasible.size());
  ParallelFor(feasible.size(), [&](std::size_t i) {
    values[i] = SospSetValue(problem, feasible[i]);
  });
  SospOptimum best;
  best.feasible_sets = static_cast<std::int64_t>(feasible.size());
  best.value = values[0];
  for (std::size_t i = 1; i < feasible.size(); ++i) {
    if (values[i] > best.value + 1e-15) {
      best.value = values[i];
      best.set = feasible[i];
    }
  }
  return best;
}

MrsFinderOptions DefaultMrsFinderOptions(double epsilon) {
  MrsFinderOptions options;
  options.block_epsilon = epsilon / 8;
  options.grid = epsilon / 8;
  options.delta = epsilon / 8;
  return options;
}

MrsBlockFinder::MrsBlockFinder(double epsilon, MrsFinderOptions options)
    : epsilon_(epsilon), options_(options) {
  if (!(epsilon > 0) || !(options.block_epsilon > 0) || !(options.grid > 0) ||
      !(options.delta > 0)) {
    throw InputError("block finder parameters must be positive");
  }
}

BlockCandidate MrsBlockFinder::Find(const Instance& instance, const SubmodularFunction& f,
                                    const NonAdaptivePolicy& state, double max_cost) const {
  if (!f.AsMatroidRankSum()) {
    throw InputError("the matroid-rank-sum block finder got a '" + f.family() + "' function");
  }
  const double limit = std::min(1.0 / options_.block_epsilon, max_cost - 1.0);
  if (limit < -kBudgetTolerance) return {};
  const double base_value = *StructuredValue(instance, f, state.second);

  struct Task {
    int x;
    NeighborSet high;
    NeighborSet low;
    double budget;  // for the low-probability part; 0 means none
  };
  std::vector<Task> tasks;
  auto add_task = [&](Task task) {
    if (static_cast<std::int64_t>(tasks.size()) >= options_.cap) {
      throw CapExceededError("block search exceeds the cap of " + std::to_string(options_.cap) +
                             " candidates");
    }
    tasks.push_back(std::move(task));
  };
  for (int x = 0; x < instance.num_first_stage(); ++x) {
    const NeighborSet kids = MakeSet({instance.children(x).begin(), instance.children(x).end()});
    NeighborSet high, low;
    for (int j : SetDifference(kids, state.second)) {
      (instance.probability(j) >= options_.delta ? high : low).push_back(j);
    }
    NeighborSet chosen;
    std::function<void(std::size_t, double)> dfs = [&](std::size_t from, double cost) {
      if (!chosen.empty()) add_task({x, chosen, low, 0.0});
      const double room = limit - cost;
      if (!low.empty()) {
        for (int i = 1; i * options_.grid <= room + kBudgetTolerance; ++i) {
          add_task({x, chosen, low, i * options_.grid});
        }
        const double steps = std::floor(room / options_.grid + kBudgetTolerance);
        if (room > kBudgetTolerance && room - steps * options_.grid > kBudgetTolerance) {
          add_task({x, chosen, low, room});
        }
      }
      for (std::size_t i = from; i < high.size(); ++i) {
        const double c = cost + instance.probability(high[i]);
        if (c > limit + kBudgetTolerance) continue;
        chosen.push_back(high[i]);
        dfs(i + 1, c);
        chosen.pop_back();
      }
    };
    dfs(0, 0.0);
  }
  if (tasks.empty()) return {};

  std::vector<BlockCandidate> scored(tasks.size());
  const std::vector<double> p(instance.probabilities().begin(), instance.probabilities().end());
  ParallelFor(tasks.size(), [&](std::size_t t) {
    const Task& task = tasks[t];
    NeighborSet block = task.high;
    if (task.budget > 0) {
      SospProblem sub;
      sub.function = &f;
      sub.p = p;
      sub.candidates = task.low;
      sub.budget = task.budget;
      sub.base = SetUnion(state.second, task.high);
      DensityContext context{1.0 + ExpectedSize(instance, task.high), base_value};
      SospResult solved = SospSolve(sub, ResidualRule::kDensity, context, options_.concave);
      NeighborSet with = SetUnion(block, solved.set);
      if (1.0 + ExpectedSize(instance, with) > max_cost + kBudgetTolerance) {
        solved = SospSolve(sub, ResidualRule::kFeasible, context, options_.concave);
        with = SetUnion(block, solved.set);
      }
      block = std::move(with);
    }
    BlockCandidate c;
    c.x = task.x;
    c.cost = 1.0 + ExpectedSize(instance, block);
    c.marginal = *StructuredValue(instance, f, SetUnion(state.second, block)) - base_value;
    c.density = c.marginal / c.cost;
    c.block = std::move(block);
    scored[t] = std::move(c);
  });
  BlockCandidate best;
  for (BlockCandidate& c : scored) {
    if (!c.block.empty() && BetterBlock(c, best)) best = std::move(c);
  }
  return best;
}

}  // namespace adseed
