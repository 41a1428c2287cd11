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

#include "adseed/core.h"

#include <algorithm>
#include <climits>
#include <cmath>
#include <set>
#include <sstream>

#include "adseed/errors.h"

namespace adseed {
namespace {

std::string Quote(std::string_view s) { return "'" + std::string(s) + "'"; }

std::string JoinLines(const std::vector<std::string>& lines) {
  std::string out;
  for (const std::string& line : lines) {
    if (!out.empty()) out += "; ";
    out += line;
  }
  return out;
}

}  // namespace

std::vector<std::string> ValidateInstance(const InstanceData& data) {
  std::vector<std::string> violations;
  std::set<std::string> x_seen;
  for (const std::string& x : data.x_nodes) {
    if (!x_seen.insert(x).second) {
      violations.push_back("first-stage node " + Quote(x) + " listed twice");
    }
  }
  std::set<std::string> referenced;
  for (const auto& [x, list] : data.neighbors) {
    if (!x_seen.count(x)) {
      violations.push_back("neighbor list for unknown first-stage node " + Quote(x));
    }
    std::set<std::string> local;
    for (const std::string& y : list) {
      if (!local.insert(y).second) {
        violations.push_back("neighbor " + Quote(y) + " repeated in the list of " + Quote(x));
      }
      referenced.insert(y);
    }
  }
  for (const std::string& y : referenced) {
    auto it = data.probabilities.find(y);
    if (it == data.probabilities.end()) {
      violations.push_back("neighbor " + Quote(y) + " has no probability");
    } else if (!(it->second > 0.0 && it->second <= 1.0)) {
      std::ostringstream msg;
      msg << "neighbor " << Quote(y) << " has probability " << it->second
          << " outside (0,1]";
      violations.push_back(msg.str());
    }
  }
  for (const auto& [y, p] : data.probabilities) {
    if (!referenced.count(y)) {
      violations.push_back("probability given for " + Quote(y) +
                           ", which is not a neighbor of any first-stage node");
    }
  }
  if (!(std::isfinite(data.budget) && data.budget >= 1.0)) {
    std::ostringstream msg;
    msg << "budget " << data.budget << " must be at least 1";
    violations.push_back(msg.str());
  }
  return violations;
}

Instance Instance::Create(const InstanceData& data) {
  const std::vector<std::string> violations = ValidateInstance(data);
  if (!violations.empty()) {
    throw InputError("invalid instance: " + JoinLines(violations));
  }
  Instance inst;
  inst.x_ids_ = data.x_nodes;
  for (int x = 0; x < inst.num_first_stage(); ++x) inst.x_index_[inst.x_ids_[x]] = x;
  for (const auto& [y, p] : data.probabilities) {
    inst.neighbor_index_[y] = static_cast<int>(inst.neighbor_ids_.size());
    inst.neighbor_ids_.push_back(y);
    inst.probabilities_.push_back(p);
  }
  inst.children_.resize(inst.x_ids_.size());
  inst.parents_.resize(inst.neighbor_ids_.size());
  for (int x = 0; x < inst.num_first_stage(); ++x) {
    auto it = data.neighbors.find(inst.x_ids_[x]);
    if (it == data.neighbors.end()) continue;
    for (const std::string& y : it->second) {
      const int j = inst.neighbor_index_.at(y);
      inst.children_[x].push_back(j);
      inst.parents_[j].push_back(x);
    }
  }
  inst.budget_ = data.budget;
  return inst;
}

InstanceData Instance::ToData() const {
  InstanceData data;
  data.x_nodes = x_ids_;
  for (int x = 0; x < num_first_stage(); ++x) {
    std::vector<std::string>& list = data.neighbors[x_ids_[x]];
    for (int j : children_[x]) list.push_back(neighbor_ids_[j]);
  }
  for (int j = 0; j < num_neighbors(); ++j) {
    data.probabilities[neighbor_ids_[j]] = probabilities_[j];
  }
  data.budget = budget_;
  return data;
}

std::optional<int> Instance::FindFirstStage(std::string_view id) const {
  auto it = x_index_.find(id);
  if (it == x_index_.end()) return std::nullopt;
  return it->second;
}

std::optional<int> Instance::FindNeighbor(std::string_view id) const {
  auto it = neighbor_index_.find(id);
  if (it == neighbor_index_.end()) return std::nullopt;
  return it->second;
}

int Instance::FirstStageIndex(std::string_view id) const {
  if (auto x = FindFirstStage(id)) return *x;
  throw InputError("unknown first-stage node " + Quote(id));
}

int Instance::NeighborIndex(std::string_view id) const {
  if (auto j = FindNeighbor(id)) return *j;
  throw InputError("unknown neighbor " + Quote(id));
}

NeighborSet Instance::NeighborsOf(std::span<const int> first_stage) const {
  std::vector<int> out;
  for (int x : first_stage) {
    const auto& kids = children_.at(x);
    out.insert(out.end(), kids.begin(), kids.end());
  }
  return MakeSet(std::move(out));
}

Instance Instance::WithBudget(double budget) const {
  Instance copy = *this;
  copy.budget_ = budget;
  return copy;
}

std::vector<int> Instance::FirstStageRanks() const {
  std::vector<int> ranks(x_ids_.size());
  int rank = 0;
  for (const auto& [id, x] : x_index_) ranks[x] = rank++;
  return ranks;
}

NeighborSet Realization::Present() const {
  NeighborSet out;
  for (int j = 0; j < num_neighbors(); ++j) {
    if (present_[j]) out.push_back(j);
  }
  return out;
}

NeighborSet Realization::Filter(std::span<const int> set) const {
  NeighborSet out;
  for (int j : set) {
    if (present_[j]) out.push_back(j);
  }
  return out;
}

Realization SampleRealization(const Instance& instance, RandomStream& stream) {
  Realization r(instance.num_neighbors());
  for (int j = 0; j < instance.num_neighbors(); ++j) {
    r.Set(j, stream.Bernoulli(instance.probability(j)));
  }
  return r;
}

void ForEachOutcome(std::span<const double> probabilities,
                    const std::function<void(std::uint64_t, double)>& visit, int limit) {
  const int n = static_cast<int>(probabilities.size());
  if (n > limit || n > 62) {
    throw CapExceededError("exact enumeration over " + std::to_string(n) +
                           " elements exceeds the limit of " + std::to_string(limit));
  }
  const std::uint64_t count = std::uint64_t{1} << n;
  for (std::uint64_t mask = 0; mask < count; ++mask) {
    double prob = 1.0;
    for (int i = 0; i < n; ++i) {
      prob *= (mask >> i & 1) ? probabilities[i] : 1.0 - probabilities[i];
    }
    visit(mask, prob);
  }
}

void ForEachRealization(const Instance& instance, std::span<const int> ground,
                        const std::function<void(const Realization&, double)>& visit,
                        int limit) {
  std::vector<double> probs;
  probs.reserve(ground.size());
  for (int j : ground) probs.push_back(instance.probability(j));
  Realization r(instance.num_neighbors());
  ForEachOutcome(
      probs,
      [&](std::uint64_t mask, double prob) {
        for (std::size_t i = 0; i < ground.size(); ++i) r.Set(ground[i], mask >> i & 1);
        visit(r, prob);
      },
      limit);
}

std::vector<std::pair<Realization, double>> EnumerateRealizations(
    const Instance& instance, std::span<const int> ground, int limit) {
  std::vector<std::pair<Realization, double>> out;
  ForEachRealization(
      instance, ground, [&](const Realization& r, double p) { out.emplace_back(r, p); },
      limit);
  return out;
}

const char* BlockModeName(BlockMode mode) {
  switch (mode) {
    case BlockMode::kExact:
      return "exact";
    case BlockMode::kGreedy:
      return "greedy";
    case BlockMode::kCrs:
      return "crs";
  }
  return "exact";
}

BlockMode ParseBlockMode(std::string_view name) {
  if (name == "exact") return BlockMode::kExact;
  if (name == "greedy") return BlockMode::kGreedy;
  if (name == "crs") return BlockMode::kCrs;
  throw InputError("unknown block mode " + Quote(name));
}

double ExpectedSize(const Instance& instance, std::span<const int> set) {
  double total = 0;
  for (int j : set) total += instance.probability(j);
  return total;
}

double Cost(const Instance& instance, const NonAdaptivePolicy& policy) {
  return static_cast<double>(policy.first.size()) + ExpectedSize(instance, policy.second);
}

double Cost(const BudgetedBlock& block) {
  return static_cast<double>(block.first.size()) + block.budget;
}

double Cost(const EpsilonLocalPolicy& policy) {
  double total = 0;
  for (const BudgetedBlock& b : policy.blocks) total += Cost(b);
  return total;
}

double Cost(const AdaptiveBlockSpec& block) {
  return static_cast<double>(block.first.size()) + block.second_budget;
}

double Cost(const LocallyAdaptivePolicy& policy) {
  double total = 0;
  for (const AdaptiveBlockSpec& b : policy.blocks) total += Cost(b);
  return total;
}

namespace {

void CheckSortedIndices(std::span<const int> set, int bound, const std::string& what,
                        std::vector<std::string>& out) {
  for (std::size_t i = 0; i < set.size(); ++i) {
    if (set[i] < 0 || set[i] >= bound) {
      out.push_back(what + " contains an out-of-range index");
      return;
    }
    if (i > 0 && set[i] <= set[i - 1]) {
      out.push_back(what + " is not a sorted set");
      return;
    }
  }
}

void CheckBudget(double cost, std::optional<double> budget, std::vector<std::string>& out) {
  if (budget && cost > *budget + kBudgetTolerance) {
    std::ostringstream msg;
    msg << "cost " << cost << " exceeds budget " << *budget;
    out.push_back(msg.str());
  }
}

}  // namespace

std::vector<std::string> CheckPolicy(const Instance& instance,
                                     const NonAdaptivePolicy& policy,
                                     std::optional<double> budget) {
  std::vector<std::string> out;
  CheckSortedIndices(policy.first, instance.num_first_stage(), "first stage", out);
  CheckSortedIndices(policy.second, instance.num_neighbors(), "second stage", out);
  if (!out.empty()) return out;
  const NeighborSet reachable = instance.NeighborsOf(policy.first);
  for (int j : policy.second) {
    if (!SetContains(reachable, j)) {
      out.push_back("neighbor " + Quote(instance.neighbor_id(j)) +
                    " is not adjacent to the first stage");
    }
  }
  CheckBudget(Cost(instance, policy), budget, out);
  return out;
}

std::vector<std::string> CheckPolicy(const Instance& instance,
                                     const EpsilonLocalPolicy& policy,
                                     std::optional<double> budget) {
  std::vector<std::string> out;
  for (std::size_t b = 0; b < policy.blocks.size(); ++b) {
    const BudgetedBlock& block = policy.blocks[b];
    const std::string name = "block " + std::to_string(b);
    CheckSortedIndices(block.first, instance.num_first_stage(), name + " first stage", out);
    CheckSortedIndices(block.second, instance.num_neighbors(), name + " second stage", out);
    if (!out.empty()) return out;
    const NeighborSet reachable = instance.NeighborsOf(block.first);
    for (int j : block.second) {
      if (!SetContains(reachable, j)) {
        out.push_back(name + ": neighbor " + Quote(instance.neighbor_id(j)) +
                      " is not adjacent to its first stage");
      }
    }
    if (ExpectedSize(instance, block.second) > block.budget + kBudgetTolerance) {
      out.push_back(name + ": expected second-stage size exceeds its budget");
    }
  }
  CheckBudget(Cost(policy), budget, out);
  return out;
}

std::vector<std::string> CheckPolicy(const Instance& instance,
                                     const LocallyAdaptivePolicy& policy,
                                     std::optional<double> budget) {
  std::vector<std::string> out;
  for (std::size_t b = 0; b < policy.blocks.size(); ++b) {
    const AdaptiveBlockSpec& block = policy.blocks[b];
    const std::string name = "block " + std::to_string(b);
    CheckSortedIndices(block.first, instance.num_first_stage(), name + " first stage", out);
    if (block.second_budget < 0) out.push_back(name + ": negative second-stage budget");
    if (block.mode == BlockMode::kCrs) {
      CheckSortedIndices(block.targets, instance.num_neighbors(), name + " targets", out);
      if (!out.empty()) return out;
      const NeighborSet reachable = instance.NeighborsOf(block.first);
      for (int j : block.targets) {
        if (!SetContains(reachable, j)) {
          out.push_back(name + ": target " + Quote(instance.neighbor_id(j)) +
                        " is not adjacent to its first stage");
        }
      }
      if (!(block.keep_prob >= 0 && block.keep_prob <= 1)) {
        out.push_back(name + ": keep probability outside [0,1]");
      }
      if (std::floor(block.cap + kBudgetTolerance) > block.second_budget) {
        out.push_back(name + ": cap exceeds the block's second-stage budget");
      }
    }
  }
  CheckBudget(Cost(policy), budget, out);
  return out;
}

int MaxBlockFirstStage(double epsilon) {
  return static_cast<int>(std::ceil(1.0 / (epsilon * epsilon) - 1e-9));
}

int MaxBlockSecondStage(double epsilon) {
  return static_cast<int>(std::ceil(2.0 / epsilon - 1e-9));
}

std::vector<std::string> CheckBlockBounds(const BudgetedBlock& block, double epsilon) {
  std::vector<std::string> out;
  if (static_cast<int>(block.first.size()) > MaxBlockFirstStage(epsilon)) {
    out.push_back("first stage larger than ceil(1/eps^2)");
  }
  if (block.budget < 1.0 / epsilon - kBudgetTolerance ||
      block.budget > 2.0 / epsilon + kBudgetTolerance) {
    out.push_back("block budget outside [1/eps, 2/eps]");
  }
  return out;
}

std::vector<std::string> CheckBlockBounds(const AdaptiveBlockSpec& block, double epsilon) {
  std::vector<std::string> out;
  if (static_cast<int>(block.first.size()) > MaxBlockFirstStage(epsilon)) {
    out.push_back("first stage larger than ceil(1/eps^2)");
  }
  if (block.second_budget > MaxBlockSecondStage(epsilon)) {
    out.push_back("second-stage budget larger than ceil(2/eps)");
  }
  return out;
}

NeighborSet SetUnion(std::span<const int> a, std::span<const int> b) {
  NeighborSet out;
  out.reserve(a.size() + b.size());
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

NeighborSet SetDifference(std::span<const int> a, std::span<const int> b) {
  NeighborSet out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

bool SetContains(std::span<const int> sorted, int element) {
  return std::binary_search(sorted.begin(), sorted.end(), element);
}

NeighborSet MakeSet(std::vector<int> elements) {
  std::sort(elements.begin(), elements.end());
  elements.erase(std::unique(elements.begin(), elements.end()), elements.end());
  return elements;
}

std::int64_t BinomialCount(int n, int k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  // result * (n - i) / (i + 1) stays integral at every step.
  __int128 result = 1;
  for (int i = 0; i < k; ++i) {
    result = result * (n - i) / (i + 1);
    if (result > INT64_MAX) return INT64_MAX;
  }
  return static_cast<std::int64_t>(result);
}

void ForEachCombination(std::span<const int> items, int k,
                        const std::function<bool(std::span<const int>)>& visit) {
  const int n = static_cast<int>(items.size());
  if (k < 0 || k > n) return;
  std::vector<int> pos(k);
  for (int i = 0; i < k; ++i) pos[i] = i;
  std::vector<int> combo(k);
  for (;;) {
    for (int i = 0; i < k; ++i) combo[i] = items[pos[i]];
    if (!visit(combo)) return;
    int i = k - 1;
    while (i >= 0 && pos[i] == n - k + i) --i;
    if (i < 0) return;
    ++pos[i];
    for (int j = i + 1; j < k; ++j) pos[j] = pos[j - 1] + 1;
  }
}

}  // namespace adseed
