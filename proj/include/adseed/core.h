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

// Two-stage adaptive seeding instances, realizations of the second stage,
// and the policy types shared by every algorithm in the library.
//
// First-stage nodes (the set X) and neighbors (the set N(X)) are addressed by
// dense integer indices. Neighbor indices follow the lexicographic order of
// the neighbor ids, so "lowest neighbor id" and "lowest index" coincide.

#ifndef ADSEED_CORE_H_
#define ADSEED_CORE_H_

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "adseed/random.h"

namespace adseed {

// Sorted, duplicate-free index sets.
using NodeSet = std::vector<int>;
using NeighborSet = std::vector<int>;

// Slack used in every budget comparison, so that e.g. five items of cost 0.1
// fit a budget of 0.5 despite rounding.
inline constexpr double kBudgetTolerance = 1e-9;
inline constexpr int kDefaultEnumerationLimit = 20;
inline constexpr std::int64_t kDefaultSubsetCap = 1'000'000;

// Raw, unvalidated instance contents, as read from or written to a file.
struct InstanceData {
  std::vector<std::string> x_nodes;
  std::map<std::string, std::vector<std::string>> neighbors;
  std::map<std::string, double> probabilities;
  double budget = 0;

  bool operator==(const InstanceData&) const = default;
};

// One human-readable message per violated invariant; empty when valid.
std::vector<std::string> ValidateInstance(const InstanceData& data);

class Instance {
 public:
  // Throws InputError listing every violation.
  static Instance Create(const InstanceData& data);

  InstanceData ToData() const;

  int num_first_stage() const { return static_cast<int>(x_ids_.size()); }
  int num_neighbors() const { return static_cast<int>(neighbor_ids_.size()); }
  const std::string& first_stage_id(int x) const { return x_ids_.at(x); }
  const std::string& neighbor_id(int j) const { return neighbor_ids_.at(j); }
  double probability(int j) const { return probabilities_.at(j); }
  std::span<const double> probabilities() const { return probabilities_; }
  // Neighbors of x in file order.
  std::span<const int> children(int x) const { return children_.at(x); }
  // First-stage nodes adjacent to neighbor j, ascending.
  std::span<const int> parents(int j) const { return parents_.at(j); }
  double budget() const { return budget_; }

  std::optional<int> FindFirstStage(std::string_view id) const;
  std::optional<int> FindNeighbor(std::string_view id) const;
  int FirstStageIndex(std::string_view id) const;  // throws InputError
  int NeighborIndex(std::string_view id) const;    // throws InputError

  // N(S) as a sorted set.
  NeighborSet NeighborsOf(std::span<const int> first_stage) const;
  Instance WithBudget(double budget) const;
  // Lexicographic rank of each first-stage id (x index -> rank).
  std::vector<int> FirstStageRanks() const;

 private:
  Instance() = default;

  std::vector<std::string> x_ids_;
  std::vector<std::string> neighbor_ids_;
  std::vector<double> probabilities_;
  std::vector<std::vector<int>> children_;
  std::vector<std::vector<int>> parents_;
  std::map<std::string, int, std::less<>> x_index_;
  std::map<std::string, int, std::less<>> neighbor_index_;
  double budget_ = 0;
};

// The set of neighbors that materialized. Neighbors outside the sampled or
// enumerated ground set are absent.
class Realization {
 public:
  Realization() = default;
  explicit Realization(int num_neighbors) : present_(num_neighbors, 0) {}

  bool Contains(int j) const { return present_[j] != 0; }
  void Set(int j, bool present) { present_[j] = present ? 1 : 0; }
  int num_neighbors() const { return static_cast<int>(present_.size()); }
  NeighborSet Present() const;
  // Elements of `set` that are present, preserving order.
  NeighborSet Filter(std::span<const int> set) const;

  bool operator==(const Realization&) const = default;

 private:
  std::vector<std::uint8_t> present_;
};

// Each neighbor of N(X) present independently with its probability. Draws one
// uniform per neighbor in index order.
Realization SampleRealization(const Instance& instance, RandomStream& stream);

// Visits all 2^n outcomes of independent Bernoulli(probabilities[i]) coins.
// Bit i of the mask is coin i; masks are visited in increasing order.
void ForEachOutcome(std::span<const double> probabilities,
                    const std::function<void(std::uint64_t mask, double probability)>& visit,
                    int limit = kDefaultEnumerationLimit);

// Visits every realization of `ground` with its probability. Neighbors outside
// `ground` are absent. Throws CapExceededError when |ground| > limit.
void ForEachRealization(const Instance& instance, std::span<const int> ground,
                        const std::function<void(const Realization&, double)>& visit,
                        int limit = kDefaultEnumerationLimit);

std::vector<std::pair<Realization, double>> EnumerateRealizations(
    const Instance& instance, std::span<const int> ground,
    int limit = kDefaultEnumerationLimit);

// --- Policies --------------------------------------------------------------

// A priori selection (S, T) with T inside N(S); feasible in expectation.
struct NonAdaptivePolicy {
  NodeSet first;
  NeighborSet second;

  bool operator==(const NonAdaptivePolicy&) const = default;
};

// (S, k_b, T): |S| <= ceil(1/eps^2), 1/eps <= k_b <= 2/eps, C(T) <= k_b.
struct BudgetedBlock {
  NodeSet first;
  double budget = 0;
  NeighborSet second;

  bool operator==(const BudgetedBlock&) const = default;
};

struct EpsilonLocalPolicy {
  std::vector<BudgetedBlock> blocks;
  double epsilon = 0;

  bool operator==(const EpsilonLocalPolicy&) const = default;
};

// How a block picks its second-stage seeds in a realization.
enum class BlockMode {
  kExact,   // best subset of size <= t among its realized, unseeded neighbors
  kGreedy,  // marginal-gain greedy with budget t
  kCrs,     // keep each realized target w.p. keep_prob; seed iff count <= cap
};

const char* BlockModeName(BlockMode mode);
BlockMode ParseBlockMode(std::string_view name);  // throws InputError

struct AdaptiveBlockSpec {
  NodeSet first;
  int second_budget = 0;
  BlockMode mode = BlockMode::kExact;
  double keep_prob = 1.0;   // kCrs only
  double cap = 0;           // kCrs only
  NeighborSet targets;      // kCrs only

  bool operator==(const AdaptiveBlockSpec&) const = default;
};

// Blocks run in stored order; each optimizes given earlier blocks' seeds.
struct LocallyAdaptivePolicy {
  std::vector<AdaptiveBlockSpec> blocks;
  double epsilon = 0;

  bool operator==(const LocallyAdaptivePolicy&) const = default;
};

// |S| + sum of p over T.
double Cost(const Instance& instance, const NonAdaptivePolicy& policy);
double Cost(const BudgetedBlock& block);
double Cost(const EpsilonLocalPolicy& policy);
double Cost(const AdaptiveBlockSpec& block);
double Cost(const LocallyAdaptivePolicy& policy);
// C(T) = sum of p over T.
double ExpectedSize(const Instance& instance, std::span<const int> set);

// Structural checks. `budget` bounds the total cost; pass nullopt to waive it.
std::vector<std::string> CheckPolicy(const Instance& instance,
                                     const NonAdaptivePolicy& policy,
                                     std::optional<double> budget);
std::vector<std::string> CheckPolicy(const Instance& instance,
                                     const EpsilonLocalPolicy& policy,
                                     std::optional<double> budget);
std::vector<std::string> CheckPolicy(const Instance& instance,
                                     const LocallyAdaptivePolicy& policy,
                                     std::optional<double> budget);
// Size and budget bounds of an epsilon-block.
std::vector<std::string> CheckBlockBounds(const BudgetedBlock& block, double epsilon);
std::vector<std::string> CheckBlockBounds(const AdaptiveBlockSpec& block, double epsilon);

// ceil(1/eps^2) and ceil(2/eps), with a small tolerance so that exact
// reciprocals such as 1/0.5 do not round up.
int MaxBlockFirstStage(double epsilon);
int MaxBlockSecondStage(double epsilon);

// --- Set helpers -------------------------------------------------------------

NeighborSet SetUnion(std::span<const int> a, std::span<const int> b);
NeighborSet SetDifference(std::span<const int> a, std::span<const int> b);
bool SetContains(std::span<const int> sorted, int element);
NeighborSet MakeSet(std::vector<int> elements);  // sorts and dedups

// C(n, k), saturating at INT64_MAX.
std::int64_t BinomialCount(int n, int k);
// Calls visit(combination) for every k-subset of `items` in lexicographic
// order of positions. Returns early if visit returns false.
void ForEachCombination(std::span<const int> items, int k,
                        const std::function<bool(std::span<const int>)>& visit);

}  // namespace adseed

#endif  // ADSEED_CORE_H_
