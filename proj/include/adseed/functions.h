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

// Value oracles for normalized monotone submodular functions over the
// neighbor ground set N(X). Sets are spans of neighbor indices.

#ifndef ADSEED_FUNCTIONS_H_
#define ADSEED_FUNCTIONS_H_

#include <atomic>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "adseed/core.h"
#include "adseed/random.h"
#include "json.hpp"

namespace adseed {

// One term w * min(capacity, |T & elements|) of a matroid rank sum.
struct WeightedPart {
  double weight = 0;
  int capacity = 1;
  std::vector<int> elements;
};

class SubmodularFunction {
 public:
  explicit SubmodularFunction(int ground_size) : ground_size_(ground_size) {}
  virtual ~SubmodularFunction() = default;
  SubmodularFunction(const SubmodularFunction&) = delete;
  SubmodularFunction& operator=(const SubmodularFunction&) = delete;

  int ground_size() const { return ground_size_; }

  // f(set). Elements may come in any order; duplicates are ignored. Throws
  // InputError on an index outside the ground set.
  double Value(std::span<const int> set) const;
  // f(base + e) - f(base); zero when e is already in base.
  double Marginal(std::span<const int> base, int e) const;

  std::uint64_t queries() const { return queries_.load(std::memory_order_relaxed); }
  void ResetQueries() const { queries_.store(0, std::memory_order_relaxed); }

  virtual std::string family() const = 0;
  // The `function` object of the instance file.
  virtual nlohmann::json Descriptor(const Instance& instance) const = 0;
  // Flattened parts when the function is a matroid rank sum of partition
  // matroids; nullopt otherwise.
  virtual std::optional<std::vector<WeightedPart>> AsMatroidRankSum() const {
    return std::nullopt;
  }

 protected:
  // `set` is sorted, duplicate-free and in range.
  virtual double Evaluate(std::span<const int> set) const = 0;

 private:
  int ground_size_;
  mutable std::atomic<std::uint64_t> queries_{0};
};

// Weighted coverage: f(T) = total weight of universe elements covered by T.
class CoverageFunction : public SubmodularFunction {
 public:
  // covers[j] lists universe indices covered by neighbor j.
  CoverageFunction(std::vector<std::string> element_ids, std::vector<double> weights,
                   std::vector<std::vector<int>> covers);

  int universe_size() const { return static_cast<int>(weights_.size()); }
  double weight(int u) const { return weights_[u]; }
  std::span<const int> covers(int j) const { return covers_[j]; }

  std::string family() const override { return "coverage"; }
  nlohmann::json Descriptor(const Instance& instance) const override;
  std::optional<std::vector<WeightedPart>> AsMatroidRankSum() const override;

 protected:
  double Evaluate(std::span<const int> set) const override;

 private:
  std::vector<std::string> element_ids_;
  std::vector<double> weights_;
  std::vector<std::vector<int>> covers_;
};

// Weighted sum of partition-matroid ranks.
class MatroidRankSumFunction : public SubmodularFunction {
 public:
  struct Part {
    int capacity = 1;
    std::vector<int> elements;
  };
  struct Term {
    double weight = 0;
    std::vector<Part> parts;
  };

  // Throws InputError when parts of one term overlap, a capacity is below 1,
  // or a weight is negative.
  MatroidRankSumFunction(int ground_size, std::vector<Term> terms);

  const std::vector<Term>& terms() const { return terms_; }

  std::string family() const override { return "mrs"; }
  nlohmann::json Descriptor(const Instance& instance) const override;
  std::optional<std::vector<WeightedPart>> AsMatroidRankSum() const override;

 protected:
  double Evaluate(std::span<const int> set) const override;

 private:
  std::vector<Term> terms_;
  std::vector<WeightedPart> flat_;
  // element -> indices into flat_
  std::vector<std::vector<int>> membership_;
};

// f(T) = 1 if T is non-empty.
class AnyNonEmptyFunction : public SubmodularFunction {
 public:
  explicit AnyNonEmptyFunction(int ground_size) : SubmodularFunction(ground_size) {}

  std::string family() const override { return "any_nonempty"; }
  nlohmann::json Descriptor(const Instance& instance) const override;

 protected:
  double Evaluate(std::span<const int> set) const override { return set.empty() ? 0.0 : 1.0; }
};

// f(T) = 1 if T spans an edge of the graph, else 1 - 2^-|T|.
class EdgeWitnessFunction : public SubmodularFunction {
 public:
  EdgeWitnessFunction(int ground_size, const std::vector<std::pair<int, int>>& edges);

  std::span<const int> adjacent(int v) const { return adjacency_[v]; }
  std::int64_t num_edges() const { return num_edges_; }
  // Whether `set` (any order) contains both ends of some edge.
  bool ContainsEdge(std::span<const int> set) const;

  std::string family() const override { return "edge_witness"; }
  nlohmann::json Descriptor(const Instance& instance) const override;

 protected:
  double Evaluate(std::span<const int> set) const override;

 private:
  std::vector<std::vector<int>> adjacency_;
  std::int64_t num_edges_ = 0;
};

// f(T) = 1 - prod_x (1 - |T & {y_x}|/2 - |T & Z_x|/(2 m^2)).
//
// The structure comes from the instance: the first neighbor listed for x is
// its special node y_x and the remaining m^2 are Z_x. Groups must not share
// neighbors.
class ProductGapFunction : public SubmodularFunction {
 public:
  ProductGapFunction(const Instance& instance, int m);

  int m() const { return m_; }
  int special(int x) const { return special_[x]; }

  std::string family() const override { return "product_gap"; }
  nlohmann::json Descriptor(const Instance& instance) const override;

 protected:
  double Evaluate(std::span<const int> set) const override;

 private:
  int m_;
  std::vector<int> special_;
  std::vector<int> group_;  // neighbor -> x, or -1
  std::vector<std::uint8_t> is_special_;
};

// An instance together with its objective.
struct Problem {
  Instance instance;
  std::shared_ptr<const SubmodularFunction> function;
};

struct OracleCheckReport {
  int trials = 0;
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
};

// Spot-checks normalization once, then per trial draws a random chain
// S within T and an element a outside T and checks f(S) <= f(T) and
// f_S(a) >= f_T(a).
OracleCheckReport CheckOracle(const SubmodularFunction& f, int trials, RandomStream& stream);

}  // namespace adseed

#endif  // ADSEED_FUNCTIONS_H_
