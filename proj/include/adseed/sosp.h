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

// Submodular optimization with small probabilities: pick a set of expected
// size at most k among elements that each realize independently.
//
// For matroid rank sums the relaxation
//   G(q) = E[f(R)],  Pr[i in R] = 1 - exp(-q_i)
// is concave on the box-budget polytope {0 <= q_i <= p_i, sum q_i <= k}. It
// is maximized by Frank-Wolfe, rounded by pipage rounding on the exact
// multilinear value, and the single leftover fractional item is resolved by
// comparing values or densities.

#ifndef ADSEED_SOSP_H_
#define ADSEED_SOSP_H_

#include <cstdint>
#include <span>
#include <vector>

#include "adseed/core.h"
#include "adseed/functions.h"
#include "adseed/nonadaptive.h"

namespace adseed {

struct SospProblem {
  const SubmodularFunction* function = nullptr;
  std::vector<double> p;   // realization probability of every ground element
  NeighborSet candidates;  // elements that may be chosen
  double budget = 0;
  // Elements already chosen; they realize with probability p and cost
  // nothing here.
  NeighborSet base;
};

// Builds a problem over all neighbors of the instance with its budget.
SospProblem MakeSospProblem(const Instance& instance, const SubmodularFunction& f);

// q[i] belongs to candidates[i].
struct FractionalSecondStage {
  std::vector<double> q;
};

// E[f(base + realized part of set)]: closed form for matroid rank sums,
// exact enumeration otherwise.
double SospSetValue(const SospProblem& problem, std::span<const int> set);

class RelaxedObjective {
 public:
  // Throws InputError when the function is not a matroid rank sum.
  explicit RelaxedObjective(const SospProblem& problem);

  double Value(std::span<const double> q) const;
  double ValueAndGradient(std::span<const double> q, std::vector<double>& gradient) const;
  // Exact expected value when candidate i is present with probability q_i.
  double ExactValue(std::span<const double> q) const;

 private:
  struct Part {
    double weight = 0;
    int capacity = 1;
    std::vector<double> base_probs;
    std::vector<int> slots;  // candidate positions
  };

  double Evaluate(std::span<const double> q, bool relaxed,
                  std::vector<double>* gradient) const;

  std::vector<Part> parts_;
  std::size_t num_candidates_;
};

struct ConcaveOptions {
  int max_iterations = 10000;
  double tolerance = 1e-6;
};

struct ConcaveSolution {
  FractionalSecondStage q;
  double objective = 0;
  double gap = 0;  // linearization gap at the last iterate
  int iterations = 0;
  std::vector<double> history;  // objective before each step
};

// Frank-Wolfe with exact line search; the linear step is a fractional
// knapsack over the positive gradient coordinates.
ConcaveSolution SolveConcave(const SospProblem& problem, const ConcaveOptions& options = {});

// Moves mass between pairs of fractional coordinates, never lowering the
// exact value, until at most one coordinate is strictly inside its box.
FractionalSecondStage PipageRound(const SospProblem& problem, const FractionalSecondStage& q);

enum class ResidualRule {
  kFeasible,  // best feasible set, with or without the residual item
  kDensity,   // include the residual item iff it raises the block density
};

struct DensityContext {
  double fixed_cost = 0;  // cost of the block outside the candidates
  double baseline = 0;    // value that the block's marginal is measured from
};

struct SospResult {
  NeighborSet set;
  double value = 0;  // SospSetValue(set)
  ConcaveSolution relaxation;
};

SospResult SospSolve(const SospProblem& problem, ResidualRule rule = ResidualRule::kFeasible,
                     const DensityContext& density = {}, const ConcaveOptions& options = {});

struct SospOptimum {
  NeighborSet set;
  double value = 0;
  std::int64_t feasible_sets = 0;
};

// Exhaustive search over candidate subsets with expected size <= budget.
// Throws CapExceededError past `cap` subsets.
SospOptimum SospBruteforce(const SospProblem& problem, std::int64_t cap = kDefaultSubsetCap);

struct MrsFinderOptions {
  double block_epsilon = 0;  // eps'; blocks spend at most 1/eps'
  double grid = 0;           // eps''
  double delta = 0;          // low-probability threshold
  std::int64_t cap = kDefaultSubsetCap;
  ConcaveOptions concave{2000, 1e-7};
};

// Defaults eps' = eps'' = delta = eps/8.
MrsFinderOptions DefaultMrsFinderOptions(double epsilon);

// Block finder for matroid rank sums: enumerates the high-probability part
// H of a block and solves a small-probability problem for the rest at every
// budget on the grid.
class MrsBlockFinder : public BlockFinder {
 public:
  MrsBlockFinder(double epsilon, MrsFinderOptions options);

  BlockCandidate Find(const Instance& instance, const SubmodularFunction& f,
                      const NonAdaptivePolicy& state, double max_cost) const override;
  double Reserve() const override { return 3.0 / epsilon_; }
  const MrsFinderOptions& options() const { return options_; }

 private:
  double epsilon_;
  MrsFinderOptions options_;
};

}  // namespace adseed

#endif  // ADSEED_SOSP_H_
