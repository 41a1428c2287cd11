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

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include "adseed/errors.h"
#include "adseed/harness.h"
#include "adseed/locally_adaptive.h"
#include "adseed/oracle.h"
#include "doctest.h"
#include "test_util.h"

namespace adseed {
namespace {

using testing::MakeCoverage;
using testing::MakeInstance;

EvalOptions Exact() {
  EvalOptions o;
  o.method = EvalMethod::kExactEnum;
  return o;
}

// One star with n neighbors of probability p.
Instance Star(int n, double p, double budget) {
  std::vector<std::string> kids;
  std::map<std::string, double> probs;
  for (int i = 0; i < n; ++i) {
    char id[16];
    std::snprintf(id, sizeof(id), "y%03d", i);
    kids.push_back(id);
    probs[id] = p;
  }
  return MakeInstance({{"x", kids}}, probs, budget);
}

// Stars x00.. whose neighbors carry the given probabilities; neighbor j
// covers element j.
Problem Stars(const std::vector<std::vector<double>>& probs, double budget) {
  std::vector<std::pair<std::string, std::vector<std::string>>> stars;
  std::map<std::string, double> p;
  int next = 0;
  for (std::size_t x = 0; x < probs.size(); ++x) {
    std::vector<std::string> kids;
    for (double v : probs[x]) {
      char id[16];
      std::snprintf(id, sizeof(id), "y%03d", next++);
      kids.push_back(id);
      p[id] = v;
    }
    char xid[16];
    std::snprintf(xid, sizeof(xid), "x%02zu", x);
    stars.emplace_back(xid, kids);
  }
  Problem problem{MakeInstance(stars, p, budget), nullptr};
  std::vector<std::vector<int>> covers(next);
  for (int j = 0; j < next; ++j) covers[j] = {j};
  problem.function = MakeCoverage(covers, next);
  return problem;
}

// Deterministic densest block: best f over t-subsets of N(S), per unit cost.
double DeterministicBlockDensity(const Instance& inst, const SubmodularFunction& f,
                                 double epsilon) {
  const int nx = inst.num_first_stage();
  double best = 0;
  for (int mask = 1; mask < (1 << nx); ++mask) {
    NodeSet s;
    for (int x = 0; x < nx; ++x) {
      if (mask >> x & 1) s.push_back(x);
    }
    if (static_cast<int>(s.size()) > MaxBlockFirstStage(epsilon)) continue;
    const NeighborSet reach = inst.NeighborsOf(s);
    const int n = static_cast<int>(reach.size());
    for (int t = 1; t <= MaxBlockSecondStage(epsilon); ++t) {
      double top = 0;
      for (int pick = 0; pick < (1 << n); ++pick) {
        if (__builtin_popcount(pick) > t) continue;
        NeighborSet b;
        for (int i = 0; i < n; ++i) {
          if (pick >> i & 1) b.push_back(reach[i]);
        }
        top = std::max(top, f.Value(b));
      }
      best = std::max(best, top / static_cast<double>(s.size() + t));
    }
  }
  return best;
}

TEST_CASE("block search: saturated policy leaves zero density") {
  const Instance inst = Star(3, 1.0, 10);
  const auto f = MakeCoverage({{0}, {1}, {2}}, 3);
  LocallyAdaptivePolicy current;
  current.blocks.push_back({{0}, 3, BlockMode::kExact, 1.0, 0, {}});
  const BlockSearchResult r = FindOptimalAdaptiveBlock(inst, *f, current, 0.5, 10);
  CHECK(r.density == doctest::Approx(0).epsilon(1e-12));
}

TEST_CASE("block search: single star with a yes/no objective") {
  const Instance inst = Star(5, 0.3, 10);
  AnyNonEmptyFunction f(5);
  const BlockSearchResult r = FindOptimalAdaptiveBlock(inst, f, {}, 0.5, 10);
  CHECK(r.block.first == NodeSet{0});
  CHECK(r.block.second_budget == 1);
  CHECK(r.marginal_value.exact);
  CHECK(r.density == doctest::Approx((1 - std::pow(0.7, 5)) / 2).epsilon(1e-12));
}

TEST_CASE("block search with certain neighbors is the deterministic densest block") {
  RandomStream stream(2);
  for (int trial = 0; trial < 5; ++trial) {
    RandomInstanceOptions o;
    o.nx = 4;
    o.deg = 2;
    o.p_low = 1;
    o.p_high = 1;
    o.budget = 20;
    const Problem p = GenRandom(o, stream);
    const BlockSearchResult r = FindOptimalAdaptiveBlock(p.instance, *p.function, {}, 0.5, 20);
    CHECK(r.density == doctest::Approx(DeterministicBlockDensity(p.instance, *p.function, 0.5))
                           .epsilon(1e-12));
  }
}

TEST_CASE("block search respects max_cost and its cap") {
  const Instance inst = Star(4, 0.5, 10);
  AnyNonEmptyFunction f(4);
  CHECK(FindOptimalAdaptiveBlock(inst, f, {}, 0.5, 1.5).block.first.empty());
  BlockSearchOptions o;
  o.cap = 2;
  CHECK_THROWS_AS(FindOptimalAdaptiveBlock(inst, f, {}, 0.5, 10, o), CapExceededError);
}

TEST_CASE("greedy refuses budgets inside the reserve; the solver falls back") {
  const Problem gap = GenGapNa(0.5);
  CHECK_THROWS_AS(LocallyAdaptiveGreedy(gap.instance, *gap.function, 2, 0.5), InputError);
  const LocallyAdaptiveSolution s = SolveLocallyAdaptive(gap.instance, *gap.function, 2, 0.5);
  CHECK(s.fallback);
  CHECK(s.optimum.value == doctest::Approx(0.9375));
  CHECK(ValueLocallyAdaptive(gap.instance, *gap.function, s.policy, Exact()).mean ==
        doctest::Approx(0.9375));
}

TEST_CASE("greedy on a scaled gap instance nearly matches the adaptive optimum") {
  const Instance inst = Star(400, 0.05, 50);
  AnyNonEmptyFunction f(400);
  const LocallyAdaptiveGreedyResult r = LocallyAdaptiveGreedy(inst, f, 50, 0.5);
  CHECK(Cost(r.policy) <= 50);
  EvalOptions o;
  o.samples = 20000;
  const Estimate v = ValueLocallyAdaptive(inst, f, r.policy, o);
  const double optimum = 1 - std::pow(0.95, 400);
  CHECK(v.mean >= 0.9 * optimum - 3 * v.std_error);
}

TEST_CASE("greedy policies obey the cost and block bounds") {
  RandomStream stream(6);
  for (int trial = 0; trial < 5; ++trial) {
    RandomInstanceOptions o;
    o.nx = 5;
    o.deg = 2;
    o.p_low = 0.3;
    o.budget = 8;
    const Problem p = GenRandom(o, stream);
    const double eps = 0.75;
    const LocallyAdaptiveGreedyResult r =
        LocallyAdaptiveGreedy(p.instance, *p.function, 8, eps);
    CHECK(Cost(r.policy) <= 8);
    CHECK(CheckPolicy(p.instance, r.policy, 8.0).empty());
    for (const AdaptiveBlockSpec& b : r.policy.blocks) CHECK(CheckBlockBounds(b, eps).empty());
    for (std::size_t i = 1; i < r.trace.steps.size(); ++i) {
      CHECK(r.trace.steps[i].density <= r.trace.steps[i - 1].density + 1e-9);
    }
    RandomStream coins(1);
    for (int s = 0; s < 200; ++s) {
      const Realization real = SampleRealization(p.instance, coins);
      const NeighborSet seeded = ExecutePolicy(p.instance, *p.function, r.policy, real, coins);
      double first = 0;
      for (const AdaptiveBlockSpec& b : r.policy.blocks) first += b.first.size();
      CHECK(first + seeded.size() <= 8);
    }
  }
}

TEST_CASE("greedy is within the end-to-end bound on tiny instances") {
  RandomStream stream(8);
  const double bound = std::pow(1 - std::exp(-1.0), 2) - 0.1;
  for (int trial = 0; trial < 5; ++trial) {
    RandomInstanceOptions o;
    o.nx = 4;
    o.deg = 2;
    o.p_low = 0.2;
    o.budget = 4;
    const Problem p = GenRandom(o, stream);
    const LocallyAdaptiveSolution s = SolveLocallyAdaptive(p.instance, *p.function, 4, 0.9);
    CHECK_FALSE(s.fallback);
    const double value = ValueLocallyAdaptive(p.instance, *p.function, s.policy, Exact()).mean;
    const double opt = OptAdaptiveBruteforce(p.instance, *p.function, 4).value;
    CHECK(value >= bound * opt - 1e-9);
    CHECK(value <= opt + 1e-9);
  }
}

TEST_CASE("local blocks: one block per parent when each costs just over 1/eps") {
  const Problem p = Stars({{0.7, 0.7, 0.7}, {0.7, 0.7, 0.7}, {0.7, 0.7, 0.7}}, 20);
  NonAdaptivePolicy policy{{0, 1, 2}, {0, 1, 2, 3, 4, 5, 6, 7, 8}};
  const NonAdaptiveEvaluator evaluator(p.instance, *p.function, 1000, 1);
  const EpsilonLocalPolicy local = NonAdaptiveToLocal(p.instance, policy, 0.5, 20, evaluator);
  REQUIRE(local.blocks.size() == 3);
  for (std::size_t b = 0; b < 3; ++b) {
    CHECK(local.blocks[b].first == NodeSet{static_cast<int>(b)});
    CHECK(local.blocks[b].budget == doctest::Approx(2.1));
    CHECK(local.blocks[b].second.size() == 3);
    CHECK(CheckBlockBounds(local.blocks[b], 0.5).empty());
  }
  CHECK(evaluator.Value(policy.second) ==
        doctest::Approx(evaluator.Value(SetUnion(
            SetUnion(local.blocks[0].second, local.blocks[1].second), local.blocks[2].second))));
}

TEST_CASE("local blocks: an oversized parent is split and repeated") {
  const Problem p = Stars({std::vector<double>(10, 1.0)}, 20);
  NonAdaptivePolicy policy{{0}, {0, 1, 2, 3, 4, 5, 6, 7, 8, 9}};
  const NonAdaptiveEvaluator evaluator(p.instance, *p.function, 1000, 1);
  const EpsilonLocalPolicy local = NonAdaptiveToLocal(p.instance, policy, 0.5, 20, evaluator);
  REQUIRE(local.blocks.size() == 3);
  for (const BudgetedBlock& b : local.blocks) CHECK(b.first == NodeSet{0});
  CHECK(local.blocks[0].second.size() == 4);
  CHECK(local.blocks[1].second.size() == 4);
  CHECK(local.blocks[2].second.size() == 2);
  // Two splits, each repeating the parent once.
  CHECK(Cost(local) == doctest::Approx(Cost(p.instance, policy) + 2));
}

TEST_CASE("local blocks close at the first-stage size limit") {
  std::vector<std::vector<double>> probs(6, {0.1});
  const Problem p = Stars(probs, 20);
  NonAdaptivePolicy policy{{0, 1, 2, 3, 4, 5}, {0, 1, 2, 3, 4, 5}};
  const NonAdaptiveEvaluator evaluator(p.instance, *p.function, 1000, 1);
  const EpsilonLocalPolicy local = NonAdaptiveToLocal(p.instance, policy, 0.5, 20, evaluator);
  REQUIRE(local.blocks.size() == 2);
  CHECK(local.blocks[0].first.size() == 4);
  CHECK(local.blocks[0].budget == doctest::Approx(2));
  CHECK(local.blocks[1].first.size() == 2);
}

TEST_CASE("local blocks: pruning meets the budget and drops the weakest block") {
  const Problem p = Stars({{0.7, 0.7, 0.7}, {0.7, 0.7, 0.7}, {0.7, 0.7}}, 8.5);
  NonAdaptivePolicy policy{{0, 1, 2}, {0, 1, 2, 3, 4, 5, 6}};
  const NonAdaptiveEvaluator evaluator(p.instance, *p.function, 1000, 1);
  const EpsilonLocalPolicy local = NonAdaptiveToLocal(p.instance, policy, 0.5, 8.5, evaluator);
  CHECK(Cost(local) <= 8.5);
  REQUIRE(local.blocks.size() == 2);
  CHECK(local.blocks[0].first == NodeSet{0});
  CHECK(local.blocks[1].first == NodeSet{1});
}

TEST_CASE("local blocks keep all but 3 eps of the value") {
  RandomStream stream(13);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<std::vector<double>> probs(6);
    for (auto& star : probs) {
      for (int i = 0; i < 2; ++i) star.push_back(0.2 + 0.8 * stream.Uniform());
    }
    const Problem p = Stars(probs, 40);
    NonAdaptivePolicy policy{{0, 1, 2, 3, 4, 5}, {}};
    for (int j = 0; j < 12; ++j) policy.second.push_back(j);
    const double eps = 0.25;
    const double budget = Cost(p.instance, policy);
    const NonAdaptiveEvaluator evaluator(p.instance, *p.function, 1000, 1);
    const EpsilonLocalPolicy local =
        NonAdaptiveToLocal(p.instance, policy, eps, budget + 2, evaluator);
    NeighborSet t;
    for (const BudgetedBlock& b : local.blocks) t = SetUnion(t, b.second);
    CHECK(Cost(local) <= budget + 2 + 1e-9);
    CHECK(evaluator.Value(t) >= (1 - 3 * eps) * evaluator.Value(policy.second) - 1e-9);
  }
}

TEST_CASE("thinning blocks from budgeted blocks") {
  EpsilonLocalPolicy local;
  local.epsilon = 0.25;
  local.blocks.push_back({{0}, 4.6, {0, 1}});
  local.blocks.push_back({{1}, 4.0, {}});
  const LocallyAdaptivePolicy la = LocalToLocallyAdaptive(local, 0.25);
  REQUIRE(la.blocks.size() == 2);
  CHECK(la.blocks[0].mode == BlockMode::kCrs);
  CHECK(la.blocks[0].keep_prob == doctest::Approx(0.75));
  CHECK(la.blocks[0].cap == 4);
  CHECK(la.blocks[0].second_budget == 4);
  CHECK(la.blocks[0].targets == NeighborSet{0, 1});
  CHECK(la.blocks[1].targets.empty());

  const Problem p = Stars({{0.5, 0.5}, {0.5}}, 20);
  LocallyAdaptivePolicy empty_only;
  empty_only.blocks.push_back(la.blocks[1]);
  CHECK(ValueLocallyAdaptive(p.instance, *p.function, empty_only, Exact()).mean == 0);
}

TEST_CASE("a thinning block never seeds more than its budget") {
  const Problem p = Stars({std::vector<double>(12, 0.8)}, 20);
  EpsilonLocalPolicy local;
  local.epsilon = 0.5;
  NeighborSet all;
  for (int j = 0; j < 12; ++j) all.push_back(j);
  local.blocks.push_back({{0}, 3.5, all});
  const LocallyAdaptivePolicy la = LocalToLocallyAdaptive(local, 0.5);
  RandomStream stream(3);
  for (int s = 0; s < 1000; ++s) {
    const Realization r = SampleRealization(p.instance, stream);
    CHECK(ExecutePolicy(p.instance, *p.function, la, r, stream).size() <= 3);
  }
}

TEST_CASE("as-locally-adaptive wraps the optimum in one exact block") {
  AdaptiveOptimum opt;
  opt.first = {1};
  opt.second_budget = 2;
  const LocallyAdaptivePolicy la = AsLocallyAdaptive(opt, 0.5);
  REQUIRE(la.blocks.size() == 1);
  CHECK(la.blocks[0].mode == BlockMode::kExact);
  CHECK(la.blocks[0].second_budget == 2);
  CHECK(AsLocallyAdaptive(AdaptiveOptimum{}, 0.5).blocks.empty());
}

}  // namespace
}  // namespace adseed
