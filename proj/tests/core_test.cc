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

#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "adseed/core.h"
#include "adseed/errors.h"
#include "adseed/functions.h"
#include "adseed/io.h"
#include "doctest.h"
#include "test_util.h"

namespace adseed {
namespace {

using testing::MakeInstance;

Instance TwoNodeInstance() {
  return MakeInstance({{"x0", {"y", "z"}}, {"x1", {"z", "w"}}},
                      {{"y", 0.5}, {"z", 0.25}, {"w", 1.0}}, 3);
}

TEST_CASE("well-formed instance validates cleanly") {
  InstanceData data = TwoNodeInstance().ToData();
  CHECK(ValidateInstance(data).empty());
}

TEST_CASE("zero probability is one violation naming the neighbor") {
  InstanceData data = TwoNodeInstance().ToData();
  data.probabilities["z"] = 0.0;
  const auto violations = ValidateInstance(data);
  REQUIRE(violations.size() == 1);
  CHECK(violations[0].find("'z'") != std::string::npos);
  CHECK_THROWS_AS(Instance::Create(data), InputError);
}

TEST_CASE("missing probability is one violation") {
  InstanceData data = TwoNodeInstance().ToData();
  data.probabilities.erase("w");
  CHECK(ValidateInstance(data).size() == 1);
}

TEST_CASE("shared neighbors appear once with both parents") {
  const Instance inst = TwoNodeInstance();
  CHECK(inst.num_neighbors() == 3);
  const int z = inst.NeighborIndex("z");
  CHECK(inst.parents(z).size() == 2);
  CHECK(inst.NeighborsOf(std::vector<int>{0, 1}).size() == 3);
}

TEST_CASE("sample_realization with p = 1 realizes everything") {
  const Instance inst =
      MakeInstance({{"x", {"a", "b", "c"}}}, {{"a", 1.0}, {"b", 1.0}, {"c", 1.0}}, 1);
  RandomStream stream(7);
  for (int i = 0; i < 100; ++i) {
    CHECK(SampleRealization(inst, stream).Present().size() == 3);
  }
}

TEST_CASE("sample_realization marginals match p") {
  std::vector<std::string> ids;
  std::map<std::string, double> probs;
  for (int i = 0; i < 5; ++i) {
    ids.push_back("y" + std::to_string(i));
    probs[ids.back()] = 0.5;
  }
  const Instance inst = MakeInstance({{"x", ids}}, probs, 1);
  RandomStream stream(11);
  const int n = 100000;
  std::vector<int> counts(5, 0);
  for (int s = 0; s < n; ++s) {
    const Realization r = SampleRealization(inst, stream);
    for (int j = 0; j < 5; ++j) counts[j] += r.Contains(j);
  }
  for (int c : counts) CHECK(std::abs(c / static_cast<double>(n) - 0.5) <= 0.01);
}

TEST_CASE("sample_realization is deterministic per seed") {
  const Instance inst = TwoNodeInstance();
  RandomStream a(3), b(3);
  for (int i = 0; i < 50; ++i) CHECK(SampleRealization(inst, a) == SampleRealization(inst, b));
}

TEST_CASE("enumerate single Bernoulli") {
  const Instance inst = MakeInstance({{"x", {"a"}}}, {{"a", 0.3}}, 1);
  const auto all = EnumerateRealizations(inst, std::vector<int>{0});
  REQUIRE(all.size() == 2);
  CHECK(all[0].first.Present().empty());
  CHECK(all[0].second == doctest::Approx(0.7).epsilon(1e-15));
  CHECK(all[1].first.Present() == NeighborSet{0});
  CHECK(all[1].second == doctest::Approx(0.3).epsilon(1e-15));
}

TEST_CASE("enumerate two fair coins") {
  const Instance inst = MakeInstance({{"x", {"a", "b"}}}, {{"a", 0.5}, {"b", 0.5}}, 1);
  const auto all = EnumerateRealizations(inst, std::vector<int>{0, 1});
  REQUIRE(all.size() == 4);
  for (const auto& [r, p] : all) CHECK(p == doctest::Approx(0.25));
}

TEST_CASE("enumeration probabilities sum to one") {
  std::vector<std::string> ids;
  std::map<std::string, double> probs;
  for (int i = 0; i < 14; ++i) {
    ids.push_back("y" + std::to_string(10 + i));
    probs[ids.back()] = 0.05 + 0.06 * i;
  }
  const Instance inst = MakeInstance({{"x", ids}}, probs, 1);
  NeighborSet ground(14);
  for (int i = 0; i < 14; ++i) ground[i] = i;
  double total = 0;
  ForEachRealization(inst, ground, [&](const Realization&, double p) { total += p; });
  CHECK(std::abs(total - 1.0) <= 1e-12);
}

TEST_CASE("enumeration refuses oversized ground sets") {
  std::vector<std::string> ids;
  std::map<std::string, double> probs;
  for (int i = 0; i < 5; ++i) {
    ids.push_back("y" + std::to_string(i));
    probs[ids.back()] = 0.5;
  }
  const Instance inst = MakeInstance({{"x", ids}}, probs, 1);
  const NeighborSet ground = {0, 1, 2, 3, 4};
  CHECK_THROWS_AS(EnumerateRealizations(inst, ground, 4), CapExceededError);
}

TEST_CASE("costs follow the definitions") {
  const Instance inst = MakeInstance({{"x", {"y", "z"}}}, {{"y", 0.5}, {"z", 0.25}}, 2);
  CHECK(Cost(inst, NonAdaptivePolicy{{0}, {0, 1}}) == doctest::Approx(1.75));

  LocallyAdaptivePolicy la;
  la.blocks.push_back({{0, 1}, 3, BlockMode::kExact, 1.0, 0, {}});
  la.blocks.push_back({{2}, 2, BlockMode::kExact, 1.0, 0, {}});
  CHECK(Cost(la) == 8);
  CHECK(Cost(LocallyAdaptivePolicy{}) == 0);
  CHECK(Cost(EpsilonLocalPolicy{}) == 0);
  CHECK(Cost(inst, NonAdaptivePolicy{}) == 0);
}

TEST_CASE("cost is additive over concatenation") {
  LocallyAdaptivePolicy a, b, ab;
  a.blocks.push_back({{0}, 2, BlockMode::kExact, 1.0, 0, {}});
  b.blocks.push_back({{1, 2}, 1, BlockMode::kGreedy, 1.0, 0, {}});
  ab.blocks = a.blocks;
  ab.blocks.insert(ab.blocks.end(), b.blocks.begin(), b.blocks.end());
  CHECK(Cost(ab) == Cost(a) + Cost(b));

  EpsilonLocalPolicy l1, l2, l12;
  l1.blocks.push_back({{0}, 2.5, {0}});
  l2.blocks.push_back({{1}, 2.0, {1}});
  l12.blocks = {l1.blocks[0], l2.blocks[0]};
  CHECK(Cost(l12) == Cost(l1) + Cost(l2));
}

TEST_CASE("policy checks catch unreachable neighbors and budget") {
  const Instance inst = TwoNodeInstance();
  const int w = inst.NeighborIndex("w");
  CHECK(CheckPolicy(inst, NonAdaptivePolicy{{0}, {w}}, 3.0).size() == 1);
  CHECK(CheckPolicy(inst, NonAdaptivePolicy{{0, 1}, {0, 1, 2}}, 3.0).size() == 1);
  CHECK(CheckPolicy(inst, NonAdaptivePolicy{{0, 1}, {0, 1, 2}}, 4.0).empty());
}

TEST_CASE("block bounds use ceilings") {
  CHECK(MaxBlockFirstStage(0.3) == 12);
  CHECK(MaxBlockSecondStage(0.3) == 7);
  CHECK(MaxBlockFirstStage(0.5) == 4);
  CHECK(MaxBlockSecondStage(0.5) == 4);
}

TEST_CASE("instance serialization round-trips") {
  const Instance inst = TwoNodeInstance();
  const InstanceData data = inst.ToData();
  CHECK(InstanceDataFromJson(nlohmann::json::parse(InstanceDataToJson(data).dump())) == data);
}

TEST_CASE("policy serialization round-trips every kind") {
  const Instance inst = TwoNodeInstance();
  const PolicyFile na{NonAdaptivePolicy{{0}, {0, 1}}, CrsSpec{0.75, 2}};
  const PolicyFile back = PolicyFromJson(PolicyToJson(inst, na), inst);
  CHECK(std::get<NonAdaptivePolicy>(back.policy) == std::get<NonAdaptivePolicy>(na.policy));
  CHECK(back.crs == na.crs);

  EpsilonLocalPolicy local;
  local.epsilon = 0.5;
  local.blocks.push_back({{0, 1}, 2.5, {0, 2}});
  CHECK(std::get<EpsilonLocalPolicy>(PolicyFromJson(PolicyToJson(inst, {local, {}}), inst)
                                         .policy) == local);

  LocallyAdaptivePolicy la;
  la.epsilon = 0.25;
  la.blocks.push_back({{1}, 2, BlockMode::kCrs, 0.75, 2, {1, 2}});
  la.blocks.push_back({{0}, 1, BlockMode::kGreedy, 1.0, 0, {}});
  CHECK(std::get<LocallyAdaptivePolicy>(
            PolicyFromJson(PolicyToJson(inst, {la, {}}), inst).policy) == la);
}

TEST_CASE("malformed policy json is an input error") {
  const Instance inst = TwoNodeInstance();
  CHECK_THROWS_AS(PolicyFromJson(nlohmann::json{{"kind", "mystery"}}, inst), InputError);
  CHECK_THROWS_AS(PolicyFromJson(nlohmann::json{{"kind", "nonadaptive"}, {"first", {"q"}},
                                                {"second", nlohmann::json::array()}},
                                 inst),
                  InputError);
}

TEST_CASE("set helpers") {
  CHECK(SetUnion(std::vector<int>{1, 3}, std::vector<int>{2, 3}) == NeighborSet{1, 2, 3});
  CHECK(SetDifference(std::vector<int>{1, 2, 3}, std::vector<int>{2}) == NeighborSet{1, 3});
  CHECK(MakeSet({3, 1, 3}) == NeighborSet{1, 3});
  CHECK(BinomialCount(10, 3) == 120);
  int count = 0;
  ForEachCombination(std::vector<int>{0, 1, 2, 3}, 2, [&](std::span<const int>) {
    ++count;
    return true;
  });
  CHECK(count == 6);
}

TEST_CASE("first-stage ranks follow id order") {
  const Instance inst =
      MakeInstance({{"xb", {"y"}}, {"xa", {"z"}}}, {{"y", 0.5}, {"z", 0.5}}, 2);
  CHECK(inst.FirstStageRanks() == std::vector<int>{1, 0});
}

}  // namespace
}  // namespace adseed
