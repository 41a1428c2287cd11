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

#include "adseed/harness.h"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>

#include "adseed/errors.h"

namespace adseed {
namespace {

std::string PaddedId(const std::string& prefix, int i, int count) {
  int width = 2;
  for (int n = count - 1; n >= 100; n /= 10) ++width;
  std::string digits = std::to_string(i);
  if (static_cast<int>(digits.size()) < width) {
    digits.insert(0, width - digits.size(), '0');
  }
  return prefix + digits;
}

double BinomialPmf(int n, int k, double p) {
  return std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0)) *
         std::pow(p, k) * std::pow(1.0 - p, n - k);
}

}  // namespace

nlohmann::json GapReferenceToJson(const GapReference& r) {
  return {{"family", r.family},
          {"parameter", r.parameter},
          {"adaptive_value", r.adaptive_value},
          {"comparison_value", r.comparison_value},
          {"ratio", r.ratio},
          {"limit",
           {{"adaptive_value", r.limit_adaptive},
            {"comparison_value", r.limit_comparison},
            {"ratio", r.limit_ratio}}}};
}

Problem GenGapNa(double delta) {
  if (!(delta > 0 && delta <= 1)) throw InputError("delta must lie in (0, 1]");
  const int n = static_cast<int>(std::ceil(1.0 / (delta * delta) - 1e-9));
  InstanceData data;
  data.x_nodes = {"x0"};
  auto& kids = data.neighbors["x0"];
  for (int i = 0; i < n; ++i) {
    kids.push_back(PaddedId("y", i, n));
    data.probabilities[kids.back()] = delta;
  }
  data.budget = 2;
  Problem problem{Instance::Create(data), nullptr};
  problem.function = std::make_shared<AnyNonEmptyFunction>(n);
  return problem;
}

GapReference GapNaReference(double delta) {
  if (!(delta > 0 && delta <= 1)) throw InputError("delta must lie in (0, 1]");
  GapReference r;
  r.family = "na";
  r.parameter = delta;
  const double n = std::ceil(1.0 / (delta * delta) - 1e-9);
  const double affordable = std::floor(1.0 / delta + 1e-9);
  r.adaptive_value = 1.0 - std::pow(1.0 - delta, n);
  r.comparison_value = 1.0 - std::pow(1.0 - delta, affordable);
  r.ratio = r.comparison_value / r.adaptive_value;
  r.limit_adaptive = 1.0;
  r.limit_comparison = 1.0 - std::exp(-1.0);
  r.limit_ratio = r.limit_comparison;
  return r;
}

NeighborSet GapNaAdaptiveExecutor::SecondStage(const Realization& r, RandomStream&) const {
  for (int j : instance_.children(0)) {
    if (r.Contains(j)) return {j};
  }
  return {};
}

Problem GenGapLa(int m, int max_m) {
  if (m < 2) throw InputError("the locally-adaptive gap instance needs m >= 2");
  if (m > max_m) {
    throw InputError("m = " + std::to_string(m) + " exceeds the cap of " +
                     std::to_string(max_m) + " (" + std::to_string(m) + "^3 neighbors)");
  }
  const int regular = m * m;
  InstanceData data;
  for (int x = 0; x < m; ++x) {
    const std::string xid = PaddedId("x", x, m);
    data.x_nodes.push_back(xid);
    auto& kids = data.neighbors[xid];
    const std::string special = PaddedId("s", x, m);
    kids.push_back(special);
    data.probabilities[special] = 1.0 / m;
    for (int i = 0; i < regular; ++i) {
      kids.push_back(PaddedId("z", x, m) + "_" + PaddedId("", i, regular));
      data.probabilities[kids.back()] = 1.0;
    }
  }
  data.budget = regular + m + 1;
  Problem problem{Instance::Create(data), nullptr};
  problem.function = std::make_shared<ProductGapFunction>(problem.instance, m);
  return problem;
}

GapReference GapLaReference(int m) {
  if (m < 2) throw InputError("the locally-adaptive gap reference needs m >= 2");
  GapReference r;
  r.family = "la";
  r.parameter = m;
  r.adaptive_value = 1.0 - 0.5 * std::pow(1.0 - 1.0 / m, m);
  r.comparison_value = 1.0 - 0.5 * std::pow(1.0 - 0.5 / m, m);
  r.ratio = r.comparison_value / r.adaptive_value;
  r.limit_adaptive = 1.0 - 0.5 * std::exp(-1.0);
  r.limit_comparison = 1.0 - 0.5 * std::exp(-0.5);
  r.limit_ratio = r.limit_comparison / r.limit_adaptive;
  return r;
}

NodeSet GapLaAdaptiveExecutor::FirstStage() const {
  NodeSet all(instance_.num_first_stage());
  std::iota(all.begin(), all.end(), 0);
  return all;
}

NeighborSet GapLaAdaptiveExecutor::SecondStage(const Realization& r, RandomStream&) const {
  const int nx = instance_.num_first_stage();
  int chosen = 0;
  bool special = false;
  for (int x = 0; x < nx && !special; ++x) {
    if (r.Contains(f_.special(x))) {
      chosen = x;
      special = true;
    }
  }
  NeighborSet out;
  for (int j : instance_.children(chosen)) {
    if (j != f_.special(chosen) || special) out.push_back(j);
  }
  return MakeSet(std::move(out));
}

Problem GenHardness(int l, double k, HardnessMode mode, double density, RandomStream& stream) {
  if (l < 2) throw InputError("hardness instances need l >= 2");
  if (!(k > 0 && k <= l)) throw InputError("hardness instances need 0 < k <= l");
  if (mode == HardnessMode::kSparse && !(density >= 0 && density <= 1)) {
    throw InputError("edge density must lie in [0, 1]");
  }
  InstanceData data;
  data.x_nodes = {"x0"};
  auto& kids = data.neighbors["x0"];
  for (int i = 0; i < l; ++i) {
    kids.push_back(PaddedId("v", i, l));
    data.probabilities[kids.back()] = k / l;
  }
  data.budget = k;
  Problem problem{Instance::Create(data), nullptr};
  std::vector<std::pair<int, int>> edges;
  for (int a = 0; a < l; ++a) {
    for (int b = a + 1; b < l; ++b) {
      if (mode == HardnessMode::kClique || stream.Bernoulli(density)) edges.emplace_back(a, b);
    }
  }
  problem.function = std::make_shared<EdgeWitnessFunction>(l, edges);
  return problem;
}

double CliqueValue(int l, double k) {
  const double p = k / l;
  return 1.0 - BinomialPmf(l, 0, p) - 0.5 * BinomialPmf(l, 1, p);
}

double CliqueLimit(double k) { return 1.0 - (k / 2 + 1) * std::exp(-k); }

double HardnessThreshold(double k) { return (1.0 - std::exp(-k / 2)) / CliqueLimit(k); }

Problem GenRandom(const RandomInstanceOptions& o, RandomStream& stream) {
  if (o.nx < 1 || o.deg < 1) throw InputError("nx and deg must be at least 1");
  if (!(o.p_low > 0 && o.p_low <= o.p_high && o.p_high <= 1)) {
    throw InputError("probabilities need 0 < p_low <= p_high <= 1");
  }
  const std::string& family = o.family;
  if (family != "coverage" && family != "mrs" && family != "any_nonempty" &&
      family != "edge_witness") {
    throw InputError("cannot generate random '" + family + "' instances");
  }
  const int pool = std::max(o.deg, (o.nx * o.deg + 1) / 2);
  InstanceData data;
  std::vector<std::uint8_t> used(pool, 0);
  std::vector<int> order(pool);
  for (int x = 0; x < o.nx; ++x) {
    const std::string xid = PaddedId("x", x, o.nx);
    data.x_nodes.push_back(xid);
    std::iota(order.begin(), order.end(), 0);
    for (int i = 0; i < o.deg; ++i) {
      const int pick = i + static_cast<int>(stream.UniformInt(pool - i));
      std::swap(order[i], order[pick]);
    }
    std::sort(order.begin(), order.begin() + o.deg);
    for (int i = 0; i < o.deg; ++i) {
      data.neighbors[xid].push_back(PaddedId("y", order[i], pool));
      used[order[i]] = 1;
    }
  }
  for (int j = 0; j < pool; ++j) {
    if (used[j]) {
      data.probabilities[PaddedId("y", j, pool)] =
          o.p_low + (o.p_high - o.p_low) * stream.Uniform();
    }
  }
  data.budget = o.budget;
  Problem problem{Instance::Create(data), nullptr};
  const Instance& inst = problem.instance;
  const int n = inst.num_neighbors();

  if (family == "coverage") {
    const int universe = std::max(2, n / 2 + 1);
    std::vector<std::string> ids;
    std::vector<double> weights;
    for (int u = 0; u < universe; ++u) {
      ids.push_back(PaddedId("u", u, universe));
      weights.push_back(0.5 + stream.Uniform());
    }
    std::vector<std::vector<int>> covers(n);
    for (int j = 0; j < n; ++j) {
      const int count = 1 + static_cast<int>(stream.UniformInt(3));
      for (int c = 0; c < count; ++c) {
        covers[j].push_back(static_cast<int>(stream.UniformInt(universe)));
      }
      covers[j] = MakeSet(std::move(covers[j]));
    }
    problem.function = std::make_shared<CoverageFunction>(ids, weights, covers);
  } else if (family == "mrs") {
    std::vector<MatroidRankSumFunction::Term> terms(2);
    for (auto& term : terms) {
      term.weight = 0.5 + stream.Uniform();
      const int parts = std::max(1, n / 3);
      term.parts.resize(parts);
      for (auto& part : term.parts) part.capacity = 1 + static_cast<int>(stream.UniformInt(3));
      for (int j = 0; j < n; ++j) {
        if (stream.Bernoulli(0.8)) {
          term.parts[stream.UniformInt(parts)].elements.push_back(j);
        }
      }
    }
    problem.function = std::make_shared<MatroidRankSumFunction>(n, std::move(terms));
  } else if (family == "any_nonempty") {
    problem.function = std::make_shared<AnyNonEmptyFunction>(n);
  } else {
    std::vector<std::pair<int, int>> edges;
    for (int a = 0; a < n; ++a) {
      for (int b = a + 1; b < n; ++b) {
        if (stream.Bernoulli(0.3)) edges.emplace_back(a, b);
      }
    }
    problem.function = std::make_shared<EdgeWitnessFunction>(n, edges);
  }
  return problem;
}

}  // namespace adseed
