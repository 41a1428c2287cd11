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

#include "adseed/functions.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "adseed/errors.h"

namespace adseed {

double SubmodularFunction::Value(std::span<const int> set) const {
  queries_.fetch_add(1, std::memory_order_relaxed);
  bool sorted = true;
  for (std::size_t i = 0; i < set.size(); ++i) {
    if (set[i] < 0 || set[i] >= ground_size_) {
      throw InputError("element " + std::to_string(set[i]) + " is outside the ground set");
    }
    if (i > 0 && set[i] <= set[i - 1]) sorted = false;
  }
  if (sorted) return Evaluate(set);
  const NeighborSet canonical = MakeSet({set.begin(), set.end()});
  return Evaluate(canonical);
}

double SubmodularFunction::Marginal(std::span<const int> base, int e) const {
  if (std::find(base.begin(), base.end(), e) != base.end()) return 0.0;
  std::vector<int> extended(base.begin(), base.end());
  extended.push_back(e);
  return Value(extended) - Value(base);
}

// --- Coverage ----------------------------------------------------------------

CoverageFunction::CoverageFunction(std::vector<std::string> element_ids,
                                   std::vector<double> weights,
                                   std::vector<std::vector<int>> covers)
    : SubmodularFunction(static_cast<int>(covers.size())),
      element_ids_(std::move(element_ids)),
      weights_(std::move(weights)),
      covers_(std::move(covers)) {
  if (element_ids_.size() != weights_.size()) {
    throw InputError("coverage universe ids and weights differ in length");
  }
  for (double w : weights_) {
    if (!(w >= 0 && std::isfinite(w))) throw InputError("coverage weight must be >= 0");
  }
  for (auto& list : covers_) {
    list = MakeSet(std::move(list));
    for (int u : list) {
      if (u < 0 || u >= universe_size()) throw InputError("coverage refers to unknown element");
    }
  }
}

double CoverageFunction::Evaluate(std::span<const int> set) const {
  std::vector<std::uint8_t> covered(weights_.size(), 0);
  double total = 0;
  for (int j : set) {
    for (int u : covers_[j]) {
      if (!covered[u]) {
        covered[u] = 1;
        total += weights_[u];
      }
    }
  }
  return total;
}

nlohmann::json CoverageFunction::Descriptor(const Instance& instance) const {
  nlohmann::json universe = nlohmann::json::object();
  for (int u = 0; u < universe_size(); ++u) universe[element_ids_[u]] = weights_[u];
  nlohmann::json covers = nlohmann::json::object();
  for (int j = 0; j < ground_size(); ++j) {
    nlohmann::json list = nlohmann::json::array();
    for (int u : covers_[j]) list.push_back(element_ids_[u]);
    covers[instance.neighbor_id(j)] = std::move(list);
  }
  return {{"type", "coverage"}, {"universe", universe}, {"covers", covers}};
}

std::optional<std::vector<WeightedPart>> CoverageFunction::AsMatroidRankSum() const {
  std::vector<WeightedPart> parts(weights_.size());
  for (int u = 0; u < universe_size(); ++u) {
    parts[u].weight = weights_[u];
    parts[u].capacity = 1;
  }
  for (int j = 0; j < ground_size(); ++j) {
    for (int u : covers_[j]) parts[u].elements.push_back(j);
  }
  std::erase_if(parts, [](const WeightedPart& p) { return p.elements.empty() || p.weight == 0; });
  return parts;
}

// --- Matroid rank sum ------------------------------------------------------------

MatroidRankSumFunction::MatroidRankSumFunction(int ground_size, std::vector<Term> terms)
    : SubmodularFunction(ground_size), terms_(std::move(terms)), membership_(ground_size) {
  for (std::size_t t = 0; t < terms_.size(); ++t) {
    Term& term = terms_[t];
    if (!(term.weight >= 0 && std::isfinite(term.weight))) {
      throw InputError("matroid rank sum weight must be >= 0");
    }
    std::vector<std::uint8_t> used(ground_size, 0);
    for (Part& part : term.parts) {
      if (part.capacity < 1) throw InputError("partition capacity must be >= 1");
      part.elements = MakeSet(std::move(part.elements));
      for (int e : part.elements) {
        if (e < 0 || e >= ground_size) throw InputError("partition refers to unknown neighbor");
        if (used[e]) {
          throw InputError("parts of matroid rank sum term " + std::to_string(t) + " overlap");
        }
        used[e] = 1;
      }
      const int index = static_cast<int>(flat_.size());
      flat_.push_back({term.weight, part.capacity, part.elements});
      for (int e : part.elements) membership_[e].push_back(index);
    }
  }
}

double MatroidRankSumFunction::Evaluate(std::span<const int> set) const {
  std::vector<int> counts(flat_.size(), 0);
  double total = 0;
  for (int e : set) {
    for (int p : membership_[e]) {
      if (counts[p]++ < flat_[p].capacity) total += flat_[p].weight;
    }
  }
  return total;
}

nlohmann::json MatroidRankSumFunction::Descriptor(const Instance& instance) const {
  nlohmann::json terms = nlohmann::json::array();
  for (const Term& term : terms_) {
    nlohmann::json parts = nlohmann::json::array();
    for (const Part& part : term.parts) {
      nlohmann::json elements = nlohmann::json::array();
      for (int e : part.elements) elements.push_back(instance.neighbor_id(e));
      parts.push_back({{"elements", elements}, {"capacity", part.capacity}});
    }
    terms.push_back({{"weight", term.weight}, {"parts", parts}});
  }
  return {{"type", "mrs"}, {"terms", terms}};
}

std::optional<std::vector<WeightedPart>> MatroidRankSumFunction::AsMatroidRankSum() const {
  return flat_;
}

// --- Any non-empty -----------------------------------------------------------------

nlohmann::json AnyNonEmptyFunction::Descriptor(const Instance&) const {
  return {{"type", "any_nonempty"}};
}

// --- Edge witness ----------------------------------------------------------------

EdgeWitnessFunction::EdgeWitnessFunction(int ground_size,
                                         const std::vector<std::pair<int, int>>& edges)
    : SubmodularFunction(ground_size), adjacency_(ground_size) {
  for (auto [u, v] : edges) {
    if (u < 0 || v < 0 || u >= ground_size || v >= ground_size) {
      throw InputError("edge refers to unknown neighbor");
    }
    if (u == v) throw InputError("self-loops are not allowed");
    adjacency_[u].push_back(v);
    adjacency_[v].push_back(u);
  }
  for (auto& list : adjacency_) {
    list = MakeSet(std::move(list));
    num_edges_ += static_cast<std::int64_t>(list.size());
  }
  num_edges_ /= 2;
}

bool EdgeWitnessFunction::ContainsEdge(std::span<const int> set) const {
  const NeighborSet sorted = MakeSet({set.begin(), set.end()});
  for (int u : sorted) {
    for (int v : adjacency_[u]) {
      if (v > u && SetContains(sorted, v)) return true;
    }
  }
  return false;
}

double EdgeWitnessFunction::Evaluate(std::span<const int> set) const {
  for (int u : set) {
    const auto& adj = adjacency_[u];
    // Intersect the sorted adjacency list with the sorted set.
    auto a = adj.begin();
    auto b = set.begin();
    while (a != adj.end() && b != set.end()) {
      if (*a < *b) {
        ++a;
      } else if (*b < *a) {
        ++b;
      } else {
        return 1.0;
      }
    }
  }
  return 1.0 - std::ldexp(1.0, -static_cast<int>(set.size()));
}

nlohmann::json EdgeWitnessFunction::Descriptor(const Instance& instance) const {
  nlohmann::json edges = nlohmann::json::array();
  for (int u = 0; u < ground_size(); ++u) {
    for (int v : adjacency_[u]) {
      if (v > u) edges.push_back({instance.neighbor_id(u), instance.neighbor_id(v)});
    }
  }
  return {{"type", "edge_witness"}, {"edges", edges}};
}

// --- Product gap ---------------------------------------------------------------------

ProductGapFunction::ProductGapFunction(const Instance& instance, int m)
    : SubmodularFunction(instance.num_neighbors()),
      m_(m),
      special_(instance.num_first_stage(), -1),
      group_(instance.num_neighbors(), -1),
      is_special_(instance.num_neighbors(), 0) {
  if (m < 1) throw InputError("product_gap needs m >= 1");
  for (int x = 0; x < instance.num_first_stage(); ++x) {
    const auto kids = instance.children(x);
    if (static_cast<int>(kids.size()) != m * m + 1) {
      throw InputError("product_gap: node '" + instance.first_stage_id(x) + "' needs exactly " +
                       std::to_string(m * m + 1) + " neighbors");
    }
    for (std::size_t i = 0; i < kids.size(); ++i) {
      const int j = kids[i];
      if (group_[j] != -1) {
        throw InputError("product_gap: neighbor '" + instance.neighbor_id(j) +
                         "' is shared between groups");
      }
      group_[j] = x;
      if (i == 0) {
        special_[x] = j;
        is_special_[j] = 1;
      }
    }
  }
}

double ProductGapFunction::Evaluate(std::span<const int> set) const {
  std::vector<int> specials(special_.size(), 0);
  std::vector<int> regulars(special_.size(), 0);
  for (int j : set) {
    const int x = group_[j];
    if (x < 0) continue;
    if (is_special_[j]) {
      ++specials[x];
    } else {
      ++regulars[x];
    }
  }
  const double mm = static_cast<double>(m_) * m_;
  double product = 1.0;
  for (std::size_t x = 0; x < special_.size(); ++x) {
    product *= 1.0 - 0.5 * specials[x] - regulars[x] / (2.0 * mm);
  }
  return 1.0 - product;
}

nlohmann::json ProductGapFunction::Descriptor(const Instance&) const {
  return {{"type", "product_gap"}, {"m", m_}};
}

// --- Contract check ----------------------------------------------------------------

OracleCheckReport CheckOracle(const SubmodularFunction& f, int trials, RandomStream& stream) {
  OracleCheckReport report;
  report.trials = trials;
  const int n = f.ground_size();
  const double empty = f.Value({});
  if (std::abs(empty) > 1e-12) {
    std::ostringstream msg;
    msg << "f(empty) = " << empty;
    report.violations.push_back(msg.str());
  }
  if (n == 0) return report;
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  for (int trial = 0; trial < trials; ++trial) {
    std::shuffle(order.begin(), order.end(), stream.engine());
    // S = order[0, a), T = order[0, b), element a = order[b] when b < n.
    const int b = static_cast<int>(stream.UniformInt(n + 1));
    const int a = static_cast<int>(stream.UniformInt(b + 1));
    const std::span<const int> small(order.data(), a);
    const std::span<const int> large(order.data(), b);
    const double fs = f.Value(small);
    const double ft = f.Value(large);
    const double tol = 1e-12 * std::max(1.0, std::abs(ft));
    if (fs > ft + tol) {
      std::ostringstream msg;
      msg << "trial " << trial << ": monotonicity fails, f(S)=" << fs << " > f(T)=" << ft
          << " with |S|=" << a << ", |T|=" << b;
      report.violations.push_back(msg.str());
    }
    if (fs < -tol) {
      std::ostringstream msg;
      msg << "trial " << trial << ": negative value " << fs;
      report.violations.push_back(msg.str());
    }
    if (b < n) {
      const int e = order[b];
      const double gain_small = f.Marginal(small, e);
      const double gain_large = f.Marginal(large, e);
      if (gain_small < gain_large - tol) {
        std::ostringstream msg;
        msg << "trial " << trial << ": diminishing returns fails for element " << e
            << ", f_S(a)=" << gain_small << " < f_T(a)=" << gain_large;
        report.violations.push_back(msg.str());
      }
    }
  }
  return report;
}

}  // namespace adseed
