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

#include "adseed/io.h"

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "adseed/errors.h"

namespace adseed {
namespace {

using nlohmann::json;

const json& Require(const json& obj, const char* key, const char* where) {
  if (!obj.is_object() || !obj.contains(key)) {
    throw InputError(std::string(where) + ": missing key '" + key + "'");
  }
  return obj.at(key);
}

NodeSet FirstStageSet(const json& ids, const Instance& instance) {
  std::vector<int> out;
  for (const json& id : ids) out.push_back(instance.FirstStageIndex(id.get<std::string>()));
  return MakeSet(std::move(out));
}

NeighborSet NeighborSetFrom(const json& ids, const Instance& instance) {
  std::vector<int> out;
  for (const json& id : ids) out.push_back(instance.NeighborIndex(id.get<std::string>()));
  return MakeSet(std::move(out));
}

json FirstStageIds(std::span<const int> set, const Instance& instance) {
  json out = json::array();
  for (int x : set) out.push_back(instance.first_stage_id(x));
  return out;
}

json NeighborIds(std::span<const int> set, const Instance& instance) {
  json out = json::array();
  for (int j : set) out.push_back(instance.neighbor_id(j));
  return out;
}

template <typename Fn>
auto Guarded(const char* what, Fn&& fn) {
  try {
    return fn();
  } catch (const json::exception& e) {
    throw InputError(std::string(what) + ": " + e.what());
  }
}

std::shared_ptr<const SubmodularFunction> ParseCoverage(const json& desc,
                                                        const Instance& instance) {
  std::vector<std::string> ids;
  std::vector<double> weights;
  std::map<std::string, int> index;
  for (const auto& [id, w] : Require(desc, "universe", "coverage").items()) {
    index[id] = static_cast<int>(ids.size());
    ids.push_back(id);
    weights.push_back(w.get<double>());
  }
  std::vector<std::vector<int>> covers(instance.num_neighbors());
  for (const auto& [nbr, elems] : Require(desc, "covers", "coverage").items()) {
    const int j = instance.NeighborIndex(nbr);
    for (const json& e : elems) {
      auto it = index.find(e.get<std::string>());
      if (it == index.end()) {
        throw InputError("coverage: element '" + e.get<std::string>() +
                         "' is not in the universe");
      }
      covers[j].push_back(it->second);
    }
  }
  return std::make_shared<CoverageFunction>(std::move(ids), std::move(weights),
                                            std::move(covers));
}

std::shared_ptr<const SubmodularFunction> ParseMrs(const json& desc, const Instance& instance) {
  std::vector<MatroidRankSumFunction::Term> terms;
  for (const json& t : Require(desc, "terms", "mrs")) {
    MatroidRankSumFunction::Term term;
    term.weight = Require(t, "weight", "mrs term").get<double>();
    for (const json& p : Require(t, "parts", "mrs term")) {
      MatroidRankSumFunction::Part part;
      part.capacity = p.value("capacity", 1);
      part.elements = NeighborSetFrom(Require(p, "elements", "mrs part"), instance);
      term.parts.push_back(std::move(part));
    }
    terms.push_back(std::move(term));
  }
  return std::make_shared<MatroidRankSumFunction>(instance.num_neighbors(), std::move(terms));
}

std::shared_ptr<const SubmodularFunction> ParseEdgeWitness(const json& desc,
                                                           const Instance& instance) {
  std::vector<std::pair<int, int>> edges;
  for (const json& e : Require(desc, "edges", "edge_witness")) {
    if (!e.is_array() || e.size() != 2) throw InputError("edge_witness: edges are pairs");
    edges.emplace_back(instance.NeighborIndex(e[0].get<std::string>()),
                       instance.NeighborIndex(e[1].get<std::string>()));
  }
  return std::make_shared<EdgeWitnessFunction>(instance.num_neighbors(), edges);
}

}  // namespace

json InstanceDataToJson(const InstanceData& data) {
  json neighbors = json::object();
  for (const auto& [x, list] : data.neighbors) neighbors[x] = list;
  json probabilities = json::object();
  for (const auto& [y, p] : data.probabilities) probabilities[y] = p;
  return {{"x_nodes", data.x_nodes},
          {"neighbors", neighbors},
          {"probabilities", probabilities},
          {"budget", data.budget}};
}

InstanceData InstanceDataFromJson(const json& j) {
  return Guarded("instance", [&] {
    InstanceData data;
    data.x_nodes = Require(j, "x_nodes", "instance").get<std::vector<std::string>>();
    for (const auto& [x, list] : Require(j, "neighbors", "instance").items()) {
      data.neighbors[x] = list.get<std::vector<std::string>>();
    }
    for (const auto& [y, p] : Require(j, "probabilities", "instance").items()) {
      data.probabilities[y] = p.get<double>();
    }
    data.budget = Require(j, "budget", "instance").get<double>();
    return data;
  });
}

std::shared_ptr<const SubmodularFunction> FunctionFromJson(const json& desc,
                                                           const Instance& instance) {
  return Guarded("function", [&]() -> std::shared_ptr<const SubmodularFunction> {
    const std::string type = Require(desc, "type", "function").get<std::string>();
    if (type == "coverage") return ParseCoverage(desc, instance);
    if (type == "mrs") return ParseMrs(desc, instance);
    if (type == "any_nonempty") {
      return std::make_shared<AnyNonEmptyFunction>(instance.num_neighbors());
    }
    if (type == "edge_witness") return ParseEdgeWitness(desc, instance);
    if (type == "product_gap") {
      return std::make_shared<ProductGapFunction>(instance,
                                                  Require(desc, "m", "product_gap").get<int>());
    }
    throw InputError("unknown function type '" + type + "'");
  });
}

json ProblemToJson(const Problem& problem) {
  json out = InstanceDataToJson(problem.instance.ToData());
  out["function"] = problem.function->Descriptor(problem.instance);
  return out;
}

Problem ProblemFromJson(const json& j) {
  Instance instance = Instance::Create(InstanceDataFromJson(j));
  auto function = FunctionFromJson(Require(j, "function", "instance"), instance);
  return Problem{std::move(instance), std::move(function)};
}

json PolicyToJson(const Instance& instance, const PolicyFile& file) {
  json out;
  if (const auto* na = std::get_if<NonAdaptivePolicy>(&file.policy)) {
    out = {{"kind", "nonadaptive"},
           {"first", FirstStageIds(na->first, instance)},
           {"second", NeighborIds(na->second, instance)}};
    if (file.crs) out["crs"] = {{"keep_prob", file.crs->keep_prob}, {"cap", file.crs->cap}};
  } else if (const auto* el = std::get_if<EpsilonLocalPolicy>(&file.policy)) {
    json blocks = json::array();
    for (const BudgetedBlock& b : el->blocks) {
      blocks.push_back({{"first", FirstStageIds(b.first, instance)},
                        {"budget", b.budget},
                        {"second", NeighborIds(b.second, instance)}});
    }
    out = {{"kind", "epslocal"}, {"epsilon", el->epsilon}, {"blocks", blocks}};
  } else {
    const auto& la = std::get<LocallyAdaptivePolicy>(file.policy);
    json blocks = json::array();
    for (const AdaptiveBlockSpec& b : la.blocks) {
      json block = {{"first", FirstStageIds(b.first, instance)},
                    {"second_budget", b.second_budget},
                    {"mode", BlockModeName(b.mode)}};
      if (b.mode == BlockMode::kCrs) {
        block["keep_prob"] = b.keep_prob;
        block["cap"] = b.cap;
        block["targets"] = NeighborIds(b.targets, instance);
      }
      blocks.push_back(std::move(block));
    }
    out = {{"kind", "locallyadaptive"}, {"epsilon", la.epsilon}, {"blocks", blocks}};
  }
  return out;
}

PolicyFile PolicyFromJson(const json& j, const Instance& instance) {
  return Guarded("policy", [&] {
    const std::string kind = Require(j, "kind", "policy").get<std::string>();
    PolicyFile file;
    if (kind == "nonadaptive") {
      NonAdaptivePolicy p;
      p.first = FirstStageSet(Require(j, "first", "policy"), instance);
      p.second = NeighborSetFrom(Require(j, "second", "policy"), instance);
      file.policy = std::move(p);
      if (j.contains("crs")) {
        const json& c = j.at("crs");
        file.crs = CrsSpec{Require(c, "keep_prob", "crs").get<double>(),
                           Require(c, "cap", "crs").get<double>()};
      }
    } else if (kind == "epslocal") {
      EpsilonLocalPolicy p;
      p.epsilon = Require(j, "epsilon", "policy").get<double>();
      for (const json& b : Require(j, "blocks", "policy")) {
        p.blocks.push_back({FirstStageSet(Require(b, "first", "block"), instance),
                            Require(b, "budget", "block").get<double>(),
                            NeighborSetFrom(Require(b, "second", "block"), instance)});
      }
      file.policy = std::move(p);
    } else if (kind == "locallyadaptive") {
      LocallyAdaptivePolicy p;
      p.epsilon = Require(j, "epsilon", "policy").get<double>();
      for (const json& b : Require(j, "blocks", "policy")) {
        AdaptiveBlockSpec spec;
        spec.first = FirstStageSet(Require(b, "first", "block"), instance);
        spec.second_budget = Require(b, "second_budget", "block").get<int>();
        spec.mode = ParseBlockMode(b.value("mode", std::string("exact")));
        if (spec.mode == BlockMode::kCrs) {
          spec.keep_prob = Require(b, "keep_prob", "block").get<double>();
          spec.cap = Require(b, "cap", "block").get<double>();
          spec.targets = NeighborSetFrom(Require(b, "targets", "block"), instance);
        }
        p.blocks.push_back(std::move(spec));
      }
      file.policy = std::move(p);
    } else {
      throw InputError("unknown policy kind '" + kind + "'");
    }
    return file;
  });
}

json ReadJsonFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw InputError("malformed JSON in '" + path + "': " + e.what());
  }
}

void WriteFileAtomic(const std::string& path, const std::string& content) {
  const std::string temp = path + ".tmp";
  {
    std::ofstream out(temp, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot write '" + temp + "'");
    out << content;
    if (!out.flush()) throw InputError("write to '" + temp + "' failed");
  }
  if (std::rename(temp.c_str(), path.c_str()) != 0) {
    std::remove(temp.c_str());
    throw InputError("cannot move '" + temp + "' to '" + path + "'");
  }
}

Problem LoadProblem(const std::string& path) { return ProblemFromJson(ReadJsonFile(path)); }

void SaveProblem(const std::string& path, const Problem& problem) {
  WriteFileAtomic(path, ProblemToJson(problem).dump(2) + "\n");
}

}  // namespace adseed
