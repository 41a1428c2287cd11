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

// JSON files for instances and policies. Every parse error surfaces as
// InputError.

#ifndef ADSEED_IO_H_
#define ADSEED_IO_H_

#include <memory>
#include <optional>
#include <string>
#include <variant>

#include "adseed/core.h"
#include "adseed/functions.h"
#include "json.hpp"

namespace adseed {

nlohmann::json InstanceDataToJson(const InstanceData& data);
InstanceData InstanceDataFromJson(const nlohmann::json& json);

std::shared_ptr<const SubmodularFunction> FunctionFromJson(const nlohmann::json& json,
                                                           const Instance& instance);

nlohmann::json ProblemToJson(const Problem& problem);
// A missing `function` key is an error.
Problem ProblemFromJson(const nlohmann::json& json);

// Contention-resolution execution of a non-adaptive policy: each realized
// second-stage node is kept with keep_prob, and the kept set is seeded only
// if its size is at most cap.
struct CrsSpec {
  double keep_prob = 1.0;
  double cap = 0;

  bool operator==(const CrsSpec&) const = default;
};

struct PolicyFile {
  std::variant<NonAdaptivePolicy, EpsilonLocalPolicy, LocallyAdaptivePolicy> policy;
  std::optional<CrsSpec> crs;  // nonadaptive only
};

nlohmann::json PolicyToJson(const Instance& instance, const PolicyFile& file);
PolicyFile PolicyFromJson(const nlohmann::json& json, const Instance& instance);

nlohmann::json ReadJsonFile(const std::string& path);
// Writes through a temporary file and renames it into place.
void WriteFileAtomic(const std::string& path, const std::string& content);

Problem LoadProblem(const std::string& path);
void SaveProblem(const std::string& path, const Problem& problem);

}  // namespace adseed

#endif  // ADSEED_IO_H_
