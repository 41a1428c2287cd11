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

// Command-line front end: gen, solve, eval, oracle, compare and gap.

#ifndef ADSEED_CLI_H_
#define ADSEED_CLI_H_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "adseed/eval.h"
#include "adseed/functions.h"
#include "adseed/io.h"
#include "adseed/nonadaptive.h"
#include "json.hpp"

namespace adseed {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInternal = 1;
inline constexpr int kExitInput = 2;
inline constexpr int kExitCap = 3;
inline constexpr int kExitInfeasible = 4;

struct AlgorithmParams {
  double epsilon = 0.25;
  std::int64_t samples = 10000;        // value estimates
  std::int64_t search_samples = 1000;  // per candidate inside block searches
  std::uint64_t seed = 1;
  std::int64_t cap_subsets = kDefaultSubsetCap;
  int cap_enum = kDefaultEnumerationLimit;
};

struct AlgorithmRun {
  std::string algorithm;
  std::optional<PolicyFile> policy;  // absent for the SOSP solvers
  nlohmann::json solution;           // SOSP solution or extra details
  Estimate value;
  double cost = 0;
  bool fallback = false;
  GreedyTrace trace;
};

// Algorithms: na-greedy, na-greedy+crs, la-greedy, na-to-la, sosp-fw,
// sosp-bf, bruteforce.
AlgorithmRun RunAlgorithm(const Problem& problem, const std::string& algorithm,
                          const AlgorithmParams& params);

// Value of a policy file, after checking it against the instance budget.
// Throws InfeasiblePolicyError when a check fails.
Estimate EvaluatePolicyFile(const Problem& problem, const PolicyFile& policy,
                            const EvalOptions& options);

// args excludes the program name. Returns the process exit code.
int RunCli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace adseed

#endif  // ADSEED_CLI_H_
