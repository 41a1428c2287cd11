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

#include "adseed/cli.h"

#include <chrono>
#include <filesystem>
#include <memory>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "adseed/errors.h"
#include "adseed/harness.h"
#include "adseed/locally_adaptive.h"
#include "adseed/oracle.h"
#include "adseed/sosp.h"

namespace adseed {
namespace {

const std::vector<std::string> kAlgorithms = {"na-greedy", "na-greedy+crs", "la-greedy",
                                              "na-to-la",  "sosp-fw",       "sosp-bf",
                                              "bruteforce"};

OracleLimits LimitsFor(const AlgorithmParams& params) {
  OracleLimits limits;
  limits.cap = params.cap_subsets;
  return limits;
}

EvalOptions ValueOptions(const AlgorithmParams& params) {
  EvalOptions options;
  options.samples = params.samples;
  options.seed = params.seed;
  options.enumeration_limit = params.cap_enum;
  return options;
}

bool HasSmallProbabilities(const Instance& instance, double delta) {
  for (double p : instance.probabilities()) {
    if (p < delta) return true;
  }
  return false;
}

// Matroid rank sums with small-probability neighbors get the relaxation-based
// finder; everything else is enumerated directly.
std::unique_ptr<BlockFinder> MakeFinder(const Problem& problem, const AlgorithmParams& params) {
  const MrsFinderOptions mrs = DefaultMrsFinderOptions(params.epsilon);
  if (problem.function->AsMatroidRankSum() && HasSmallProbabilities(problem.instance, mrs.delta)) {
    MrsFinderOptions options = mrs;
    options.cap = params.cap_subsets;
    return std::make_unique<MrsBlockFinder>(params.epsilon, options);
  }
  EnumerationFinderOptions options;
  options.cap = params.cap_subsets;
  options.samples = params.search_samples;
  options.refine_samples = params.samples;
  options.seed = params.seed;
  options.enumeration_limit = params.cap_enum;
  return std::make_unique<EnumerationBlockFinder>(params.epsilon, options);
}

BlockSearchOptions SearchOptions(const AlgorithmParams& params) {
  BlockSearchOptions options;
  options.samples = params.search_samples;
  options.seed = params.seed;
  options.cap = params.cap_subsets;
  return options;
}

nlohmann::json Ids(const Instance& instance, std::span<const int> set) {
  nlohmann::json out = nlohmann::json::array();
  for (int j : set) out.push_back(instance.neighbor_id(j));
  return out;
}

// The non-adaptive greedy, or the exact non-adaptive optimum when the budget
// leaves no room for the greedy loop.
NonAdaptivePolicy NonAdaptiveSolution(const Problem& problem, const AlgorithmParams& params,
                                      AlgorithmRun& run) {
  const Instance& inst = problem.instance;
  const std::unique_ptr<BlockFinder> finder = MakeFinder(problem, params);
  if (inst.budget() <= finder->Reserve() + kBudgetTolerance) {
    run.fallback = true;
    return OptNonAdaptiveBruteforce(inst, *problem.function, inst.budget(), LimitsFor(params))
        .policy;
  }
  NonAdaptiveGreedyResult greedy =
      NonAdaptiveGreedy(inst, *problem.function, inst.budget(), *finder, ValueOptions(params));
  run.trace = std::move(greedy.trace);
  return std::move(greedy.policy);
}

}  // namespace

AlgorithmRun RunAlgorithm(const Problem& problem, const std::string& algorithm,
                          const AlgorithmParams& params) {
  const Instance& inst = problem.instance;
  const SubmodularFunction& f = *problem.function;
  const double k = inst.budget();
  const EvalOptions value_options = ValueOptions(params);
  AlgorithmRun run;
  run.algorithm = algorithm;
  run.solution = nlohmann::json::object();

  if (algorithm == "na-greedy") {
    NonAdaptivePolicy policy = NonAdaptiveSolution(problem, params, run);
    run.value = ValueNonAdaptive(inst, f, policy.second, value_options);
    run.cost = Cost(inst, policy);
    run.policy = PolicyFile{std::move(policy), std::nullopt};
  } else if (algorithm == "na-greedy+crs") {
    const std::unique_ptr<BlockFinder> finder = MakeFinder(problem, params);
    const NonAdaptiveEvaluator evaluator(inst, f, params.search_samples, params.seed,
                                         params.cap_enum);
    AdaptiveConversion conv =
        NonAdaptiveToAdaptive(inst, f, k, params.epsilon, *finder, evaluator, LimitsFor(params));
    run.fallback = conv.fallback;
    if (conv.fallback) {
      LocallyAdaptivePolicy policy = AsLocallyAdaptive(conv.optimum, params.epsilon);
      run.value = ExactEstimate(conv.optimum.value);
      run.cost = Cost(policy);
      run.policy = PolicyFile{std::move(policy), std::nullopt};
    } else {
      const CrsExecutor executor(conv.policy, conv.crs);
      run.value = ValueAdaptiveExecutor(inst, f, executor, k, value_options);
      run.cost = Cost(inst, conv.policy);
      run.solution["trimmed"] = conv.trimmed;
      run.solution["guarantee_applies"] = conv.guarantee_applies;
      run.trace = std::move(conv.trace);
      run.policy = PolicyFile{std::move(conv.policy), conv.crs};
    }
  } else if (algorithm == "la-greedy") {
    LocallyAdaptiveSolution solved = SolveLocallyAdaptive(inst, f, k, params.epsilon,
                                                          SearchOptions(params), LimitsFor(params));
    run.fallback = solved.fallback;
    run.value = solved.fallback
                    ? ExactEstimate(solved.optimum.value)
                    : ValueLocallyAdaptive(inst, f, solved.policy, value_options);
    run.cost = Cost(solved.policy);
    run.trace = std::move(solved.trace);
    run.policy = PolicyFile{std::move(solved.policy), std::nullopt};
  } else if (algorithm == "na-to-la") {
    const NonAdaptivePolicy na = NonAdaptiveSolution(problem, params, run);
    const NonAdaptiveEvaluator evaluator(inst, f, params.search_samples, params.seed,
                                         params.cap_enum);
    const EpsilonLocalPolicy local = NonAdaptiveToLocal(inst, na, params.epsilon, k, evaluator);
    LocallyAdaptivePolicy policy = LocalToLocallyAdaptive(local, params.epsilon);
    run.value = ValueLocallyAdaptive(inst, f, policy, value_options);
    run.cost = Cost(policy);
    run.solution["nonadaptive_value"] = EstimateToJson(ValueNonAdaptive(inst, f, na.second,
                                                                        value_options));
    run.solution["local_blocks"] = local.blocks.size();
    run.policy = PolicyFile{std::move(policy), std::nullopt};
  } else if (algorithm == "sosp-fw") {
    const SospProblem sp = MakeSospProblem(inst, f);
    const SospResult result = SospSolve(sp);
    nlohmann::json q = nlohmann::json::object();
    for (std::size_t i = 0; i < sp.candidates.size(); ++i) {
      q[inst.neighbor_id(sp.candidates[i])] = result.relaxation.q.q[i];
    }
    run.value = ExactEstimate(result.value);
    run.cost = ExpectedSize(inst, result.set);
    run.solution = {{"set", Ids(inst, result.set)},
                    {"q", q},
                    {"objective", result.relaxation.objective},
                    {"gap", result.relaxation.gap},
                    {"iterations", result.relaxation.iterations}};
  } else if (algorithm == "sosp-bf") {
    const SospOptimum best = SospBruteforce(MakeSospProblem(inst, f), params.cap_subsets);
    run.value = ExactEstimate(best.value);
    run.cost = ExpectedSize(inst, best.set);
    run.solution = {{"set", Ids(inst, best.set)}, {"feasible_sets", best.feasible_sets}};
  } else if (algorithm == "bruteforce") {
    const AdaptiveOptimum best = OptAdaptiveBruteforce(inst, f, k, LimitsFor(params));
    LocallyAdaptivePolicy policy = AsLocallyAdaptive(best, params.epsilon);
    run.value = ExactEstimate(best.value);
    run.cost = Cost(policy);
    run.policy = PolicyFile{std::move(policy), std::nullopt};
  } else {
    throw InputError("unknown algorithm '" + algorithm + "'");
  }
  return run;
}

Estimate EvaluatePolicyFile(const Problem& problem, const PolicyFile& file,
                            const EvalOptions& options) {
  const Instance& inst = problem.instance;
  const SubmodularFunction& f = *problem.function;
  auto require = [](const std::vector<std::string>& problems) {
    if (problems.empty()) return;
    std::string msg = "infeasible policy:";
    for (const std::string& p : problems) msg += "\n  " + p;
    throw InfeasiblePolicyError(msg);
  };
  if (const auto* na = std::get_if<NonAdaptivePolicy>(&file.policy)) {
    require(CheckPolicy(inst, *na, inst.budget()));
    if (file.crs) {
      return ValueAdaptiveExecutor(inst, f, CrsExecutor(*na, *file.crs), inst.budget(), options);
    }
    return ValueNonAdaptive(inst, f, na->second, options);
  }
  if (const auto* local = std::get_if<EpsilonLocalPolicy>(&file.policy)) {
    require(CheckPolicy(inst, *local, inst.budget()));
    NeighborSet t;
    for (const BudgetedBlock& b : local->blocks) t = SetUnion(t, b.second);
    return ValueNonAdaptive(inst, f, t, options);
  }
  const auto& la = std::get<LocallyAdaptivePolicy>(file.policy);
  require(CheckPolicy(inst, la, inst.budget()));
  return ValueLocallyAdaptive(inst, f, la, options);
}

namespace {

std::string Dump(const nlohmann::json& j) { return j.dump(2) + "\n"; }

void Emit(const std::string& content, const std::string& path, std::ostream& out) {
  if (path.empty()) {
    out << content;
  } else {
    WriteFileAtomic(path, content);
  }
}

std::string Csv(double v) {
  std::ostringstream s;
  s.precision(15);
  s << v;
  return s.str();
}

int Dispatch(CLI::App& app, std::ostream& out,
             const std::function<int()>& gen, const std::function<int()>& solve,
             const std::function<int()>& eval, const std::function<int()>& oracle,
             const std::function<int()>& compare, const std::function<int()>& gap) {
  if (app.got_subcommand("gen")) return gen();
  if (app.got_subcommand("solve")) return solve();
  if (app.got_subcommand("eval")) return eval();
  if (app.got_subcommand("oracle")) return oracle();
  if (app.got_subcommand("compare")) return compare();
  if (app.got_subcommand("gap")) return gap();
  out << app.help();
  return kExitInput;
}

}  // namespace

int RunCli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Two-stage adaptive seeding: solvers, oracles and gap instances", "adseed"};
  app.require_subcommand(1);

  AlgorithmParams params;
  std::string out_path, format = "json";
  auto common = [&](CLI::App* cmd) {
    cmd->add_option("--epsilon", params.epsilon, "Accuracy parameter")->check(
        CLI::Range(1e-6, 10.0));
    cmd->add_option("--samples", params.samples, "Monte Carlo samples for value estimates")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--search-samples", params.search_samples,
                    "Monte Carlo samples per candidate in block searches")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--seed", params.seed, "Random seed");
    cmd->add_option("--out", out_path, "Output file (default: stdout)");
    cmd->add_option("--format", format, "Output format")->check(CLI::IsMember({"json", "csv"}));
    cmd->add_option("--cap-subsets", params.cap_subsets, "Cap on enumerated subsets")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--cap-enum", params.cap_enum, "Exact realization enumeration limit")
        ->check(CLI::Range(1, 62));
  };

  // gen
  CLI::App* gen = app.add_subcommand("gen", "Write an instance file");
  common(gen);
  std::string gen_family, mode = "clique", function = "coverage";
  double param = 0, hard_k = 1.7, density = 0, p_low = 0.1, p_high = 1.0, budget = 2;
  int hard_l = 5, nx = 5, deg = 2;
  gen->add_option("--family", gen_family, "Instance family")
      ->required()
      ->check(CLI::IsMember({"gap-na", "gap-la", "hardness", "random"}));
  gen->add_option("--param", param, "delta for gap-na, m for gap-la");
  gen->add_option("--l", hard_l, "Vertices of a hardness instance");
  gen->add_option("--k", hard_k, "Budget of a hardness instance");
  gen->add_option("--mode", mode, "Hardness graph")->check(CLI::IsMember({"clique", "sparse"}));
  gen->add_option("--density", density, "Edge probability in sparse mode");
  gen->add_option("--nx", nx, "First-stage nodes of a random instance");
  gen->add_option("--deg", deg, "Neighbors per first-stage node");
  gen->add_option("--p-low", p_low, "Lowest neighbor probability");
  gen->add_option("--p-high", p_high, "Highest neighbor probability");
  gen->add_option("--function", function, "Function family of a random instance");
  gen->add_option("--budget", budget, "Budget of a random instance");

  // solve
  CLI::App* solve = app.add_subcommand("solve", "Run one algorithm on an instance");
  common(solve);
  std::string instance_path, alg, trace_path;
  solve->add_option("instance", instance_path, "Instance file")->required();
  solve->add_option("--alg", alg, "Algorithm")->required()->check(CLI::IsMember(kAlgorithms));
  solve->add_option("--trace", trace_path, "Greedy trace CSV");
  std::string summary_path;
  solve->add_option("--summary", summary_path, "Summary file (default: stdout)");

  // eval
  CLI::App* eval = app.add_subcommand("eval", "Score a policy file against an instance");
  common(eval);
  std::string policy_path, method = "auto";
  eval->add_option("instance", instance_path, "Instance file")->required();
  eval->add_option("policy", policy_path, "Policy file")->required();
  eval->add_option("--method", method, "Evaluation method")
      ->check(CLI::IsMember({"auto", "exact", "mc"}));

  // oracle
  CLI::App* oracle = app.add_subcommand("oracle", "Exact optima of a tiny instance");
  common(oracle);
  bool witness = false;
  OracleLimits limits;
  oracle->add_option("instance", instance_path, "Instance file")->required();
  oracle->add_flag("--witness", witness, "Include the optimal choice per realization");
  oracle->add_option("--max-first-stage", limits.max_first_stage, "First-stage size limit");
  oracle->add_option("--max-neighbors", limits.max_neighbors, "Neighbor count limit");

  // compare
  CLI::App* compare = app.add_subcommand("compare", "Run several algorithms; ratio table");
  common(compare);
  std::vector<std::string> instances;
  std::vector<std::string> algs = {"na-greedy", "na-greedy+crs", "la-greedy", "bruteforce"};
  compare->add_option("instances", instances, "Instance files")->required();
  compare->add_option("--algs", algs, "Algorithms")
      ->delimiter(',')
      ->check(CLI::IsMember(kAlgorithms));

  // gap
  CLI::App* gap = app.add_subcommand("gap", "Closed-form adaptivity-gap references");
  common(gap);
  std::string gap_family;
  bool run_solvers = false;
  gap->add_option("--family", gap_family, "Gap family")
      ->required()
      ->check(CLI::IsMember({"na", "la"}));
  gap->add_option("--param", param, "delta for na, m for la")->required();
  gap->add_flag("--run", run_solvers, "Also evaluate policies on the generated instance");

  std::vector<const char*> argv = {"adseed"};
  for (const std::string& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  }

  const EvalOptions eval_options = [&] {
    EvalOptions o = ValueOptions(params);
    if (method == "exact") o.method = EvalMethod::kExactEnum;
    if (method == "mc") o.method = EvalMethod::kMonteCarlo;
    return o;
  }();

  auto do_gen = [&]() -> int {
    RandomStream stream(params.seed);
    Problem problem = [&] {
      if (gen_family == "gap-na") return GenGapNa(param);
      if (gen_family == "gap-la") return GenGapLa(static_cast<int>(std::lround(param)));
      if (gen_family == "hardness") {
        return GenHardness(hard_l, hard_k,
                           mode == "clique" ? HardnessMode::kClique : HardnessMode::kSparse,
                           density, stream);
      }
      RandomInstanceOptions o;
      o.nx = nx;
      o.deg = deg;
      o.p_low = p_low;
      o.p_high = p_high;
      o.family = function;
      o.budget = budget;
      return GenRandom(o, stream);
    }();
    Emit(Dump(ProblemToJson(problem)), out_path, out);
    return kExitOk;
  };

  auto do_solve = [&]() -> int {
    const Problem problem = LoadProblem(instance_path);
    const AlgorithmRun run = RunAlgorithm(problem, alg, params);
    if (run.policy) {
      if (!out_path.empty()) {
        WriteFileAtomic(out_path, Dump(PolicyToJson(problem.instance, *run.policy)));
      }
    } else if (!out_path.empty()) {
      WriteFileAtomic(out_path, Dump(run.solution));
    }
    if (!trace_path.empty()) WriteFileAtomic(trace_path, run.trace.ToCsv());
    std::string summary;
    if (format == "csv") {
      summary = "algorithm,epsilon,value,std_error,samples,exact,cost,fallback\n" + alg + "," +
                Csv(params.epsilon) + "," + Csv(run.value.mean) + "," +
                Csv(run.value.std_error) + "," + std::to_string(run.value.samples) + "," +
                (run.value.exact ? "1" : "0") + "," + Csv(run.cost) + "," +
                (run.fallback ? "1" : "0") + "\n";
    } else {
      nlohmann::json j = {{"algorithm", alg},
                          {"epsilon", params.epsilon},
                          {"value", EstimateToJson(run.value)},
                          {"cost", run.cost},
                          {"fallback", run.fallback},
                          {"solution", run.solution}};
      if (run.policy) j["policy"] = PolicyToJson(problem.instance, *run.policy);
      summary = Dump(j);
    }
    Emit(summary, summary_path, out);
    return kExitOk;
  };

  auto do_eval = [&]() -> int {
    const Problem problem = LoadProblem(instance_path);
    const PolicyFile policy = PolicyFromJson(ReadJsonFile(policy_path), problem.instance);
    const Estimate value = EvaluatePolicyFile(problem, policy, eval_options);
    Emit(Dump({{"value", EstimateToJson(value)}}), out_path, out);
    return kExitOk;
  };

  auto do_oracle = [&]() -> int {
    const Problem problem = LoadProblem(instance_path);
    limits.cap = params.cap_subsets;
    const OracleReport report = RunOracle(problem.instance, *problem.function,
                                          problem.instance.budget(), witness, limits);
    Emit(Dump(OracleReportToJson(problem.instance, report)), out_path, out);
    return kExitOk;
  };

  auto do_compare = [&]() -> int {
    std::ostringstream csv;
    csv << "instance-id,algorithm,epsilon,samples,value,std_error,oracle_value,ratio,"
           "wall-time-ms\n";
    for (const std::string& path : instances) {
      const Problem problem = LoadProblem(path);
      const std::string id = std::filesystem::path(path).stem().string();
      std::optional<double> adaptive_opt, sosp_opt;
      try {
        adaptive_opt = OptAdaptiveBruteforce(problem.instance, *problem.function,
                                             problem.instance.budget(), LimitsFor(params))
                           .value;
      } catch (const CapExceededError&) {
      }
      for (const std::string& a : algs) {
        const auto start = std::chrono::steady_clock::now();
        const AlgorithmRun run = RunAlgorithm(problem, a, params);
        const double ms = std::chrono::duration<double, std::milli>(
                              std::chrono::steady_clock::now() - start)
                              .count();
        std::optional<double> reference = adaptive_opt;
        if (a == "sosp-fw" || a == "sosp-bf") {
          if (!sosp_opt) {
            try {
              sosp_opt = SospBruteforce(MakeSospProblem(problem.instance, *problem.function),
                                        params.cap_subsets)
                             .value;
            } catch (const CapExceededError&) {
            }
          }
          reference = sosp_opt;
        }
        csv << id << "," << a << "," << Csv(params.epsilon) << "," << run.value.samples << ","
            << Csv(run.value.mean) << "," << Csv(run.value.std_error) << ",";
        if (reference) {
          csv << Csv(*reference) << ","
              << (*reference > 0 ? Csv(run.value.mean / *reference) : std::string("1"));
        } else {
          csv << ",";
        }
        csv << "," << Csv(ms) << "\n";
      }
    }
    Emit(csv.str(), out_path, out);
    return kExitOk;
  };

  auto do_gap = [&]() -> int {
    nlohmann::json j;
    if (gap_family == "na") {
      j = GapReferenceToJson(GapNaReference(param));
      if (run_solvers) {
        const Problem problem = GenGapNa(param);
        const GapNaAdaptiveExecutor executor(problem.instance);
        nlohmann::json run = {
            {"adaptive_policy",
             EstimateToJson(ValueAdaptiveExecutor(problem.instance, *problem.function, executor,
                                                  problem.instance.budget(),
                                                  ValueOptions(params)))}};
        try {
          const OracleReport report =
              RunOracle(problem.instance, *problem.function, problem.instance.budget(), false);
          run["oracle"] = OracleReportToJson(problem.instance, report);
        } catch (const CapExceededError& e) {
          run["oracle"] = std::string("skipped: ") + e.what();
        }
        j["run"] = run;
      }
    } else {
      const int m = static_cast<int>(std::lround(param));
      if (std::abs(param - m) > 1e-9) throw InputError("m must be an integer");
      j = GapReferenceToJson(GapLaReference(m));
      if (run_solvers) {
        const Problem problem = GenGapLa(m);
        const auto& f = static_cast<const ProductGapFunction&>(*problem.function);
        const GapLaAdaptiveExecutor executor(problem.instance, f);
        j["run"] = {{"adaptive_policy",
                     EstimateToJson(ValueAdaptiveExecutor(problem.instance, f, executor,
                                                          problem.instance.budget(),
                                                          ValueOptions(params)))}};
      }
    }
    Emit(Dump(j), out_path, out);
    return kExitOk;
  };

  try {
    return Dispatch(app, out, do_gen, do_solve, do_eval, do_oracle, do_compare, do_gap);
  } catch (const InputError& e) {
    err << "input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const CapExceededError& e) {
    err << "cap exceeded: " << e.what() << "\n";
    return kExitCap;
  } catch (const InfeasiblePolicyError& e) {
    err << "infeasible policy: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitInternal;
  }
}

}  // namespace adseed
