// Copyright 2026 The OPE Toolkit Authors.
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

#ifndef OPE_CONFIG_HPP_
#define OPE_CONFIG_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>

#include "json.hpp"
#include "ope/benchmark.hpp"
#include "ope/core.hpp"
#include "ope/log_io.hpp"
#include "ope/propensity.hpp"
#include "ope/simulator.hpp"

namespace ope {

// JSON documents for every run-configuration object. All conversions throw
// ConfigError with the offending key on malformed input.
//
// Policy: {"kind": "softmax", "action_count": K, "temperature": 0.5,
//          "scorer": {"weights": [[..K rows of d..]], "bias": [..K..]}}
// "epsilon-greedy" takes "epsilon"; "deterministic" only the scorer;
// "tabular" takes "table": {"<context id>": [p_0, .., p_{K-1}], ...}.
// Inside a scenario or simulation config the scorer may be the string
// "environment", meaning the environment's true scorer.
using Json = nlohmann::ordered_json;

Json load_json_file(const std::filesystem::path& path);

Json to_json(const LinearScorer& scorer);
LinearScorer scorer_from_json(const Json& j);

Json to_json(const PolicySpec& policy);
PolicySpec policy_from_json(const Json& j,
                            const BanditEnvironment* env = nullptr);

Json to_json(const BanditEnvironment& env);
BanditEnvironment environment_from_json(const Json& j);

Json to_json(const PropensityConfig& config);
PropensityConfig propensity_from_json(const Json& j);

Json to_json(const RewardModelConfig& config);
RewardModelConfig reward_model_config_from_json(const Json& j);

Json to_json(const TargetFamilySpec& spec);
TargetFamilySpec target_family_from_json(const Json& j);

Json to_json(const EstimateReport& report);
EstimateReport report_from_json(const Json& j);

Json to_json(const LoggedInteraction& record);
LoggedInteraction record_from_json(const Json& j);

// Scenario document:
// {"seed": 7, "environment": {..}, "logging_policy": {..},
//  "target_policies": [..], "target_family": {..},
//  "sample_sizes": [1000, 10000], "replications": 1,
//  "estimators": ["IPS", "SNIPS", "DM", "DR", "BLEND"],
//  "propensity": {..}, "reward_model": {..},
//  "truth": {"mode": "exact"} | {"mode": "monte-carlo", "samples": n, "seed": s},
//  "variance_sweep": {"replications": 50, "target": 0}}
// The family, when present, is appended after the explicit targets.
BenchmarkScenario scenario_from_json(const Json& j);
Json to_json(const BenchmarkScenario& scenario);

// Simulation document:
// {"seed": 1, "n": 1000, "environment": {..}, "logging_policy": {..},
//  "format": "jsonl", "reward_kind": "binary"}
struct SimulationConfig {
  BanditEnvironment environment;
  PolicySpec logging_policy;
  std::uint64_t n = 0;
  std::uint64_t seed = 0;
  std::optional<LogFormat> format;
  std::string reward_kind = "binary";
};

SimulationConfig simulation_from_json(const Json& j);

// Header describing logs produced from `config`.
LogHeader simulation_header(const SimulationConfig& config);

}  // namespace ope

#endif  // OPE_CONFIG_HPP_
