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

#include "ope/propensity.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ope/errors.hpp"

namespace ope {

std::string_view to_string(PropensityMode mode) {
  switch (mode) {
    case PropensityMode::kLogged:
      return "logged";
    case PropensityMode::kEpsilonGreedyRecovery:
      return "epsilon-greedy";
    case PropensityMode::kExplorationOnly:
      return "exploration-only";
  }
  return "unknown";
}

PropensityMode propensity_mode_from_string(std::string_view name) {
  if (name == "logged") return PropensityMode::kLogged;
  if (name == "epsilon-greedy" || name == "epsilon-greedy-recovery") {
    return PropensityMode::kEpsilonGreedyRecovery;
  }
  if (name == "exploration-only") return PropensityMode::kExplorationOnly;
  throw ConfigError("unknown propensity mode '" + std::string(name) + "'");
}

std::string_view to_string(SupportViolationPolicy policy) {
  return policy == SupportViolationPolicy::kError ? "error" : "skip";
}

SupportViolationPolicy support_violation_from_string(std::string_view name) {
  if (name == "error") return SupportViolationPolicy::kError;
  if (name == "skip") return SupportViolationPolicy::kSkip;
  throw ConfigError("unknown support-violation policy '" + std::string(name) +
                    "'");
}

void PropensityConfig::validate() const {
  if (mode == PropensityMode::kLogged) {
    if (epsilon) throw ConfigError("epsilon is only used by recovery modes");
  } else {
    if (!epsilon) {
      throw ConfigError("propensity mode '" + std::string(to_string(mode)) +
                        "' requires epsilon");
    }
    if (!(*epsilon > 0.0 && *epsilon <= 1.0)) {
      throw ConfigError("epsilon must lie in (0, 1]");
    }
    if (action_count == 0) {
      throw ConfigError("recovery modes require the action count");
    }
  }
  if (clip_max && !(*clip_max > 1.0)) {
    throw ConfigError("clip_max must be greater than 1");
  }
}

std::optional<double> recover_logging_propensity(
    const LoggedInteraction& record, Action base_greedy_action,
    const PropensityConfig& config) {
  if (config.mode == PropensityMode::kLogged) {
    throw ConfigError("propensity recovery requested in logged mode");
  }
  if (!config.epsilon) throw ConfigError("propensity recovery needs epsilon");
  const double k = static_cast<double>(config.action_count);
  const double eps = *config.epsilon;
  if (record.action >= config.action_count) {
    throw InputError("action out of range");
  }
  if (config.mode == PropensityMode::kExplorationOnly) {
    if (!record.explored.value_or(false)) return std::nullopt;
    return 1.0 / k;
  }
  if (record.action == base_greedy_action) return 1.0 - eps + eps / k;
  return eps / k;
}

std::optional<ImportanceWeight> importance_weight(
    double target_prob, double logging_prob, const PropensityConfig& config,
    std::uint64_t record_index) {
  if (!(target_prob >= 0.0 && target_prob <= 1.0)) {
    throw InputError("target probability outside [0, 1]");
  }
  if (!(logging_prob >= 0.0 && logging_prob <= 1.0)) {
    throw InputError("logging probability outside [0, 1]");
  }
  if (target_prob == 0.0) return ImportanceWeight{0.0, false};
  if (logging_prob == 0.0) {
    if (config.support_violation == SupportViolationPolicy::kSkip) {
      return std::nullopt;
    }
    throw SupportViolation("record " + std::to_string(record_index) +
                               ": target policy takes an action the logging "
                               "policy never takes",
                           record_index);
  }
  ImportanceWeight w{target_prob / logging_prob, false};
  if (config.clip_max && w.value > *config.clip_max) {
    w.value = *config.clip_max;
    w.clipped = true;
  }
  return w;
}

}  // namespace ope
