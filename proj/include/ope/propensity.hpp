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

#ifndef OPE_PROPENSITY_HPP_
#define OPE_PROPENSITY_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>

#include "ope/core.hpp"

namespace ope {

enum class PropensityMode {
  kLogged,                  // use the recorded propensity
  kEpsilonGreedyRecovery,   // imply it from the epsilon-greedy mechanism
  kExplorationOnly,         // keep explored records only, 1/K each
};

enum class SupportViolationPolicy { kError, kSkip };

std::string_view to_string(PropensityMode mode);
PropensityMode propensity_mode_from_string(std::string_view name);
std::string_view to_string(SupportViolationPolicy policy);
SupportViolationPolicy support_violation_from_string(std::string_view name);

struct PropensityConfig {
  PropensityMode mode = PropensityMode::kLogged;
  std::optional<double> epsilon;
  std::size_t action_count = 0;
  // Importance weights are capped at clip_max when set. Unclipped weights
  // are the unbiased reference; for strongly divergent policies a cap in
  // [10, 100] is a reasonable starting point.
  std::optional<double> clip_max;
  SupportViolationPolicy support_violation = SupportViolationPolicy::kError;

  // epsilon present iff mode != logged, epsilon in (0, 1], clip_max > 1.
  void validate() const;

  bool operator==(const PropensityConfig&) const = default;
};

// Logging probability implied by an epsilon-greedy policy whose
// deterministic base model picked `base_greedy_action` for this context.
// Returns nullopt when exploration-only mode rejects a non-explored record.
std::optional<double> recover_logging_propensity(
    const LoggedInteraction& record, Action base_greedy_action,
    const PropensityConfig& config);

struct ImportanceWeight {
  double value = 0.0;
  bool clipped = false;
};

// target_prob / logging_prob, capped at clip_max. A zero target probability
// short-circuits to weight 0 even when the logging probability is also 0.
// On a support violation (logging 0, target > 0) this throws
// SupportViolation in error mode and returns nullopt in skip mode.
std::optional<ImportanceWeight> importance_weight(
    double target_prob, double logging_prob, const PropensityConfig& config,
    std::uint64_t record_index = 0);

}  // namespace ope

#endif  // OPE_PROPENSITY_HPP_
