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

#ifndef OPE_CORE_HPP_
#define OPE_CORE_HPP_

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ope {

using Action = std::uint32_t;

// One record of logged bandit feedback. Only the reward of `action` is
// observed.
struct LoggedInteraction {
  std::string context_id;
  std::vector<double> features;
  Action action = 0;
  double reward = 0.0;
  std::optional<double> logging_propensity;
  std::optional<bool> explored;

  bool operator==(const LoggedInteraction&) const = default;
};

// Non-owning view of the context part of a record.
struct ContextRef {
  std::string_view id;
  std::span<const double> features;
};

inline ContextRef context_of(const LoggedInteraction& r) {
  return {r.context_id, r.features};
}

// Checks action < K, a finite reward and a propensity in [0, 1]. A zero
// propensity is accepted here so that the estimators can report it as a
// support violation.
void validate_record(const LoggedInteraction& record, std::size_t action_count);

// Linear score per action: score(a) = bias[a] + <weights row a, x>.
struct LinearScorer {
  std::size_t action_count = 0;
  std::size_t feature_dim = 0;
  std::vector<double> weights;  // action_count x feature_dim, row-major
  std::vector<double> bias;     // action_count

  static LinearScorer zeros(std::size_t action_count, std::size_t feature_dim);

  // Throws InputError when sizes are inconsistent.
  void validate() const;
  void scores(std::span<const double> features, std::span<double> out) const;

  bool operator==(const LinearScorer&) const = default;
};

// Index of the largest score; ties go to the lowest index.
Action argmax_lowest_index(std::span<const double> scores);

Action greedy_action(const LinearScorer& scorer,
                     std::span<const double> features);

enum class PolicyKind { kTabular, kEpsilonGreedy, kSoftmax, kDeterministic };

std::string_view to_string(PolicyKind kind);
PolicyKind policy_kind_from_string(std::string_view name);

// A stochastic policy pi(a | x). Deterministic policies are degenerate
// distributions that put all mass on the scorer's greedy action.
class PolicySpec {
 public:
  using Table = std::map<std::string, std::vector<double>, std::less<>>;

  static PolicySpec tabular(std::size_t action_count, Table table);
  static PolicySpec epsilon_greedy(LinearScorer scorer, double epsilon);
  static PolicySpec softmax(LinearScorer scorer, double temperature);
  static PolicySpec deterministic(LinearScorer scorer);
  // Always plays `action`, whatever the context.
  static PolicySpec fixed_action(std::size_t action_count,
                                 std::size_t feature_dim, Action action);
  static PolicySpec uniform(std::size_t action_count, std::size_t feature_dim);

  PolicyKind kind() const { return kind_; }
  std::size_t action_count() const { return action_count_; }
  // Zero for tabular policies, which key on the context id instead.
  std::size_t feature_dim() const { return scorer_.feature_dim; }
  const LinearScorer& scorer() const { return scorer_; }
  double epsilon() const { return epsilon_; }
  double temperature() const { return temperature_; }
  const Table& table() const { return table_; }

  // Writes pi(. | x) into `out` (size K).
  void distribution(ContextRef context, std::span<double> out) const;

  bool operator==(const PolicySpec&) const = default;

  // Empty policy with no actions; only useful as a placeholder.
  PolicySpec() = default;

 private:

  PolicyKind kind_ = PolicyKind::kDeterministic;
  std::size_t action_count_ = 0;
  LinearScorer scorer_;
  double epsilon_ = 0.0;
  double temperature_ = 1.0;
  Table table_;
};

double policy_action_probability(const PolicySpec& policy, ContextRef context,
                                 Action action);

enum class EstimatorKind { kDM, kIPS, kSNIPS, kDR, kBlend };

std::string_view to_string(EstimatorKind kind);
EstimatorKind estimator_kind_from_string(std::string_view name);

// Point estimate of a target policy's value plus diagnostics.
struct EstimateReport {
  EstimatorKind estimator = EstimatorKind::kIPS;
  double point_estimate = 0.0;
  // NaN when fewer than two records were used.
  double standard_error = 0.0;
  std::uint64_t n = 0;  // records used
  double effective_sample_size = 0.0;
  double clip_fraction = 0.0;
  std::uint64_t skipped_records = 0;

  bool operator==(const EstimateReport&) const = default;
};

}  // namespace ope

#endif  // OPE_CORE_HPP_
