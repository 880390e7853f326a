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

#include "ope/core.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>

#include "ope/errors.hpp"

namespace ope {

void validate_record(const LoggedInteraction& record,
                     std::size_t action_count) {
  if (record.action >= action_count) {
    throw InputError("action " + std::to_string(record.action) +
                     " out of range for " + std::to_string(action_count) +
                     " actions");
  }
  if (!std::isfinite(record.reward)) {
    throw InputError("reward is not finite");
  }
  if (record.logging_propensity) {
    const double p = *record.logging_propensity;
    if (!(p >= 0.0 && p <= 1.0)) {
      throw InputError("logging propensity must lie in [0, 1]");
    }
  }
}

LinearScorer LinearScorer::zeros(std::size_t action_count,
                                 std::size_t feature_dim) {
  LinearScorer s;
  s.action_count = action_count;
  s.feature_dim = feature_dim;
  s.weights.assign(action_count * feature_dim, 0.0);
  s.bias.assign(action_count, 0.0);
  return s;
}

void LinearScorer::validate() const {
  if (action_count == 0) throw InputError("scorer needs at least one action");
  if (weights.size() != action_count * feature_dim ||
      bias.size() != action_count) {
    throw InputError("scorer parameter sizes do not match K x d");
  }
  for (double w : weights) {
    if (!std::isfinite(w)) throw InputError("scorer weight is not finite");
  }
  for (double b : bias) {
    if (!std::isfinite(b)) throw InputError("scorer bias is not finite");
  }
}

void LinearScorer::scores(std::span<const double> features,
                          std::span<double> out) const {
  if (features.size() != feature_dim) {
    throw InputError("feature dimension " + std::to_string(features.size()) +
                     " does not match scorer dimension " +
                     std::to_string(feature_dim));
  }
  for (std::size_t a = 0; a < action_count; ++a) {
    const double* row = weights.data() + a * feature_dim;
    double s = bias[a];
    for (std::size_t j = 0; j < feature_dim; ++j) s += row[j] * features[j];
    out[a] = s;
  }
}

Action argmax_lowest_index(std::span<const double> scores) {
  if (scores.empty()) throw InputError("argmax of an empty score vector");
  std::size_t best = 0;
  for (std::size_t a = 1; a < scores.size(); ++a) {
    if (scores[a] > scores[best]) best = a;
  }
  return static_cast<Action>(best);
}

Action greedy_action(const LinearScorer& scorer,
                     std::span<const double> features) {
  std::vector<double> s(scorer.action_count);
  scorer.scores(features, s);
  return argmax_lowest_index(s);
}

std::string_view to_string(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::kTabular:
      return "tabular";
    case PolicyKind::kEpsilonGreedy:
      return "epsilon-greedy";
    case PolicyKind::kSoftmax:
      return "softmax";
    case PolicyKind::kDeterministic:
      return "deterministic";
  }
  return "unknown";
}

PolicyKind policy_kind_from_string(std::string_view name) {
  if (name == "tabular") return PolicyKind::kTabular;
  if (name == "epsilon-greedy") return PolicyKind::kEpsilonGreedy;
  if (name == "softmax") return PolicyKind::kSoftmax;
  if (name == "deterministic") return PolicyKind::kDeterministic;
  throw InputError("unknown policy kind '" + std::string(name) + "'");
}

PolicySpec PolicySpec::tabular(std::size_t action_count, Table table) {
  if (action_count == 0) throw InputError("policy needs at least one action");
  for (const auto& [id, probs] : table) {
    if (probs.size() != action_count) {
      throw InputError("tabular row '" + id + "' has wrong length");
    }
    double total = 0.0;
    for (double p : probs) {
      if (!(p >= 0.0 && p <= 1.0)) {
        throw InputError("tabular row '" + id + "' has invalid probability");
      }
      total += p;
    }
    if (std::fabs(total - 1.0) > 1e-9) {
      throw InputError("tabular row '" + id + "' does not sum to 1");
    }
  }
  PolicySpec p;
  p.kind_ = PolicyKind::kTabular;
  p.action_count_ = action_count;
  p.table_ = std::move(table);
  return p;
}

PolicySpec PolicySpec::epsilon_greedy(LinearScorer scorer, double epsilon) {
  scorer.validate();
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) {
    throw InputError("epsilon must lie in [0, 1]");
  }
  PolicySpec p;
  p.kind_ = PolicyKind::kEpsilonGreedy;
  p.action_count_ = scorer.action_count;
  p.scorer_ = std::move(scorer);
  p.epsilon_ = epsilon;
  return p;
}

PolicySpec PolicySpec::softmax(LinearScorer scorer, double temperature) {
  scorer.validate();
  if (!(temperature > 0.0) || !std::isfinite(temperature)) {
    throw InputError("softmax temperature must be positive");
  }
  PolicySpec p;
  p.kind_ = PolicyKind::kSoftmax;
  p.action_count_ = scorer.action_count;
  p.scorer_ = std::move(scorer);
  p.temperature_ = temperature;
  return p;
}

PolicySpec PolicySpec::deterministic(LinearScorer scorer) {
  scorer.validate();
  PolicySpec p;
  p.kind_ = PolicyKind::kDeterministic;
  p.action_count_ = scorer.action_count;
  p.scorer_ = std::move(scorer);
  return p;
}

PolicySpec PolicySpec::fixed_action(std::size_t action_count,
                                    std::size_t feature_dim, Action action) {
  if (action >= action_count) throw InputError("fixed action out of range");
  LinearScorer s = LinearScorer::zeros(action_count, feature_dim);
  s.bias[action] = 1.0;
  return deterministic(std::move(s));
}

PolicySpec PolicySpec::uniform(std::size_t action_count,
                               std::size_t feature_dim) {
  return softmax(LinearScorer::zeros(action_count, feature_dim), 1.0);
}

void PolicySpec::distribution(ContextRef context, std::span<double> out) const {
  if (out.size() != action_count_) {
    throw InputError("distribution buffer has wrong size");
  }
  switch (kind_) {
    case PolicyKind::kTabular: {
      auto it = table_.find(context.id);
      if (it == table_.end()) {
        throw InputError("unknown tabular context '" +
                         std::string(context.id) + "'");
      }
      std::copy(it->second.begin(), it->second.end(), out.begin());
      return;
    }
    case PolicyKind::kEpsilonGreedy:
    case PolicyKind::kDeterministic: {
      scorer_.scores(context.features, out);
      const Action best = argmax_lowest_index(out);
      const double eps =
          kind_ == PolicyKind::kEpsilonGreedy ? epsilon_ : 0.0;
      const double explore = eps / static_cast<double>(action_count_);
      std::fill(out.begin(), out.end(), explore);
      out[best] = 1.0 - eps + explore;
      return;
    }
    case PolicyKind::kSoftmax: {
      scorer_.scores(context.features, out);
      const double top = *std::max_element(out.begin(), out.end());
      double total = 0.0;
      for (double& v : out) {
        v = std::exp((v - top) / temperature_);
        total += v;
      }
      for (double& v : out) v /= total;
      return;
    }
  }
}

double policy_action_probability(const PolicySpec& policy, ContextRef context,
                                 Action action) {
  if (action >= policy.action_count()) {
    throw InputError("action " + std::to_string(action) + " out of range");
  }
  std::vector<double> probs(policy.action_count());
  policy.distribution(context, probs);
  return probs[action];
}

std::string_view to_string(EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::kDM:
      return "DM";
    case EstimatorKind::kIPS:
      return "IPS";
    case EstimatorKind::kSNIPS:
      return "SNIPS";
    case EstimatorKind::kDR:
      return "DR";
    case EstimatorKind::kBlend:
      return "BLEND";
  }
  return "unknown";
}

EstimatorKind estimator_kind_from_string(std::string_view name) {
  std::string upper(name);
  std::transform(upper.begin(), upper.end(), upper.begin(),
                 [](unsigned char c) { return std::toupper(c); });
  if (upper == "DM" || upper == "RM") return EstimatorKind::kDM;
  if (upper == "IPS") return EstimatorKind::kIPS;
  if (upper == "SNIPS") return EstimatorKind::kSNIPS;
  if (upper == "DR") return EstimatorKind::kDR;
  if (upper == "BLEND") return EstimatorKind::kBlend;
  throw InputError("unknown estimator '" + std::string(name) + "'");
}

}  // namespace ope
