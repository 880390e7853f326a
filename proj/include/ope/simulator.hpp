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

#ifndef OPE_SIMULATOR_HPP_
#define OPE_SIMULATOR_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ope/core.hpp"
#include "ope/random.hpp"
#include "ope/reward_model.hpp"

namespace ope {

enum class ContextKind { kDiscrete, kGaussian };
enum class RewardNoise { kBernoulli, kGaussian };

std::string_view to_string(ContextKind kind);
std::string_view to_string(RewardNoise noise);

// Synthetic contextual-bandit world with a known mean reward function.
//
// Discrete contexts: C contexts drawn from `context_probabilities`, exposed
// as one-hot feature vectors of length C with ids "c0".."c{C-1}"; the mean
// reward is the C x K table `reward_table`.
// Gaussian contexts: x ~ N(context_mean, diag(context_stddev^2)); the mean
// reward is the logistic of `reward_scorer`.
// Rewards are Bernoulli(mean) or mean + N(0, noise_stddev^2).
struct BanditEnvironment {
  std::size_t action_count = 0;
  ContextKind context_kind = ContextKind::kDiscrete;
  std::vector<double> context_probabilities;
  std::vector<double> context_mean;
  std::vector<double> context_stddev;
  std::vector<double> reward_table;  // C x K, row-major
  LinearScorer reward_scorer;
  RewardNoise noise = RewardNoise::kBernoulli;
  double noise_stddev = 0.0;
  std::uint64_t seed = 0;

  static BanditEnvironment discrete(std::size_t action_count,
                                    std::vector<double> context_probabilities,
                                    std::vector<double> reward_table,
                                    RewardNoise noise, double noise_stddev,
                                    std::uint64_t seed);
  static BanditEnvironment gaussian(std::vector<double> context_mean,
                                    std::vector<double> context_stddev,
                                    LinearScorer reward_scorer,
                                    RewardNoise noise, double noise_stddev,
                                    std::uint64_t seed);

  void validate() const;

  std::size_t feature_dim() const;
  // Number of discrete contexts; zero for gaussian environments.
  std::size_t context_count() const;

  // Feature vector and id of discrete context c.
  LoggedInteraction discrete_context(std::size_t c) const;

  double mean_reward(ContextRef context, Action action) const;

  // Scorer whose greedy action is the best action: the reward table as a
  // linear map over one-hot contexts, or the logistic's linear part.
  LinearScorer true_scorer() const;

  // Overwrites context_id and features of `out`.
  void sample_context(Rng& rng, LoggedInteraction& out) const;
  double sample_reward(Rng& rng, double mean) const;

  bool operator==(const BanditEnvironment&) const = default;
};

// The environment's true mean reward as a reward model.
class OracleRewardModel final : public RewardPredictor {
 public:
  explicit OracleRewardModel(BanditEnvironment env) : env_(std::move(env)) {}
  std::size_t action_count() const override { return env_.action_count; }
  double predict(ContextRef context, Action action) const override {
    return env_.mean_reward(context, action);
  }

 private:
  BanditEnvironment env_;
};

// Streams i.i.d. logged interactions. Every record carries the true logging
// propensity; epsilon-greedy loggers also record whether the exploration
// branch fired. Equal (environment, policy, seed) give equal streams.
class LogGenerator {
 public:
  LogGenerator(const BanditEnvironment& env, const PolicySpec& policy,
               std::uint64_t seed);

  void next(LoggedInteraction& out);

 private:
  const BanditEnvironment* env_;
  const PolicySpec* policy_;
  Rng rng_;
  std::vector<double> probs_;
};

std::vector<LoggedInteraction> generate_log(const BanditEnvironment& env,
                                            const PolicySpec& policy,
                                            std::uint64_t n,
                                            std::uint64_t seed);

struct PolicyValue {
  double value = 0.0;
  double standard_error = 0.0;  // zero in exact mode
};

struct TruthMode {
  enum class Kind { kExact, kMonteCarlo };
  Kind kind = Kind::kExact;
  std::uint64_t samples = 0;  // Monte Carlo only
  std::uint64_t seed = 0;

  static TruthMode exact() { return {}; }
  static TruthMode monte_carlo(std::uint64_t samples, std::uint64_t seed) {
    return {Kind::kMonteCarlo, samples, seed};
  }
};

// Exact: sum_x P(x) sum_a pi(a | x) r(x, a) by enumeration (discrete only).
// Monte Carlo: on-policy sample mean of realised rewards with its standard
// error.
PolicyValue true_policy_value(const BanditEnvironment& env,
                              const PolicySpec& policy, const TruthMode& mode);

}  // namespace ope

#endif  // OPE_SIMULATOR_HPP_
