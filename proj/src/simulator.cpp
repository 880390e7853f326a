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

#include "ope/simulator.hpp"

#include <cmath>

#include "ope/errors.hpp"

namespace ope {

std::string_view to_string(ContextKind kind) {
  return kind == ContextKind::kDiscrete ? "discrete" : "gaussian";
}

std::string_view to_string(RewardNoise noise) {
  return noise == RewardNoise::kBernoulli ? "bernoulli" : "gaussian";
}

BanditEnvironment BanditEnvironment::discrete(
    std::size_t action_count, std::vector<double> context_probabilities,
    std::vector<double> reward_table, RewardNoise noise, double noise_stddev,
    std::uint64_t seed) {
  BanditEnvironment env;
  env.action_count = action_count;
  env.context_kind = ContextKind::kDiscrete;
  env.context_probabilities = std::move(context_probabilities);
  env.reward_table = std::move(reward_table);
  env.noise = noise;
  env.noise_stddev = noise_stddev;
  env.seed = seed;
  env.validate();
  return env;
}

BanditEnvironment BanditEnvironment::gaussian(
    std::vector<double> context_mean, std::vector<double> context_stddev,
    LinearScorer reward_scorer, RewardNoise noise, double noise_stddev,
    std::uint64_t seed) {
  BanditEnvironment env;
  env.action_count = reward_scorer.action_count;
  env.context_kind = ContextKind::kGaussian;
  env.context_mean = std::move(context_mean);
  env.context_stddev = std::move(context_stddev);
  env.reward_scorer = std::move(reward_scorer);
  env.noise = noise;
  env.noise_stddev = noise_stddev;
  env.seed = seed;
  env.validate();
  return env;
}

void BanditEnvironment::validate() const {
  if (action_count == 0) throw ConfigError("environment needs actions");
  if (noise == RewardNoise::kGaussian &&
      !(noise_stddev >= 0.0 && std::isfinite(noise_stddev))) {
    throw ConfigError("reward noise stddev must be >= 0");
  }
  if (context_kind == ContextKind::kDiscrete) {
    if (context_probabilities.empty()) {
      throw ConfigError("discrete environment needs contexts");
    }
    double total = 0.0;
    for (double p : context_probabilities) {
      if (!(p >= 0.0)) throw ConfigError("negative context probability");
      total += p;
    }
    if (std::fabs(total - 1.0) > 1e-9) {
      throw ConfigError("context probabilities must sum to 1");
    }
    if (reward_table.size() != context_probabilities.size() * action_count) {
      throw ConfigError("reward table must be contexts x actions");
    }
    for (double r : reward_table) {
      if (!std::isfinite(r)) throw ConfigError("reward table entry not finite");
      if (noise == RewardNoise::kBernoulli && !(r >= 0.0 && r <= 1.0)) {
        throw ConfigError("Bernoulli mean rewards must lie in [0, 1]");
      }
    }
    return;
  }
  if (context_mean.empty() || context_mean.size() != context_stddev.size()) {
    throw ConfigError("gaussian context mean and stddev must have length d");
  }
  for (double s : context_stddev) {
    if (!(s >= 0.0)) throw ConfigError("context stddev must be >= 0");
  }
  reward_scorer.validate();
  if (reward_scorer.feature_dim != context_mean.size() ||
      reward_scorer.action_count != action_count) {
    throw ConfigError("reward scorer does not match the context dimension");
  }
}

std::size_t BanditEnvironment::feature_dim() const {
  return context_kind == ContextKind::kDiscrete ? context_probabilities.size()
                                                : context_mean.size();
}

std::size_t BanditEnvironment::context_count() const {
  return context_kind == ContextKind::kDiscrete ? context_probabilities.size()
                                                : 0;
}

LoggedInteraction BanditEnvironment::discrete_context(std::size_t c) const {
  if (context_kind != ContextKind::kDiscrete || c >= context_count()) {
    throw InputError("no discrete context " + std::to_string(c));
  }
  LoggedInteraction r;
  r.context_id = "c" + std::to_string(c);
  r.features.assign(context_count(), 0.0);
  r.features[c] = 1.0;
  return r;
}

double BanditEnvironment::mean_reward(ContextRef context, Action action) const {
  if (action >= action_count) throw InputError("action out of range");
  if (context.features.size() != feature_dim()) {
    throw InputError("context has the wrong feature dimension");
  }
  if (context_kind == ContextKind::kDiscrete) {
    const Action c = argmax_lowest_index(context.features);
    return reward_table[c * action_count + action];
  }
  const double* row = reward_scorer.weights.data() + action * feature_dim();
  double s = reward_scorer.bias[action];
  for (std::size_t j = 0; j < feature_dim(); ++j) {
    s += row[j] * context.features[j];
  }
  return 1.0 / (1.0 + std::exp(-s));
}

LinearScorer BanditEnvironment::true_scorer() const {
  if (context_kind == ContextKind::kGaussian) return reward_scorer;
  const std::size_t c_count = context_count();
  LinearScorer s = LinearScorer::zeros(action_count, c_count);
  for (std::size_t a = 0; a < action_count; ++a) {
    for (std::size_t c = 0; c < c_count; ++c) {
      s.weights[a * c_count + c] = reward_table[c * action_count + a];
    }
  }
  return s;
}

void BanditEnvironment::sample_context(Rng& rng, LoggedInteraction& out) const {
  if (context_kind == ContextKind::kDiscrete) {
    const std::size_t c = rng.categorical(context_probabilities.data(),
                                          context_probabilities.size());
    out.context_id = "c" + std::to_string(c);
    out.features.assign(context_count(), 0.0);
    out.features[c] = 1.0;
    return;
  }
  out.context_id.clear();
  out.features.resize(context_mean.size());
  for (std::size_t j = 0; j < context_mean.size(); ++j) {
    out.features[j] = context_mean[j] + context_stddev[j] * rng.normal();
  }
}

double BanditEnvironment::sample_reward(Rng& rng, double mean) const {
  if (noise == RewardNoise::kBernoulli) return rng.bernoulli(mean) ? 1.0 : 0.0;
  if (noise_stddev == 0.0) return mean;
  return mean + noise_stddev * rng.normal();
}

LogGenerator::LogGenerator(const BanditEnvironment& env,
                           const PolicySpec& policy, std::uint64_t seed)
    : env_(&env), policy_(&policy), rng_(env.seed, {seed}) {
  env.validate();
  if (policy.action_count() != env.action_count) {
    throw InputError("policy and environment disagree on the action count");
  }
  if (policy.kind() != PolicyKind::kTabular &&
      policy.feature_dim() != env.feature_dim()) {
    throw InputError("policy and environment disagree on the feature dimension");
  }
  probs_.resize(env.action_count);
}

void LogGenerator::next(LoggedInteraction& out) {
  env_->sample_context(rng_, out);
  policy_->distribution(context_of(out), probs_);
  const std::size_t k = probs_.size();
  Action action;
  if (policy_->kind() == PolicyKind::kEpsilonGreedy) {
    const bool explore = rng_.uniform() < policy_->epsilon();
    action = explore ? static_cast<Action>(rng_.below(k))
                     : argmax_lowest_index(probs_);
    out.explored = explore;
  } else {
    action = static_cast<Action>(rng_.categorical(probs_.data(), k));
    out.explored.reset();
  }
  out.action = action;
  out.logging_propensity = probs_[action];
  out.reward =
      env_->sample_reward(rng_, env_->mean_reward(context_of(out), action));
}

std::vector<LoggedInteraction> generate_log(const BanditEnvironment& env,
                                            const PolicySpec& policy,
                                            std::uint64_t n,
                                            std::uint64_t seed) {
  LogGenerator gen(env, policy, seed);
  std::vector<LoggedInteraction> log(n);
  for (auto& r : log) gen.next(r);
  return log;
}

PolicyValue true_policy_value(const BanditEnvironment& env,
                              const PolicySpec& policy, const TruthMode& mode) {
  env.validate();
  if (policy.action_count() != env.action_count) {
    throw InputError("policy and environment disagree on the action count");
  }
  if (mode.kind == TruthMode::Kind::kExact) {
    if (env.context_kind != ContextKind::kDiscrete) {
      throw UnsupportedModeError(
          "exact policy value needs a discrete environment; use monte-carlo");
    }
    std::vector<double> probs(env.action_count);
    double value = 0.0;
    for (std::size_t c = 0; c < env.context_count(); ++c) {
      const LoggedInteraction ctx = env.discrete_context(c);
      policy.distribution(context_of(ctx), probs);
      double inner = 0.0;
      for (std::size_t a = 0; a < env.action_count; ++a) {
        inner += probs[a] *
                 env.reward_table[c * env.action_count + a];
      }
      value += env.context_probabilities[c] * inner;
    }
    return {value, 0.0};
  }
  if (mode.samples < 2) {
    throw ConfigError("monte-carlo policy value needs at least 2 samples");
  }
  LogGenerator gen(env, policy, mode.seed);
  LoggedInteraction r;
  double sum = 0.0;
  double sum_sq = 0.0;
  for (std::uint64_t i = 0; i < mode.samples; ++i) {
    gen.next(r);
    sum += r.reward;
    sum_sq += r.reward * r.reward;
  }
  const double n = static_cast<double>(mode.samples);
  const double mean = sum / n;
  double var = (sum_sq - sum * sum / n) / (n - 1.0);
  if (var < 0.0) var = 0.0;
  return {mean, std::sqrt(var / n)};
}

}  // namespace ope
