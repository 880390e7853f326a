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

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "ope/config.hpp"
#include "ope/errors.hpp"
#include "ope/simulator.hpp"
#include "test_support.hpp"

namespace ope {
namespace {

BanditEnvironment two_by_two(std::vector<double> probs = {0.5, 0.5}) {
  return BanditEnvironment::discrete(2, std::move(probs), {0.2, 0.6, 0.9, 0.1},
                                     RewardNoise::kBernoulli, 0.0, 7);
}

TEST(GenerateLog, EmptyLog) {
  const auto env = two_by_two();
  EXPECT_TRUE(generate_log(env, PolicySpec::uniform(2, 2), 0, 1).empty());
}

TEST(GenerateLog, DeterministicLoggingPolicy) {
  const auto env = two_by_two();
  const auto policy = PolicySpec::epsilon_greedy(env.true_scorer(), 0.0);
  for (const auto& r : generate_log(env, policy, 500, 3)) {
    EXPECT_EQ(r.action, greedy_action(env.true_scorer(), r.features));
    EXPECT_EQ(*r.logging_propensity, 1.0);
    EXPECT_FALSE(*r.explored);
  }
}

TEST(GenerateLog, ContextFrequencies) {
  const auto env = two_by_two();
  const auto log = generate_log(env, PolicySpec::uniform(2, 2), 100000, 11);
  double first = 0.0;
  for (const auto& r : log) first += r.context_id == "c0" ? 1.0 : 0.0;
  EXPECT_NEAR(first / 1e5, 0.5, 0.01);
}

TEST(GenerateLog, ReproducibleFromSeed) {
  const auto env = two_by_two();
  const auto policy = PolicySpec::epsilon_greedy(env.true_scorer(), 0.3);
  const auto a = generate_log(env, policy, 2000, 5);
  EXPECT_EQ(a, generate_log(env, policy, 2000, 5));
  EXPECT_NE(a, generate_log(env, policy, 2000, 6));
}

TEST(GenerateLog, RecordsTruePropensityAndExploredFlag) {
  const auto env = two_by_two();
  const auto policy = PolicySpec::epsilon_greedy(env.true_scorer(), 0.4);
  for (const auto& r : generate_log(env, policy, 2000, 9)) {
    EXPECT_EQ(*r.logging_propensity,
              policy_action_probability(policy, context_of(r), r.action));
    if (r.action != greedy_action(env.true_scorer(), r.features)) {
      EXPECT_TRUE(*r.explored);
    }
    EXPECT_TRUE(r.reward == 0.0 || r.reward == 1.0);
  }
}

TEST(GenerateLog, GaussianContexts) {
  LinearScorer s = LinearScorer::zeros(3, 2);
  s.weights = {1.0, 0.0, 0.0, 1.0, -1.0, -1.0};
  const auto env = BanditEnvironment::gaussian({0.0, 1.0}, {1.0, 0.5}, s,
                                               RewardNoise::kBernoulli, 0.0, 4);
  const auto log = generate_log(env, PolicySpec::uniform(3, 2), 20000, 1);
  double m0 = 0.0, m1 = 0.0;
  for (const auto& r : log) {
    ASSERT_EQ(r.features.size(), 2u);
    m0 += r.features[0];
    m1 += r.features[1];
  }
  EXPECT_NEAR(m0 / 20000, 0.0, 0.03);
  EXPECT_NEAR(m1 / 20000, 1.0, 0.02);
  const std::vector<double> x{0.5, 0.25};
  EXPECT_NEAR(env.mean_reward({"", x}, 0), 1.0 / (1.0 + std::exp(-0.5)),
              1e-15);
}

TEST(EnvironmentValidation, RejectsBadEnvironments) {
  EXPECT_THROW(two_by_two({0.5, 0.6}), ConfigError);
  EXPECT_THROW(BanditEnvironment::discrete(2, {1.0}, {0.5, 1.5},
                                           RewardNoise::kBernoulli, 0.0, 1),
               ConfigError);
  EXPECT_THROW(BanditEnvironment::discrete(2, {1.0}, {0.5},
                                           RewardNoise::kBernoulli, 0.0, 1),
               ConfigError);
  EXPECT_NO_THROW(BanditEnvironment::discrete(2, {1.0}, {-3.0, 5.0},
                                              RewardNoise::kGaussian, 1.0, 1));
}

TEST(TruePolicyValue, Examples) {
  const auto single = BanditEnvironment::discrete(
      2, {1.0}, {0.7, 0.1}, RewardNoise::kBernoulli, 0.0, 1);
  EXPECT_DOUBLE_EQ(true_policy_value(single, PolicySpec::fixed_action(2, 1, 0),
                                     TruthMode::exact())
                       .value,
                   0.7);

  const auto binary = BanditEnvironment::discrete(
      2, {1.0}, {0.0, 1.0}, RewardNoise::kBernoulli, 0.0, 1);
  EXPECT_DOUBLE_EQ(
      true_policy_value(binary, PolicySpec::uniform(2, 1), TruthMode::exact())
          .value,
      0.5);

  const auto env = BanditEnvironment::discrete(
      2, {0.25, 0.75}, {0.4, 0.0, 0.0, 0.8}, RewardNoise::kBernoulli, 0.0, 1);
  LinearScorer s = LinearScorer::zeros(2, 2);
  s.weights = {1.0, 0.0, 0.0, 1.0};  // context c picks action c
  EXPECT_NEAR(true_policy_value(env, PolicySpec::deterministic(s),
                                TruthMode::exact())
                  .value,
              0.25 * 0.4 + 0.75 * 0.8, 1e-15);
}

TEST(TruePolicyValue, ExactModeNeedsDiscreteContexts) {
  const auto env = BanditEnvironment::gaussian(
      {0.0}, {1.0}, LinearScorer::zeros(2, 1), RewardNoise::kBernoulli, 0.0, 1);
  EXPECT_THROW(
      true_policy_value(env, PolicySpec::uniform(2, 1), TruthMode::exact()),
      UnsupportedModeError);
  const auto mc = true_policy_value(env, PolicySpec::uniform(2, 1),
                                    TruthMode::monte_carlo(20000, 3));
  EXPECT_NEAR(mc.value, 0.5, 4.0 * mc.standard_error);
  EXPECT_GT(mc.standard_error, 0.0);
}

TEST(TruePolicyValue, MonteCarloAgreesWithExact) {
  Rng rng(61, {1});
  for (int trial = 0; trial < 5; ++trial) {
    const std::size_t c = 2 + rng.below(6), k = 2 + rng.below(3);
    std::vector<double> probs(c, 1.0 / static_cast<double>(c)), table(c * k);
    for (double& v : table) v = rng.uniform();
    const auto env = BanditEnvironment::discrete(
        k, probs, table, RewardNoise::kBernoulli, 0.0, trial);
    const auto policy =
        PolicySpec::softmax(testing::random_scorer(rng, k, c), 0.5);
    const double exact =
        true_policy_value(env, policy, TruthMode::exact()).value;
    const auto mc = true_policy_value(env, policy,
                                      TruthMode::monte_carlo(50000, trial));
    EXPECT_LT(std::abs(mc.value - exact), 3.0 * mc.standard_error)
        << "trial " << trial;
  }
}

TEST(Serialization, EnvironmentRoundTrips) {
  const auto discrete = two_by_two({0.3, 0.7});
  EXPECT_EQ(environment_from_json(Json::parse(to_json(discrete).dump())),
            discrete);
  LinearScorer s = LinearScorer::zeros(2, 2);
  s.weights = {0.5, -1.0, 0.25, 2.0};
  s.bias = {0.1, -0.1};
  const auto gaussian = BanditEnvironment::gaussian(
      {0.0, 1.0}, {1.0, 2.0}, s, RewardNoise::kGaussian, 0.3, 99);
  EXPECT_EQ(environment_from_json(Json::parse(to_json(gaussian).dump())),
            gaussian);
}

}  // namespace
}  // namespace ope
