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
#include <sstream>
#include <vector>

#include "ope/benchmark.hpp"
#include "ope/config.hpp"
#include "ope/errors.hpp"
#include "ope/simulator.hpp"
#include "test_support.hpp"

namespace ope {
namespace {

BenchmarkScenario small_scenario() {
  BenchmarkScenario s;
  s.environment = BanditEnvironment::discrete(
      3, {0.4, 0.3, 0.2, 0.1},
      {0.2, 0.5, 0.8, 0.6, 0.3, 0.1, 0.4, 0.4, 0.9, 0.7, 0.2, 0.5},
      RewardNoise::kBernoulli, 0.0, 17);
  s.logging_policy = PolicySpec::epsilon_greedy(s.environment.true_scorer(), 0.2);
  s.target_policies = {PolicySpec::softmax(s.environment.true_scorer(), 0.2),
                       PolicySpec::uniform(3, 4)};
  s.sample_sizes = {200, 1000};
  s.replications = 3;
  s.estimators = {EstimatorKind::kIPS, EstimatorKind::kSNIPS,
                  EstimatorKind::kDM, EstimatorKind::kDR,
                  EstimatorKind::kBlend};
  s.reward_model.spec.kind = RewardModelKind::kTabularMean;
  s.seed = 2024;
  return s;
}

TEST(PearsonCorrelation, Examples) {
  const std::vector<double> xs{0.3, -1.2, 4.0, 2.5};
  EXPECT_NEAR(pearson_correlation(xs, xs), 1.0, 1e-15);
  std::vector<double> neg;
  for (double x : xs) neg.push_back(-x);
  EXPECT_NEAR(pearson_correlation(xs, neg), -1.0, 1e-15);
  EXPECT_NEAR(pearson_correlation(std::vector<double>{1, 2, 3},
                                  std::vector<double>{2, 4, 6}),
              1.0, 1e-15);
}

TEST(PearsonCorrelation, Errors) {
  EXPECT_THROW(pearson_correlation(std::vector<double>{1, 1, 1},
                                   std::vector<double>{1, 2, 3}),
               EstimationError);
  EXPECT_THROW(pearson_correlation(std::vector<double>{1},
                                   std::vector<double>{1}),
               InputError);
  EXPECT_THROW(pearson_correlation(std::vector<double>{1, 2},
                                   std::vector<double>{1, 2, 3}),
               InputError);
}

TEST(PearsonCorrelation, MatchesTwoPassFormula) {
  Rng rng(71, {1});
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> xs(3 + rng.below(50)), ys(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
      xs[i] = rng.normal();
      ys[i] = 0.5 * xs[i] + rng.normal();
    }
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      mx += xs[i];
      my += ys[i];
    }
    mx /= xs.size();
    my /= ys.size();
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      sxy += (xs[i] - mx) * (ys[i] - my);
      sxx += (xs[i] - mx) * (xs[i] - mx);
      syy += (ys[i] - my) * (ys[i] - my);
    }
    EXPECT_NEAR(pearson_correlation(xs, ys), sxy / std::sqrt(sxx * syy),
                1e-12);
  }
}

TEST(Rmse, Examples) {
  const std::vector<double> t{0.1, 0.2, 0.3};
  EXPECT_EQ(rmse(t, t), 0.0);
  EXPECT_EQ(rmse(std::vector<double>{1, 1}, std::vector<double>{0, 0}), 1.0);
  EXPECT_EQ(rmse(std::vector<double>{1, 3}, std::vector<double>{2, 2}), 1.0);
  EXPECT_THROW(rmse(std::vector<double>{1}, std::vector<double>{1, 2}),
               InputError);
  EXPECT_THROW(rmse(std::vector<double>{}, std::vector<double>{}), InputError);
}

TEST(LoglogSlope, RecoversPowerLaw) {
  const std::vector<double> ns{1e3, 1e4, 1e5, 1e6};
  std::vector<double> vs;
  for (double n : ns) vs.push_back(3.0 * std::pow(n, -0.97));
  EXPECT_NEAR(loglog_slope(ns, vs), -0.97, 1e-12);
}

TEST(RunBenchmark, SamePolicyIpsEqualsLogMeanReward) {
  BenchmarkScenario s = small_scenario();
  s.target_policies = {s.logging_policy};
  s.sample_sizes = {500};
  s.replications = 1;
  s.estimators = {EstimatorKind::kIPS};
  const auto result = run_benchmark(s, 1);
  ASSERT_EQ(result.rows.size(), 1u);
  const auto log = generate_log(s.environment, s.logging_policy, 500,
                                replication_log_seed(s.seed, 500, 0));
  double mean = 0.0;
  for (const auto& r : log) mean += r.reward;
  EXPECT_NEAR(result.rows[0].estimate, mean / 500.0, 1e-12);
  EXPECT_TRUE(result.rows[0].error.empty());
}

TEST(RunBenchmark, TableShapeAndTruth) {
  const auto s = small_scenario();
  const auto result = run_benchmark(s, 1);
  EXPECT_EQ(result.rows.size(), 2u * 3u * 2u * 5u);
  ASSERT_EQ(result.true_values.size(), 2u);
  for (std::size_t t = 0; t < 2; ++t) {
    EXPECT_EQ(result.true_values[t].value,
              true_policy_value(s.environment, s.target_policies[t],
                                TruthMode::exact())
                  .value);
  }
  for (const auto& row : result.rows) {
    EXPECT_TRUE(row.error.empty()) << row.error;
    EXPECT_EQ(row.true_value, result.true_values[row.target_index].value);
  }
}

TEST(RunBenchmark, DeterministicAcrossRunsAndThreadCounts) {
  const auto s = small_scenario();
  std::ostringstream a, b, c;
  write_results_csv(a, run_benchmark(s, 1));
  write_results_csv(b, run_benchmark(s, 1));
  write_results_csv(c, run_benchmark(s, 4));
  EXPECT_EQ(a.str(), b.str());
  EXPECT_EQ(a.str(), c.str());
}

TEST(RunBenchmark, FailuresBecomeRowErrors) {
  BenchmarkScenario s = small_scenario();
  // The target never takes the only logged action, so SNIPS has no weight
  // mass while IPS still returns (a biased) zero.
  s.logging_policy = PolicySpec::fixed_action(3, 4, 0);
  s.target_policies = {PolicySpec::fixed_action(3, 4, 1)};
  s.estimators = {EstimatorKind::kIPS, EstimatorKind::kSNIPS};
  const auto result = run_benchmark(s, 1);
  ASSERT_FALSE(result.rows.empty());
  for (const auto& row : result.rows) {
    if (row.estimator == EstimatorKind::kSNIPS) {
      EXPECT_EQ(row.error, "estimation_error");
      EXPECT_TRUE(std::isnan(row.estimate));
    } else {
      EXPECT_TRUE(row.error.empty());
      EXPECT_EQ(row.estimate, 0.0);
    }
  }
}

TEST(RunBenchmark, ResultsCsvRoundTrips) {
  const auto s = small_scenario();
  const auto result = run_benchmark(s, 1);
  std::ostringstream out;
  write_results_csv(out, result);
  std::istringstream in(out.str());
  std::uint64_t seed = 0;
  const auto rows = read_results_csv(in, &seed);
  EXPECT_EQ(seed, s.seed);
  ASSERT_EQ(rows.size(), result.rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_EQ(rows[i], result.rows[i]);
  }
  EXPECT_EQ(out.str().substr(0, out.str().find('\n')), kResultColumns);
}

TEST(ScenarioValidation, RejectsBadScenarios) {
  auto s = small_scenario();
  s.sample_sizes = {1000, 200};
  EXPECT_THROW(s.validate(), ConfigError);
  s = small_scenario();
  s.replications = 0;
  EXPECT_THROW(s.validate(), ConfigError);
  s = small_scenario();
  s.estimators.clear();
  EXPECT_THROW(s.validate(), ConfigError);
}

TEST(ScenarioSerialization, RoundTrips) {
  const auto s = small_scenario();
  const auto back = scenario_from_json(Json::parse(to_json(s).dump()));
  EXPECT_EQ(back.environment, s.environment);
  EXPECT_EQ(back.logging_policy, s.logging_policy);
  EXPECT_EQ(back.target_policies, s.target_policies);
  EXPECT_EQ(back.sample_sizes, s.sample_sizes);
  EXPECT_EQ(back.estimators, s.estimators);
  EXPECT_EQ(back.propensity, s.propensity);
  EXPECT_EQ(back.reward_model, s.reward_model);
  EXPECT_EQ(back.seed, s.seed);
}

TEST(TargetFamily, SpansTemperaturesDeterministically) {
  const auto s = small_scenario();
  TargetFamilySpec spec;
  spec.count = 10;
  spec.seed = 3;
  const auto family = make_target_family(s.environment, spec);
  ASSERT_EQ(family.size(), 10u);
  EXPECT_DOUBLE_EQ(family.front().temperature(), spec.temperature_min);
  EXPECT_DOUBLE_EQ(family.back().temperature(), spec.temperature_max);
  EXPECT_EQ(family, make_target_family(s.environment, spec));
}

TEST(VarianceSweep, NoiselessSamePolicyHasZeroVariance) {
  BenchmarkScenario s;
  s.environment = BanditEnvironment::discrete(
      2, {1.0}, {0.0, 1.0}, RewardNoise::kGaussian, 0.0, 1);
  s.logging_policy = PolicySpec::fixed_action(2, 1, 1);
  s.target_policies = {s.logging_policy};
  s.sample_sizes = {100, 1000};
  s.estimators = {EstimatorKind::kIPS, EstimatorKind::kSNIPS};
  s.variance_replications = 30;
  s.seed = 5;
  for (const auto& cell : variance_sweep(s, 1)) {
    EXPECT_EQ(cell.variance, 0.0) << cell.estimator << " " << cell.sample_size;
    EXPECT_EQ(cell.mean, 1.0);
    EXPECT_EQ(cell.failures, 0u);
  }
}

TEST(VarianceSweep, VarianceShrinksWithSampleSize) {
  BenchmarkScenario s = small_scenario();
  s.sample_sizes = {1000, 10000, 100000};
  s.estimators = {EstimatorKind::kIPS};
  s.variance_replications = 30;
  const auto cells = variance_sweep(s, 0);
  std::vector<double> ips, ns;
  for (const auto& c : cells) {
    EXPECT_EQ(c.replications, 30u);
    if (c.estimator == "IPS") {
      ips.push_back(c.variance);
      ns.push_back(static_cast<double>(c.sample_size));
    }
  }
  ASSERT_EQ(ips.size(), 3u);
  EXPECT_GT(ips[1], ips[2]);
  EXPECT_NEAR(loglog_slope(ns, ips), -1.0, 0.3);
}

TEST(VarianceSweep, RequiresThirtyReplications) {
  BenchmarkScenario s = small_scenario();
  s.variance_replications = 29;
  EXPECT_THROW(variance_sweep(s, 1), ConfigError);
}

TEST(VarianceSweep, CsvRoundTrips) {
  BenchmarkScenario s = small_scenario();
  s.estimators = {EstimatorKind::kIPS, EstimatorKind::kSNIPS};
  s.variance_replications = 30;
  const auto cells = variance_sweep(s, 1);
  std::ostringstream out;
  write_variance_csv(out, cells);
  std::istringstream in(out.str());
  EXPECT_EQ(read_variance_csv(in), cells);
}

}  // namespace
}  // namespace ope
