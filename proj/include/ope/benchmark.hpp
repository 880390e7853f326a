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

#ifndef OPE_BENCHMARK_HPP_
#define OPE_BENCHMARK_HPP_

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "ope/core.hpp"
#include "ope/propensity.hpp"
#include "ope/reward_model.hpp"
#include "ope/simulator.hpp"

namespace ope {

// Worker threads for benchmark cells: $OPE_NUM_THREADS if set, otherwise
// the hardware concurrency.
std::size_t default_thread_count();

// Population of softmax policies over the environment's true scorer. Policy
// j uses a temperature spaced evenly in [temperature_min, temperature_max]
// and Gaussian noise of scale spaced evenly in [noise_min, noise_max] added
// to every scorer parameter, so the family spans good and bad policies.
struct TargetFamilySpec {
  std::size_t count = 30;
  double temperature_min = 0.05;
  double temperature_max = 1.0;
  double noise_min = 0.0;
  double noise_max = 0.5;
  std::uint64_t seed = 0;

  bool operator==(const TargetFamilySpec&) const = default;
};

std::vector<PolicySpec> make_target_family(const BanditEnvironment& env,
                                           const TargetFamilySpec& spec);

enum class RewardModelSource { kFitted, kOracle, kCorrupted };

std::string_view to_string(RewardModelSource source);
RewardModelSource reward_model_source_from_string(std::string_view name);

// Where DM and DR get r_hat from. `corrupted` is scale * truth + shift, a
// deliberately misspecified model.
struct RewardModelConfig {
  RewardModelSource source = RewardModelSource::kFitted;
  RewardModelSpec spec;
  std::size_t folds = 2;
  double scale = 1.0;
  double shift = 0.0;

  bool operator==(const RewardModelConfig&) const = default;
};

struct BenchmarkScenario {
  BanditEnvironment environment;
  PolicySpec logging_policy;
  std::vector<PolicySpec> target_policies;
  std::vector<std::uint64_t> sample_sizes;
  std::size_t replications = 1;
  std::vector<EstimatorKind> estimators;
  PropensityConfig propensity;
  RewardModelConfig reward_model;
  TruthMode truth;
  std::uint64_t seed = 0;
  // variance_sweep settings; `run_variance_sweep` tells the CLI to run it.
  bool run_variance_sweep = false;
  std::size_t variance_replications = 50;
  std::size_t variance_target = 0;

  void validate() const;
};

struct BenchmarkRow {
  std::size_t target_index = 0;
  std::uint64_t sample_size = 0;
  std::size_t replication = 0;
  EstimatorKind estimator = EstimatorKind::kIPS;
  double estimate = 0.0;
  double standard_error = 0.0;
  double true_value = 0.0;
  std::string error;  // empty on success

  bool operator==(const BenchmarkRow&) const = default;
};

struct BenchmarkResult {
  std::uint64_t seed = 0;
  std::vector<PolicyValue> true_values;  // per target policy
  std::vector<BenchmarkRow> rows;
};

// One estimate per (target, sample size, replication, estimator). All
// targets of a replication are evaluated on the same logged data. Estimator
// failures become row-level error codes. Results do not depend on the
// thread count.
// Seed of the log behind benchmark cell (n, replication). Exposed so a
// replication can be regenerated outside the harness.
std::uint64_t replication_log_seed(std::uint64_t scenario_seed,
                                   std::uint64_t sample_size,
                                   std::size_t replication);

BenchmarkResult run_benchmark(const BenchmarkScenario& scenario,
                              std::size_t threads = 0);

// Name used for the on-policy baseline in variance tables.
inline constexpr const char* kOnPolicyName = "ON_POLICY";

struct VarianceCell {
  std::string estimator;  // estimator name or ON_POLICY
  std::uint64_t sample_size = 0;
  std::size_t replications = 0;
  double mean = 0.0;
  double variance = 0.0;  // sample variance across replications
  std::size_t failures = 0;

  bool operator==(const VarianceCell&) const = default;
};

// Replication variance of each estimator for the scenario's
// variance_target at every sample size, next to the variance of the plain
// on-policy sample mean of the same size.
std::vector<VarianceCell> variance_sweep(const BenchmarkScenario& scenario,
                                         std::size_t threads = 0);

// Sample Pearson coefficient. Throws InputError on length mismatch or fewer
// than two points, EstimationError when either side has zero variance.
double pearson_correlation(std::span<const double> xs,
                           std::span<const double> ys);

double rmse(std::span<const double> estimates, std::span<const double> truths);

// Least-squares slope of log(variance) against log(n).
double loglog_slope(std::span<const double> ns,
                    std::span<const double> variances);

// Stable tidy CSV. Columns are listed in kResultColumns / kVarianceColumns.
inline constexpr const char* kResultColumns =
    "scenario_seed,target,sample_size,replication,estimator,estimate,"
    "standard_error,true_value,error";
inline constexpr const char* kVarianceColumns =
    "estimator,sample_size,replications,mean,variance,failures";

void write_results_csv(std::ostream& out, const BenchmarkResult& result);
void write_variance_csv(std::ostream& out,
                        const std::vector<VarianceCell>& cells);
std::vector<BenchmarkRow> read_results_csv(std::istream& in,
                                           std::uint64_t* seed = nullptr);
std::vector<VarianceCell> read_variance_csv(std::istream& in);

}  // namespace ope

#endif  // OPE_BENCHMARK_HPP_
