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

#ifndef OPE_ESTIMATORS_HPP_
#define OPE_ESTIMATORS_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "ope/compensated_sum.hpp"
#include "ope/core.hpp"
#include "ope/propensity.hpp"
#include "ope/reward_model.hpp"

namespace ope {

// Mergeable sufficient statistics for one estimator. Every estimator is a
// mean (or, for SNIPS, a ratio of means) of per-record terms, so a log can
// be folded in any number of pieces and the pieces merged afterwards.
struct StreamAccumulator {
  EstimatorKind kind = EstimatorKind::kIPS;
  std::optional<double> clip_max;

  std::uint64_t count = 0;
  CompensatedSum sum_terms;
  CompensatedSum sum_sq_terms;
  CompensatedSum sum_weights;      // SNIPS denominator
  CompensatedSum sum_weight_sq;    // effective sample size
  CompensatedSum sum_weight_term;  // SNIPS delta-method cross moment
  std::uint64_t clipped_count = 0;
  std::uint64_t skipped_count = 0;

  void add(double term, double weight, bool clipped);
  void add_skipped() { ++skipped_count; }
};

// Throws InputError when the accumulators were built for different
// estimators or clipping settings. An empty accumulator is the identity.
StreamAccumulator merge_accumulators(const StreamAccumulator& a,
                                     const StreamAccumulator& b);

// Point estimate and diagnostics from a folded accumulator.
//
// DM, IPS, DR: mean of terms, standard error = sample std / sqrt(n).
// SNIPS: sum(w r) / sum(w); delta-method standard error
//   sqrt(n / (n - 1) * sum(w_i^2 (r_i - V)^2)) / sum(w).
// Throws EstimationError when nothing usable was folded.
EstimateReport summarize(const StreamAccumulator& acc);

// w * r, or nullopt when a support violation is skipped.
std::optional<double> per_record_ips_term(const LoggedInteraction& record,
                                          double target_prob,
                                          double logging_prob,
                                          const PropensityConfig& config,
                                          std::uint64_t record_index = 0);

// w * (r - r_hat(x, a)) + sum_a' pi(a' | x) r_hat(x, a').
inline double per_record_dr_term(double reward, double weight,
                                 double predicted_logged_reward,
                                 double expected_reward) {
  return weight * (reward - predicted_logged_reward) + expected_reward;
}

// Chooses the reward model for a record: a single model, or the cross-fitted
// model that never saw the record.
class RewardSource {
 public:
  RewardSource() = default;
  explicit RewardSource(const RewardPredictor& model) : single_(&model) {}
  explicit RewardSource(const CrossFitModels& models) : cross_(&models) {}

  bool empty() const { return single_ == nullptr && cross_ == nullptr; }
  const RewardPredictor& for_record(std::uint64_t index) const;

 private:
  const RewardPredictor* single_ = nullptr;
  const CrossFitModels* cross_ = nullptr;
};

// Everything an estimator needs besides the records.
struct EstimationSetup {
  const PolicySpec* target = nullptr;
  PropensityConfig propensity;
  // Base model of the epsilon-greedy logger; required for
  // epsilon-greedy recovery.
  const LinearScorer* base_scorer = nullptr;
  RewardSource reward;  // required for DM and DR
};

// Folds any subset of {DM, IPS, SNIPS, DR} over a stream of records, sharing
// the per-record policy and model evaluations between estimators. BLEND is
// derived from the other four in reports().
class EvaluationFold {
 public:
  EvaluationFold(const EstimationSetup& setup,
                 std::vector<EstimatorKind> estimators);

  // `index` is the record's position in the full log; it selects the
  // cross-fitted model and labels support violations.
  void add(const LoggedInteraction& record, std::uint64_t index);
  void merge(const EvaluationFold& other);

  std::uint64_t records_seen() const { return seen_; }
  const StreamAccumulator& accumulator(EstimatorKind kind) const;
  // One report per requested estimator, in request order.
  std::vector<EstimateReport> reports() const;

 private:
  const EstimationSetup* setup_;
  std::vector<EstimatorKind> requested_;
  bool want_blend_ = false;
  bool needs_weights_ = false;
  bool needs_model_ = false;
  std::vector<StreamAccumulator> accs_;  // indexed by EstimatorKind
  std::vector<bool> active_;
  std::uint64_t seen_ = 0;
  std::vector<double> target_probs_;
  std::vector<double> predictions_;
};

EstimateReport estimate_ips(std::span<const LoggedInteraction> records,
                            const PolicySpec& target,
                            const PropensityConfig& config,
                            const LinearScorer* base_scorer = nullptr);
EstimateReport estimate_snips(std::span<const LoggedInteraction> records,
                              const PolicySpec& target,
                              const PropensityConfig& config,
                              const LinearScorer* base_scorer = nullptr);
EstimateReport estimate_dm(std::span<const LoggedInteraction> records,
                           const PolicySpec& target,
                           const RewardSource& reward);
EstimateReport estimate_dr(std::span<const LoggedInteraction> records,
                           const PolicySpec& target,
                           const RewardSource& reward,
                           const PropensityConfig& config,
                           const LinearScorer* base_scorer = nullptr);

// Unweighted mean of the DM, IPS, SNIPS and DR estimates. The standard
// error is the mean of the four standard errors, an upper bound on the
// blend's true standard error.
EstimateReport estimate_blend(std::span<const EstimateReport> reports);

std::vector<EstimateReport> evaluate(std::span<const LoggedInteraction> records,
                                     const EstimationSetup& setup,
                                     const std::vector<EstimatorKind>& kinds);

// Folds records[cuts[i], cuts[i+1]) independently, then merges the parts in
// order. `cuts` must start at 0, end at records.size() and be non-decreasing.
std::vector<EstimateReport> evaluate_partitioned(
    std::span<const LoggedInteraction> records, const EstimationSetup& setup,
    const std::vector<EstimatorKind>& kinds,
    std::span<const std::size_t> cuts);

struct BootstrapInterval {
  double lower = 0.0;
  double upper = 0.0;
  double standard_error = 0.0;
  std::size_t resamples = 0;
};

// Percentile bootstrap of one estimator's point estimate. Needs the whole
// log in memory. Resamples whose estimate is undefined are dropped.
BootstrapInterval bootstrap_estimate(EstimatorKind kind,
                                     std::span<const LoggedInteraction> records,
                                     const EstimationSetup& setup,
                                     std::size_t resamples = 200,
                                     std::uint64_t seed = 0,
                                     double level = 0.95);

}  // namespace ope

#endif  // OPE_ESTIMATORS_HPP_
