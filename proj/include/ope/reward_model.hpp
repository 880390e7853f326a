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

#ifndef OPE_REWARD_MODEL_HPP_
#define OPE_REWARD_MODEL_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ope/core.hpp"

namespace ope {

// Anything that maps (context, action) to a predicted mean reward. Fitted
// models, the simulator's ground truth, and deliberately distorted models
// all plug into DM and DR through this interface.
class RewardPredictor {
 public:
  virtual ~RewardPredictor() = default;

  virtual std::size_t action_count() const = 0;
  virtual double predict(ContextRef context, Action action) const = 0;

  // Fills out[a] = predict(context, a) for every action.
  virtual void predict_all(ContextRef context, std::span<double> out) const;
};

enum class RewardModelKind { kTabularMean, kRidgeLinear };

std::string_view to_string(RewardModelKind kind);
RewardModelKind reward_model_kind_from_string(std::string_view name);

struct RewardModelSpec {
  RewardModelKind kind = RewardModelKind::kRidgeLinear;
  double ridge_lambda = 1e-3;
  std::size_t buckets = 64;  // tabular-mean only

  bool operator==(const RewardModelSpec&) const = default;
};

// Bucket of a context for tabular models: FNV-1a of the context id, or of
// the raw feature bytes when the id is empty.
std::size_t context_bucket(ContextRef context, std::size_t buckets);

// Fitted regression of reward on (context, action).
//
// tabular-mean: per (context bucket, action) mean reward; empty cells hold
// the global mean.
// ridge-linear: r(x, a) = intercept + <w_a, x>, i.e. a linear model over the
// feature map features (x) one-hot(a) plus an unpenalized intercept.
class RewardModel final : public RewardPredictor {
 public:
  static RewardModel tabular_mean(std::size_t action_count,
                                  std::size_t buckets, double global_mean,
                                  std::vector<double> cell_means,
                                  std::vector<std::uint64_t> cell_counts);
  static RewardModel ridge_linear(std::size_t action_count,
                                  std::size_t feature_dim, double ridge_lambda,
                                  double intercept,
                                  std::vector<double> weights);

  RewardModelKind kind() const { return kind_; }
  std::size_t action_count() const override { return action_count_; }
  std::size_t feature_dim() const { return feature_dim_; }
  std::size_t buckets() const { return buckets_; }
  double ridge_lambda() const { return ridge_lambda_; }
  double intercept() const { return intercept_; }
  double global_mean() const { return global_mean_; }
  const std::vector<double>& weights() const { return weights_; }
  const std::vector<double>& cell_means() const { return cell_means_; }
  const std::vector<std::uint64_t>& cell_counts() const {
    return cell_counts_;
  }

  double predict(ContextRef context, Action action) const override;

  // Versioned JSON document: {"format", "version", "kind", "action_count",
  // ...parameters}.
  std::string to_json() const;
  static RewardModel from_json(std::string_view text);
  void save(const std::filesystem::path& path) const;
  static RewardModel load(const std::filesystem::path& path);

  bool operator==(const RewardModel& other) const;

 private:
  RewardModel() = default;

  RewardModelKind kind_ = RewardModelKind::kTabularMean;
  std::size_t action_count_ = 0;
  std::size_t feature_dim_ = 0;
  std::size_t buckets_ = 0;
  double ridge_lambda_ = 0.0;
  double intercept_ = 0.0;
  double global_mean_ = 0.0;
  std::vector<double> weights_;             // ridge: K x d
  std::vector<double> cell_means_;          // tabular: buckets x K
  std::vector<std::uint64_t> cell_counts_;  // tabular: buckets x K
};

// Accumulates sufficient statistics one record at a time; memory does not
// depend on the number of records.
class RewardModelFitter {
 public:
  RewardModelFitter(RewardModelSpec spec, std::size_t action_count,
                    std::size_t feature_dim);

  void add(const LoggedInteraction& record);
  std::uint64_t count() const { return count_; }
  // Throws InputError when no records were added.
  RewardModel fit() const;

 private:
  RewardModelSpec spec_;
  std::size_t action_count_;
  std::size_t feature_dim_;
  std::uint64_t count_ = 0;
  double reward_sum_ = 0.0;
  std::vector<double> cell_sums_;
  std::vector<std::uint64_t> cell_counts_;
  std::vector<double> gram_;      // p x p, p = K*d + 1
  std::vector<double> moment_;    // p
};

RewardModel fit_reward_model(std::span<const LoggedInteraction> training,
                             const RewardModelSpec& spec,
                             std::size_t action_count,
                             std::size_t feature_dim);

double predict_reward(const RewardPredictor& model, ContextRef context,
                      Action action);

// sum_a pi(a | x) * r_hat(x, a).
double expected_model_reward(const RewardPredictor& model,
                             const PolicySpec& policy, ContextRef context);

// K-fold cross-fitting: model k is trained on every record whose index is
// not congruent to k mod K, so each record is scored by a model that never
// saw it. One fold means a single model trained on everything.
class CrossFitModels {
 public:
  CrossFitModels(RewardModelSpec spec, std::size_t action_count,
                 std::size_t feature_dim, std::size_t folds = 2);

  // Streaming interface: feed every record with its position in the log.
  void add(const LoggedInteraction& record, std::uint64_t index);
  void finish();

  std::size_t folds() const { return fitters_.size(); }
  const RewardModel& model_for_record(std::uint64_t index) const;
  const std::vector<RewardModel>& models() const { return models_; }

 private:
  std::vector<RewardModelFitter> fitters_;
  std::vector<RewardModel> models_;
};

CrossFitModels fit_cross_fitted(std::span<const LoggedInteraction> records,
                                const RewardModelSpec& spec,
                                std::size_t action_count,
                                std::size_t feature_dim,
                                std::size_t folds = 2);

// scale * base(x, a) + shift. Used to build deliberately wrong models.
class DistortedRewardModel final : public RewardPredictor {
 public:
  DistortedRewardModel(std::shared_ptr<const RewardPredictor> base,
                       double scale, double shift)
      : base_(std::move(base)), scale_(scale), shift_(shift) {}

  std::size_t action_count() const override { return base_->action_count(); }
  double predict(ContextRef context, Action action) const override {
    return scale_ * base_->predict(context, action) + shift_;
  }

 private:
  std::shared_ptr<const RewardPredictor> base_;
  double scale_;
  double shift_;
};

// Predicts zero everywhere; turns DR into IPS.
class ZeroRewardModel final : public RewardPredictor {
 public:
  explicit ZeroRewardModel(std::size_t action_count)
      : action_count_(action_count) {}
  std::size_t action_count() const override { return action_count_; }
  double predict(ContextRef, Action) const override { return 0.0; }

 private:
  std::size_t action_count_;
};

}  // namespace ope

#endif  // OPE_REWARD_MODEL_HPP_
