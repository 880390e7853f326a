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

#include "ope/reward_model.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "ope/errors.hpp"

namespace ope {
namespace {

constexpr int kModelFormatVersion = 1;
constexpr const char* kModelFormatName = "ope-reward-model";

std::uint64_t fnv1a(const void* data, std::size_t size,
                    std::uint64_t h = 14695981039346656037ULL) {
  const auto* bytes = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < size; ++i) {
    h ^= bytes[i];
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace

void RewardPredictor::predict_all(ContextRef context,
                                  std::span<double> out) const {
  for (std::size_t a = 0; a < out.size(); ++a) {
    out[a] = predict(context, static_cast<Action>(a));
  }
}

std::string_view to_string(RewardModelKind kind) {
  return kind == RewardModelKind::kTabularMean ? "tabular-mean"
                                               : "ridge-linear";
}

RewardModelKind reward_model_kind_from_string(std::string_view name) {
  if (name == "tabular-mean") return RewardModelKind::kTabularMean;
  if (name == "ridge-linear") return RewardModelKind::kRidgeLinear;
  throw ConfigError("unknown reward model kind '" + std::string(name) + "'");
}

std::size_t context_bucket(ContextRef context, std::size_t buckets) {
  if (buckets == 0) throw InputError("bucket count must be positive");
  std::uint64_t h;
  if (!context.id.empty()) {
    h = fnv1a(context.id.data(), context.id.size());
  } else {
    h = fnv1a(context.features.data(),
              context.features.size() * sizeof(double));
  }
  return static_cast<std::size_t>(h % buckets);
}

RewardModel RewardModel::tabular_mean(std::size_t action_count,
                                      std::size_t buckets, double global_mean,
                                      std::vector<double> cell_means,
                                      std::vector<std::uint64_t> cell_counts) {
  if (action_count == 0 || buckets == 0) {
    throw InputError("tabular model needs actions and buckets");
  }
  if (cell_means.size() != buckets * action_count ||
      cell_counts.size() != buckets * action_count) {
    throw InputError("tabular model cell arrays have wrong size");
  }
  RewardModel m;
  m.kind_ = RewardModelKind::kTabularMean;
  m.action_count_ = action_count;
  m.buckets_ = buckets;
  m.global_mean_ = global_mean;
  m.cell_means_ = std::move(cell_means);
  m.cell_counts_ = std::move(cell_counts);
  return m;
}

RewardModel RewardModel::ridge_linear(std::size_t action_count,
                                      std::size_t feature_dim,
                                      double ridge_lambda, double intercept,
                                      std::vector<double> weights) {
  if (action_count == 0) throw InputError("ridge model needs actions");
  if (weights.size() != action_count * feature_dim) {
    throw InputError("ridge weight vector has wrong size");
  }
  if (!(ridge_lambda >= 0.0)) throw InputError("ridge lambda must be >= 0");
  RewardModel m;
  m.kind_ = RewardModelKind::kRidgeLinear;
  m.action_count_ = action_count;
  m.feature_dim_ = feature_dim;
  m.ridge_lambda_ = ridge_lambda;
  m.intercept_ = intercept;
  m.weights_ = std::move(weights);
  return m;
}

double RewardModel::predict(ContextRef context, Action action) const {
  if (action >= action_count_) throw InputError("action out of range");
  if (kind_ == RewardModelKind::kTabularMean) {
    const std::size_t b = context_bucket(context, buckets_);
    return cell_means_[b * action_count_ + action];
  }
  if (context.features.size() != feature_dim_) {
    throw InputError("feature dimension " +
                     std::to_string(context.features.size()) +
                     " does not match model dimension " +
                     std::to_string(feature_dim_));
  }
  const double* row = weights_.data() + action * feature_dim_;
  double s = intercept_;
  for (std::size_t j = 0; j < feature_dim_; ++j) {
    s += row[j] * context.features[j];
  }
  return s;
}

bool RewardModel::operator==(const RewardModel& other) const {
  return kind_ == other.kind_ && action_count_ == other.action_count_ &&
         feature_dim_ == other.feature_dim_ && buckets_ == other.buckets_ &&
         ridge_lambda_ == other.ridge_lambda_ &&
         intercept_ == other.intercept_ &&
         global_mean_ == other.global_mean_ && weights_ == other.weights_ &&
         cell_means_ == other.cell_means_ && cell_counts_ == other.cell_counts_;
}

std::string RewardModel::to_json() const {
  nlohmann::ordered_json doc;
  doc["format"] = kModelFormatName;
  doc["version"] = kModelFormatVersion;
  doc["kind"] = std::string(to_string(kind_));
  doc["action_count"] = action_count_;
  if (kind_ == RewardModelKind::kTabularMean) {
    doc["buckets"] = buckets_;
    doc["global_mean"] = global_mean_;
    doc["cell_means"] = cell_means_;
    doc["cell_counts"] = cell_counts_;
  } else {
    doc["feature_dim"] = feature_dim_;
    doc["ridge_lambda"] = ridge_lambda_;
    doc["intercept"] = intercept_;
    doc["weights"] = weights_;
  }
  return doc.dump(2) + "\n";
}

RewardModel RewardModel::from_json(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
    if (doc.at("format").get<std::string>() != kModelFormatName) {
      throw SchemaError("not a reward model document");
    }
    if (doc.at("version").get<int>() != kModelFormatVersion) {
      throw SchemaError("unsupported reward model version " +
                        doc.at("version").dump());
    }
    const auto kind =
        reward_model_kind_from_string(doc.at("kind").get<std::string>());
    const auto k = doc.at("action_count").get<std::size_t>();
    if (kind == RewardModelKind::kTabularMean) {
      return tabular_mean(k, doc.at("buckets").get<std::size_t>(),
                          doc.at("global_mean").get<double>(),
                          doc.at("cell_means").get<std::vector<double>>(),
                          doc.at("cell_counts").get<std::vector<std::uint64_t>>());
    }
    return ridge_linear(k, doc.at("feature_dim").get<std::size_t>(),
                        doc.at("ridge_lambda").get<double>(),
                        doc.at("intercept").get<double>(),
                        doc.at("weights").get<std::vector<double>>());
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("reward model document: ") + e.what());
  }
}

void RewardModel::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << to_json();
  if (!out) throw IoError("failed writing " + path.string());
}

RewardModel RewardModel::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return from_json(ss.str());
}

RewardModelFitter::RewardModelFitter(RewardModelSpec spec,
                                     std::size_t action_count,
                                     std::size_t feature_dim)
    : spec_(spec), action_count_(action_count), feature_dim_(feature_dim) {
  if (action_count_ == 0) throw InputError("reward model needs actions");
  if (!(spec_.ridge_lambda >= 0.0)) {
    throw ConfigError("ridge lambda must be >= 0");
  }
  if (spec_.kind == RewardModelKind::kTabularMean) {
    if (spec_.buckets == 0) throw ConfigError("bucket count must be positive");
    cell_sums_.assign(spec_.buckets * action_count_, 0.0);
    cell_counts_.assign(spec_.buckets * action_count_, 0);
  } else {
    const std::size_t p = action_count_ * feature_dim_ + 1;
    gram_.assign(p * p, 0.0);
    moment_.assign(p, 0.0);
  }
}

void RewardModelFitter::add(const LoggedInteraction& record) {
  if (record.action >= action_count_) throw InputError("action out of range");
  if (!std::isfinite(record.reward)) throw InputError("reward is not finite");
  ++count_;
  reward_sum_ += record.reward;
  if (spec_.kind == RewardModelKind::kTabularMean) {
    const std::size_t cell =
        context_bucket(context_of(record), spec_.buckets) * action_count_ +
        record.action;
    cell_sums_[cell] += record.reward;
    ++cell_counts_[cell];
    return;
  }
  if (record.features.size() != feature_dim_) {
    throw InputError("feature dimension mismatch in training record");
  }
  // Nonzero coordinates of phi(x, a): the intercept (index 0) and the block
  // of action a.
  const std::size_t p = moment_.size();
  const std::size_t base = 1 + record.action * feature_dim_;
  const auto& x = record.features;
  gram_[0] += 1.0;
  moment_[0] += record.reward;
  for (std::size_t j = 0; j < feature_dim_; ++j) {
    gram_[base + j] += x[j];
    gram_[(base + j) * p] += x[j];
    moment_[base + j] += x[j] * record.reward;
    for (std::size_t l = 0; l < feature_dim_; ++l) {
      gram_[(base + j) * p + base + l] += x[j] * x[l];
    }
  }
}

RewardModel RewardModelFitter::fit() const {
  if (count_ == 0) throw InputError("cannot fit a reward model on no records");
  const double global_mean = reward_sum_ / static_cast<double>(count_);
  if (spec_.kind == RewardModelKind::kTabularMean) {
    std::vector<double> means(cell_sums_.size());
    for (std::size_t c = 0; c < means.size(); ++c) {
      means[c] = cell_counts_[c] == 0
                     ? global_mean
                     : cell_sums_[c] / static_cast<double>(cell_counts_[c]);
    }
    return RewardModel::tabular_mean(action_count_, spec_.buckets, global_mean,
                                     std::move(means), cell_counts_);
  }
  const auto p = static_cast<Eigen::Index>(moment_.size());
  Eigen::MatrixXd a(p, p);
  Eigen::VectorXd b(p);
  for (Eigen::Index i = 0; i < p; ++i) {
    b(i) = moment_[i];
    for (Eigen::Index j = 0; j < p; ++j) a(i, j) = gram_[i * p + j];
    if (i > 0) a(i, i) += spec_.ridge_lambda;
  }
  // Minimum-norm solution; the system is singular whenever some action was
  // never logged or the features are collinear with the intercept.
  const Eigen::VectorXd w = a.completeOrthogonalDecomposition().solve(b);
  if (!w.allFinite()) throw EstimationError("ridge fit produced non-finite weights");
  std::vector<double> weights(w.data() + 1, w.data() + p);
  return RewardModel::ridge_linear(action_count_, feature_dim_,
                                   spec_.ridge_lambda, w(0),
                                   std::move(weights));
}

RewardModel fit_reward_model(std::span<const LoggedInteraction> training,
                             const RewardModelSpec& spec,
                             std::size_t action_count,
                             std::size_t feature_dim) {
  RewardModelFitter fitter(spec, action_count, feature_dim);
  for (const auto& r : training) fitter.add(r);
  return fitter.fit();
}

double predict_reward(const RewardPredictor& model, ContextRef context,
                      Action action) {
  return model.predict(context, action);
}

double expected_model_reward(const RewardPredictor& model,
                             const PolicySpec& policy, ContextRef context) {
  const std::size_t k = policy.action_count();
  if (model.action_count() != k) {
    throw InputError("reward model and policy disagree on the action count");
  }
  std::vector<double> probs(k);
  std::vector<double> preds(k);
  policy.distribution(context, probs);
  model.predict_all(context, preds);
  double total = 0.0;
  for (std::size_t a = 0; a < k; ++a) {
    if (probs[a] != 0.0) total += probs[a] * preds[a];
  }
  return total;
}

CrossFitModels::CrossFitModels(RewardModelSpec spec, std::size_t action_count,
                               std::size_t feature_dim, std::size_t folds) {
  if (folds == 0) throw ConfigError("cross-fitting needs at least one fold");
  fitters_.reserve(folds);
  for (std::size_t k = 0; k < folds; ++k) {
    fitters_.emplace_back(spec, action_count, feature_dim);
  }
}

void CrossFitModels::add(const LoggedInteraction& record,
                         std::uint64_t index) {
  const std::size_t folds = fitters_.size();
  if (folds == 1) {
    fitters_[0].add(record);
    return;
  }
  const std::size_t own = static_cast<std::size_t>(index % folds);
  for (std::size_t k = 0; k < folds; ++k) {
    if (k != own) fitters_[k].add(record);
  }
}

void CrossFitModels::finish() {
  models_.clear();
  for (const auto& f : fitters_) models_.push_back(f.fit());
}

const RewardModel& CrossFitModels::model_for_record(std::uint64_t index) const {
  if (models_.empty()) throw InputError("cross-fit models not finished");
  return models_[static_cast<std::size_t>(index % models_.size())];
}

CrossFitModels fit_cross_fitted(std::span<const LoggedInteraction> records,
                                const RewardModelSpec& spec,
                                std::size_t action_count,
                                std::size_t feature_dim, std::size_t folds) {
  CrossFitModels models(spec, action_count, feature_dim, folds);
  for (std::size_t i = 0; i < records.size(); ++i) models.add(records[i], i);
  models.finish();
  return models;
}

}  // namespace ope
