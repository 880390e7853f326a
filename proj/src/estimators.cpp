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

#include "ope/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "ope/errors.hpp"
#include "ope/random.hpp"

namespace ope {
namespace {

constexpr std::size_t kKindSlots = 4;  // DM, IPS, SNIPS, DR

std::size_t slot(EstimatorKind kind) { return static_cast<std::size_t>(kind); }

double sample_variance(double sum, double sum_sq, std::uint64_t n) {
  if (n < 2) return std::numeric_limits<double>::quiet_NaN();
  const double dn = static_cast<double>(n);
  const double v = (sum_sq - sum * sum / dn) / (dn - 1.0);
  return v > 0.0 ? v : 0.0;
}

}  // namespace

void StreamAccumulator::add(double term, double weight, bool clipped) {
  ++count;
  sum_terms.add(term);
  sum_sq_terms.add(term * term);
  sum_weights.add(weight);
  sum_weight_sq.add(weight * weight);
  sum_weight_term.add(weight * term);
  if (clipped) ++clipped_count;
}

StreamAccumulator merge_accumulators(const StreamAccumulator& a,
                                     const StreamAccumulator& b) {
  if (a.kind != b.kind || a.clip_max != b.clip_max) {
    throw InputError("cannot merge accumulators with different configurations");
  }
  StreamAccumulator out = a;
  out.count += b.count;
  out.sum_terms.merge(b.sum_terms);
  out.sum_sq_terms.merge(b.sum_sq_terms);
  out.sum_weights.merge(b.sum_weights);
  out.sum_weight_sq.merge(b.sum_weight_sq);
  out.sum_weight_term.merge(b.sum_weight_term);
  out.clipped_count += b.clipped_count;
  out.skipped_count += b.skipped_count;
  return out;
}

EstimateReport summarize(const StreamAccumulator& acc) {
  if (acc.kind == EstimatorKind::kBlend) {
    throw InputError("BLEND has no accumulator; use estimate_blend");
  }
  if (acc.count == 0) {
    throw EstimationError(std::string(to_string(acc.kind)) +
                          ": no usable records");
  }
  const double n = static_cast<double>(acc.count);
  const double sum_w = acc.sum_weights.value();
  const double sum_w2 = acc.sum_weight_sq.value();

  EstimateReport r;
  r.estimator = acc.kind;
  r.n = acc.count;
  r.skipped_records = acc.skipped_count;
  r.clip_fraction = static_cast<double>(acc.clipped_count) / n;
  r.effective_sample_size =
      sum_w2 > 0.0 ? std::min(n, sum_w * sum_w / sum_w2) : 0.0;

  if (acc.kind == EstimatorKind::kSNIPS) {
    if (!(sum_w > 0.0)) {
      throw EstimationError(
          "SNIPS: importance weights sum to zero; the target policy puts no "
          "mass on any logged action");
    }
    const double v = acc.sum_terms.value() / sum_w;
    r.point_estimate = v;
    if (acc.count < 2) {
      r.standard_error = std::numeric_limits<double>::quiet_NaN();
    } else {
      // sum (w r - v w)^2 = sum w^2 r^2 - 2 v sum w^2 r + v^2 sum w^2
      double s = acc.sum_sq_terms.value() -
                 2.0 * v * acc.sum_weight_term.value() + v * v * sum_w2;
      if (s < 0.0) s = 0.0;
      r.standard_error = std::sqrt(s * n / (n - 1.0)) / sum_w;
    }
    return r;
  }
  const double sum_t = acc.sum_terms.value();
  r.point_estimate = sum_t / n;
  const double var = sample_variance(sum_t, acc.sum_sq_terms.value(), acc.count);
  r.standard_error = std::isnan(var) ? var : std::sqrt(var / n);
  return r;
}

std::optional<double> per_record_ips_term(const LoggedInteraction& record,
                                          double target_prob,
                                          double logging_prob,
                                          const PropensityConfig& config,
                                          std::uint64_t record_index) {
  const auto w = importance_weight(target_prob, logging_prob, config,
                                   record_index);
  if (!w) return std::nullopt;
  return w->value * record.reward;
}

const RewardPredictor& RewardSource::for_record(std::uint64_t index) const {
  if (single_ != nullptr) return *single_;
  if (cross_ != nullptr) return cross_->model_for_record(index);
  throw InputError("DM and DR need a reward model");
}

EvaluationFold::EvaluationFold(const EstimationSetup& setup,
                               std::vector<EstimatorKind> estimators)
    : setup_(&setup), requested_(std::move(estimators)) {
  if (setup.target == nullptr) throw InputError("no target policy");
  if (requested_.empty()) throw InputError("no estimators requested");
  const std::size_t k = setup.target->action_count();
  active_.assign(kKindSlots, false);
  for (EstimatorKind kind : requested_) {
    if (kind == EstimatorKind::kBlend) {
      want_blend_ = true;
      for (std::size_t s = 0; s < kKindSlots; ++s) active_[s] = true;
    } else {
      active_[slot(kind)] = true;
    }
  }
  needs_weights_ = active_[slot(EstimatorKind::kIPS)] ||
                   active_[slot(EstimatorKind::kSNIPS)] ||
                   active_[slot(EstimatorKind::kDR)];
  needs_model_ = active_[slot(EstimatorKind::kDM)] ||
                 active_[slot(EstimatorKind::kDR)];
  if (needs_weights_) {
    setup.propensity.validate();
    if (setup.propensity.mode != PropensityMode::kLogged &&
        setup.propensity.action_count != k) {
      throw ConfigError("propensity action count does not match the policy");
    }
    if (setup.propensity.mode == PropensityMode::kEpsilonGreedyRecovery) {
      if (setup.base_scorer == nullptr) {
        throw ConfigError(
            "epsilon-greedy recovery needs the logging policy's base scorer");
      }
      if (setup.base_scorer->action_count != k) {
        throw ConfigError("base scorer action count does not match the policy");
      }
    }
  }
  if (needs_model_) {
    if (setup.reward.empty()) throw InputError("DM and DR need a reward model");
    if (setup.reward.for_record(0).action_count() != k) {
      throw InputError("reward model and target policy disagree on K");
    }
  }
  accs_.resize(kKindSlots);
  for (std::size_t s = 0; s < kKindSlots; ++s) {
    accs_[s].kind = static_cast<EstimatorKind>(s);
    if (s != slot(EstimatorKind::kDM)) accs_[s].clip_max = setup.propensity.clip_max;
  }
  target_probs_.resize(k);
  predictions_.resize(k);
}

void EvaluationFold::add(const LoggedInteraction& record, std::uint64_t index) {
  const PolicySpec& target = *setup_->target;
  const std::size_t k = target.action_count();
  validate_record(record, k);
  ++seen_;
  const ContextRef ctx = context_of(record);
  target.distribution(ctx, target_probs_);

  double expected = 0.0;
  const RewardPredictor* model = nullptr;
  if (needs_model_) {
    model = &setup_->reward.for_record(index);
    model->predict_all(ctx, predictions_);
    for (std::size_t a = 0; a < k; ++a) {
      if (target_probs_[a] != 0.0) expected += target_probs_[a] * predictions_[a];
    }
    if (active_[slot(EstimatorKind::kDM)]) {
      accs_[slot(EstimatorKind::kDM)].add(expected, 1.0, false);
    }
  }
  if (!needs_weights_) return;

  const PropensityConfig& cfg = setup_->propensity;
  std::optional<double> logging;
  if (cfg.mode == PropensityMode::kLogged) {
    if (!record.logging_propensity) {
      throw InputError("record " + std::to_string(index) +
                       " has no logging propensity");
    }
    logging = *record.logging_propensity;
  } else {
    const Action base =
        cfg.mode == PropensityMode::kEpsilonGreedyRecovery
            ? greedy_action(*setup_->base_scorer, record.features)
            : Action{0};
    logging = recover_logging_propensity(record, base, cfg);
  }
  std::optional<ImportanceWeight> w;
  if (logging) {
    w = importance_weight(target_probs_[record.action], *logging, cfg, index);
  }
  if (!w) {
    for (EstimatorKind kind :
         {EstimatorKind::kIPS, EstimatorKind::kSNIPS, EstimatorKind::kDR}) {
      if (active_[slot(kind)]) accs_[slot(kind)].add_skipped();
    }
    return;
  }
  const double ips = w->value * record.reward;
  if (active_[slot(EstimatorKind::kIPS)]) {
    accs_[slot(EstimatorKind::kIPS)].add(ips, w->value, w->clipped);
  }
  if (active_[slot(EstimatorKind::kSNIPS)]) {
    accs_[slot(EstimatorKind::kSNIPS)].add(ips, w->value, w->clipped);
  }
  if (active_[slot(EstimatorKind::kDR)]) {
    const double dr = per_record_dr_term(record.reward, w->value,
                                         predictions_[record.action], expected);
    accs_[slot(EstimatorKind::kDR)].add(dr, w->value, w->clipped);
  }
}

void EvaluationFold::merge(const EvaluationFold& other) {
  if (other.active_ != active_) {
    throw InputError("cannot merge folds over different estimator sets");
  }
  for (std::size_t s = 0; s < kKindSlots; ++s) {
    if (active_[s]) accs_[s] = merge_accumulators(accs_[s], other.accs_[s]);
  }
  seen_ += other.seen_;
}

const StreamAccumulator& EvaluationFold::accumulator(EstimatorKind kind) const {
  if (kind == EstimatorKind::kBlend || !active_[slot(kind)]) {
    throw InputError("estimator " + std::string(to_string(kind)) +
                     " is not part of this fold");
  }
  return accs_[slot(kind)];
}

std::vector<EstimateReport> EvaluationFold::reports() const {
  std::vector<EstimateReport> out;
  out.reserve(requested_.size());
  for (EstimatorKind kind : requested_) {
    if (kind == EstimatorKind::kBlend) {
      std::vector<EstimateReport> parts;
      for (std::size_t s = 0; s < kKindSlots; ++s) {
        parts.push_back(summarize(accs_[s]));
      }
      out.push_back(estimate_blend(parts));
    } else {
      out.push_back(summarize(accs_[slot(kind)]));
    }
  }
  return out;
}

std::vector<EstimateReport> evaluate(std::span<const LoggedInteraction> records,
                                     const EstimationSetup& setup,
                                     const std::vector<EstimatorKind>& kinds) {
  EvaluationFold fold(setup, kinds);
  for (std::size_t i = 0; i < records.size(); ++i) fold.add(records[i], i);
  return fold.reports();
}

std::vector<EstimateReport> evaluate_partitioned(
    std::span<const LoggedInteraction> records, const EstimationSetup& setup,
    const std::vector<EstimatorKind>& kinds,
    std::span<const std::size_t> cuts) {
  if (cuts.size() < 2 || cuts.front() != 0 || cuts.back() != records.size() ||
      !std::is_sorted(cuts.begin(), cuts.end())) {
    throw InputError("partition cuts must run from 0 to the record count");
  }
  std::vector<EvaluationFold> parts;
  parts.reserve(cuts.size() - 1);
  for (std::size_t p = 0; p + 1 < cuts.size(); ++p) {
    parts.emplace_back(setup, kinds);
    for (std::size_t i = cuts[p]; i < cuts[p + 1]; ++i) {
      parts.back().add(records[i], i);
    }
  }
  for (std::size_t p = 1; p < parts.size(); ++p) parts[0].merge(parts[p]);
  return parts[0].reports();
}

namespace {

EstimateReport single(std::span<const LoggedInteraction> records,
                      const EstimationSetup& setup, EstimatorKind kind) {
  return evaluate(records, setup, {kind}).front();
}

}  // namespace

EstimateReport estimate_ips(std::span<const LoggedInteraction> records,
                            const PolicySpec& target,
                            const PropensityConfig& config,
                            const LinearScorer* base_scorer) {
  EstimationSetup setup{&target, config, base_scorer, {}};
  return single(records, setup, EstimatorKind::kIPS);
}

EstimateReport estimate_snips(std::span<const LoggedInteraction> records,
                              const PolicySpec& target,
                              const PropensityConfig& config,
                              const LinearScorer* base_scorer) {
  EstimationSetup setup{&target, config, base_scorer, {}};
  return single(records, setup, EstimatorKind::kSNIPS);
}

EstimateReport estimate_dm(std::span<const LoggedInteraction> records,
                           const PolicySpec& target,
                           const RewardSource& reward) {
  EstimationSetup setup{&target, {}, nullptr, reward};
  return single(records, setup, EstimatorKind::kDM);
}

EstimateReport estimate_dr(std::span<const LoggedInteraction> records,
                           const PolicySpec& target,
                           const RewardSource& reward,
                           const PropensityConfig& config,
                           const LinearScorer* base_scorer) {
  EstimationSetup setup{&target, config, base_scorer, reward};
  return single(records, setup, EstimatorKind::kDR);
}

EstimateReport estimate_blend(std::span<const EstimateReport> reports) {
  if (reports.size() != 4) {
    throw InputError("BLEND needs exactly the DM, IPS, SNIPS and DR reports");
  }
  std::vector<bool> seen(kKindSlots, false);
  for (const auto& r : reports) {
    if (r.estimator == EstimatorKind::kBlend || seen[slot(r.estimator)]) {
      throw InputError("BLEND needs one report from each of DM, IPS, SNIPS, DR");
    }
    seen[slot(r.estimator)] = true;
  }
  const std::uint64_t inputs = reports[0].n + reports[0].skipped_records;
  EstimateReport out;
  out.estimator = EstimatorKind::kBlend;
  out.n = reports[0].n;
  out.effective_sample_size = reports[0].effective_sample_size;
  double total = 0.0;
  double se_total = 0.0;
  for (const auto& r : reports) {
    if (r.n + r.skipped_records != inputs) {
      throw InputError("BLEND inputs were computed over different record sets");
    }
    total += r.point_estimate;
    se_total += r.standard_error;
    out.n = std::min(out.n, r.n);
    out.effective_sample_size =
        std::min(out.effective_sample_size, r.effective_sample_size);
    out.clip_fraction = std::max(out.clip_fraction, r.clip_fraction);
    out.skipped_records = std::max(out.skipped_records, r.skipped_records);
  }
  out.point_estimate = total / 4.0;
  out.standard_error = se_total / 4.0;
  return out;
}

BootstrapInterval bootstrap_estimate(EstimatorKind kind,
                                     std::span<const LoggedInteraction> records,
                                     const EstimationSetup& setup,
                                     std::size_t resamples, std::uint64_t seed,
                                     double level) {
  if (records.empty()) throw EstimationError("bootstrap of an empty log");
  if (resamples < 2) throw ConfigError("bootstrap needs at least 2 resamples");
  if (!(level > 0.0 && level < 1.0)) {
    throw ConfigError("bootstrap level must lie in (0, 1)");
  }
  Rng rng(seed, {0x626f6f74ULL});
  std::vector<double> estimates;
  estimates.reserve(resamples);
  const std::size_t n = records.size();
  for (std::size_t b = 0; b < resamples; ++b) {
    EvaluationFold fold(setup, {kind});
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t j = rng.below(n);
      fold.add(records[j], j);
    }
    try {
      estimates.push_back(fold.reports().front().point_estimate);
    } catch (const EstimationError&) {
    }
  }
  if (estimates.size() < 2) {
    throw EstimationError("bootstrap: too few resamples produced an estimate");
  }
  std::sort(estimates.begin(), estimates.end());
  auto quantile = [&estimates](double q) {
    const double pos = q * static_cast<double>(estimates.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, estimates.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return estimates[lo] + frac * (estimates[hi] - estimates[lo]);
  };
  double sum = 0.0;
  double sum_sq = 0.0;
  for (double e : estimates) {
    sum += e;
    sum_sq += e * e;
  }
  BootstrapInterval out;
  out.lower = quantile((1.0 - level) / 2.0);
  out.upper = quantile(1.0 - (1.0 - level) / 2.0);
  out.standard_error = std::sqrt(sample_variance(sum, sum_sq, estimates.size()));
  out.resamples = estimates.size();
  return out;
}

}  // namespace ope
