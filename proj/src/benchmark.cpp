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

#include "ope/benchmark.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <istream>
#include <limits>
#include <memory>
#include <mutex>
#include <ostream>
#include <string>
#include <thread>

#include "ope/errors.hpp"
#include "ope/estimators.hpp"
#include "ope/text.hpp"

namespace ope {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Stream tags keep the generators of different uses apart.
enum : std::uint64_t {
  kBenchmarkLogStream = 1,
  kSweepLogStream = 2,
  kSweepOnPolicyStream = 3,
  kTruthStream = 4,
  kFamilyStream = 5,
};

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag,
                          std::uint64_t a, std::uint64_t b) {
  return Rng(seed, {tag, a, b}).next_u64();
}

template <typename Fn>
void parallel_for(std::size_t tasks, std::size_t threads, Fn&& fn) {
  if (threads == 0) threads = default_thread_count();
  threads = std::min(threads, tasks);
  if (threads <= 1) {
    for (std::size_t i = 0; i < tasks; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> workers;
  workers.reserve(threads);
  for (std::size_t t = 0; t < threads; ++t) {
    workers.emplace_back([&] {
      for (std::size_t i = next++; i < tasks; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& w : workers) w.join();
  if (failure) std::rethrow_exception(failure);
}

std::string error_code(const std::exception& e) {
  if (dynamic_cast<const SupportViolation*>(&e)) return "support_violation";
  if (dynamic_cast<const EstimationError*>(&e)) return "estimation_error";
  if (dynamic_cast<const InputError*>(&e)) return "input_error";
  if (dynamic_cast<const ConfigError*>(&e)) return "config_error";
  return "error";
}

bool uses_model(EstimatorKind k) {
  return k == EstimatorKind::kDM || k == EstimatorKind::kDR ||
         k == EstimatorKind::kBlend;
}

struct Outcome {
  double estimate = kNaN;
  double standard_error = kNaN;
  std::string error;
};

// Shared, replication-independent reward models (oracle / corrupted).
struct FixedModels {
  std::shared_ptr<const RewardPredictor> model;
};

FixedModels make_fixed_models(const BenchmarkScenario& s) {
  FixedModels out;
  if (s.reward_model.source == RewardModelSource::kFitted) return out;
  auto oracle = std::make_shared<OracleRewardModel>(s.environment);
  if (s.reward_model.source == RewardModelSource::kOracle) {
    out.model = oracle;
  } else {
    out.model = std::make_shared<DistortedRewardModel>(
        oracle, s.reward_model.scale, s.reward_model.shift);
  }
  return out;
}

// Generates one logged data set of size n (twice when a reward model must be
// cross-fitted first) and evaluates every target on it. Result is indexed
// [target][estimator] in scenario.estimators order.
std::vector<std::vector<Outcome>> evaluate_replication(
    const BenchmarkScenario& s, std::span<const std::size_t> targets,
    std::uint64_t n, std::uint64_t log_seed, const FixedModels& fixed) {
  const std::size_t k = s.environment.action_count;
  const std::size_t d = s.environment.feature_dim();
  bool wants_model = false;
  for (EstimatorKind e : s.estimators) wants_model |= uses_model(e);

  std::string model_error;
  std::unique_ptr<CrossFitModels> cross;
  RewardSource source;
  if (wants_model) {
    if (fixed.model) {
      source = RewardSource(*fixed.model);
    } else {
      try {
        cross = std::make_unique<CrossFitModels>(s.reward_model.spec, k, d,
                                                 s.reward_model.folds);
        LogGenerator gen(s.environment, s.logging_policy, log_seed);
        LoggedInteraction r;
        for (std::uint64_t i = 0; i < n; ++i) {
          gen.next(r);
          cross->add(r, i);
        }
        cross->finish();
        source = RewardSource(*cross);
      } catch (const Error& e) {
        model_error = error_code(e);
      }
    }
  }

  std::vector<EstimatorKind> kinds;
  for (EstimatorKind e : s.estimators) {
    if (model_error.empty() || !uses_model(e)) kinds.push_back(e);
  }

  const LinearScorer* base =
      s.logging_policy.kind() == PolicyKind::kTabular
          ? nullptr
          : &s.logging_policy.scorer();
  std::vector<EstimationSetup> setups;
  setups.reserve(targets.size());
  for (std::size_t t : targets) {
    setups.push_back({&s.target_policies[t], s.propensity, base, source});
  }
  std::vector<std::unique_ptr<EvaluationFold>> folds(targets.size());
  std::vector<std::string> fold_error(targets.size());
  if (!kinds.empty()) {
    for (std::size_t t = 0; t < targets.size(); ++t) {
      try {
        folds[t] = std::make_unique<EvaluationFold>(setups[t], kinds);
      } catch (const Error& e) {
        fold_error[t] = error_code(e);
      }
    }
    LogGenerator gen(s.environment, s.logging_policy, log_seed);
    LoggedInteraction r;
    for (std::uint64_t i = 0; i < n; ++i) {
      gen.next(r);
      for (std::size_t t = 0; t < targets.size(); ++t) {
        if (!folds[t]) continue;
        try {
          folds[t]->add(r, i);
        } catch (const Error& e) {
          fold_error[t] = error_code(e);
          folds[t].reset();
        }
      }
    }
  }

  std::vector<std::vector<Outcome>> out(targets.size());
  for (std::size_t t = 0; t < targets.size(); ++t) {
    for (EstimatorKind e : s.estimators) {
      Outcome o;
      if (!model_error.empty() && uses_model(e)) {
        o.error = model_error;
      } else if (!folds[t]) {
        o.error = fold_error[t].empty() ? "error" : fold_error[t];
      } else {
        try {
          EstimateReport rep;
          if (e == EstimatorKind::kBlend) {
            std::vector<EstimateReport> parts;
            for (EstimatorKind p : {EstimatorKind::kDM, EstimatorKind::kIPS,
                                    EstimatorKind::kSNIPS, EstimatorKind::kDR}) {
              parts.push_back(summarize(folds[t]->accumulator(p)));
            }
            rep = estimate_blend(parts);
          } else {
            rep = summarize(folds[t]->accumulator(e));
          }
          o.estimate = rep.point_estimate;
          o.standard_error = rep.standard_error;
        } catch (const Error& err) {
          o.error = error_code(err);
        }
      }
      out[t].push_back(std::move(o));
    }
  }
  return out;
}

double on_policy_mean(const BanditEnvironment& env, const PolicySpec& policy,
                      std::uint64_t n, std::uint64_t seed) {
  LogGenerator gen(env, policy, seed);
  LoggedInteraction r;
  CompensatedSum sum;
  for (std::uint64_t i = 0; i < n; ++i) {
    gen.next(r);
    sum.add(r.reward);
  }
  return sum.value() / static_cast<double>(n);
}

}  // namespace

std::uint64_t replication_log_seed(std::uint64_t scenario_seed,
                                   std::uint64_t sample_size,
                                   std::size_t replication) {
  return derive_seed(scenario_seed, kBenchmarkLogStream, sample_size,
                     replication);
}

std::size_t default_thread_count() {
  if (const char* env = std::getenv("OPE_NUM_THREADS")) {
    try {
      const auto v = parse_u64(env);
      if (v > 0) return static_cast<std::size_t>(v);
    } catch (const Error&) {
    }
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

std::vector<PolicySpec> make_target_family(const BanditEnvironment& env,
                                           const TargetFamilySpec& spec) {
  if (spec.count == 0) throw ConfigError("target family needs count >= 1");
  if (!(spec.temperature_min > 0.0) ||
      spec.temperature_max < spec.temperature_min) {
    throw ConfigError("target family temperatures must be positive and ordered");
  }
  if (!(spec.noise_min >= 0.0) || spec.noise_max < spec.noise_min) {
    throw ConfigError("target family noise scales must be >= 0 and ordered");
  }
  const LinearScorer base = env.true_scorer();
  Rng rng(spec.seed, {kFamilyStream});
  std::vector<PolicySpec> out;
  out.reserve(spec.count);
  for (std::size_t j = 0; j < spec.count; ++j) {
    const double frac =
        spec.count == 1 ? 0.0
                        : static_cast<double>(j) /
                              static_cast<double>(spec.count - 1);
    const double temperature =
        spec.temperature_min + frac * (spec.temperature_max - spec.temperature_min);
    const double noise =
        spec.noise_min + rng.uniform() * (spec.noise_max - spec.noise_min);
    LinearScorer scorer = base;
    for (double& w : scorer.weights) w += noise * rng.normal();
    for (double& b : scorer.bias) b += noise * rng.normal();
    out.push_back(PolicySpec::softmax(std::move(scorer), temperature));
  }
  return out;
}

std::string_view to_string(RewardModelSource source) {
  switch (source) {
    case RewardModelSource::kFitted:
      return "fitted";
    case RewardModelSource::kOracle:
      return "oracle";
    case RewardModelSource::kCorrupted:
      return "corrupted";
  }
  return "unknown";
}

RewardModelSource reward_model_source_from_string(std::string_view name) {
  if (name == "fitted") return RewardModelSource::kFitted;
  if (name == "oracle") return RewardModelSource::kOracle;
  if (name == "corrupted") return RewardModelSource::kCorrupted;
  throw ConfigError("unknown reward model source '" + std::string(name) + "'");
}

void BenchmarkScenario::validate() const {
  environment.validate();
  const std::size_t k = environment.action_count;
  if (logging_policy.action_count() != k) {
    throw ConfigError("logging policy does not match the environment");
  }
  if (target_policies.empty()) throw ConfigError("no target policies");
  for (const auto& p : target_policies) {
    if (p.action_count() != k) {
      throw ConfigError("target policy does not match the environment");
    }
  }
  if (sample_sizes.empty()) throw ConfigError("no sample sizes");
  for (std::size_t i = 0; i < sample_sizes.size(); ++i) {
    if (sample_sizes[i] == 0) throw ConfigError("sample sizes must be positive");
    if (i > 0 && sample_sizes[i] <= sample_sizes[i - 1]) {
      throw ConfigError("sample sizes must be strictly increasing");
    }
  }
  if (replications < 1) throw ConfigError("replications must be >= 1");
  if (estimators.empty()) throw ConfigError("no estimators selected");
  if (variance_target >= target_policies.size()) {
    throw ConfigError("variance_target out of range");
  }
  if (reward_model.folds == 0) throw ConfigError("reward model folds must be >= 1");
  propensity.validate();
}

BenchmarkResult run_benchmark(const BenchmarkScenario& scenario,
                              std::size_t threads) {
  scenario.validate();
  const BenchmarkScenario& s = scenario;
  BenchmarkResult result;
  result.seed = s.seed;
  for (std::size_t t = 0; t < s.target_policies.size(); ++t) {
    TruthMode mode = s.truth;
    if (mode.kind == TruthMode::Kind::kMonteCarlo) {
      mode.seed = derive_seed(s.truth.seed, kTruthStream, t, 0);
    }
    result.true_values.push_back(
        true_policy_value(s.environment, s.target_policies[t], mode));
  }

  const FixedModels fixed = make_fixed_models(s);
  std::vector<std::size_t> all_targets(s.target_policies.size());
  for (std::size_t t = 0; t < all_targets.size(); ++t) all_targets[t] = t;

  const std::size_t tasks = s.sample_sizes.size() * s.replications;
  std::vector<std::vector<std::vector<Outcome>>> outcomes(tasks);
  parallel_for(tasks, threads, [&](std::size_t task) {
    const std::size_t si = task / s.replications;
    const std::size_t rep = task % s.replications;
    const std::uint64_t n = s.sample_sizes[si];
    outcomes[task] = evaluate_replication(
        s, all_targets, n, replication_log_seed(s.seed, n, rep),
        fixed);
  });

  for (std::size_t task = 0; task < tasks; ++task) {
    const std::size_t si = task / s.replications;
    const std::size_t rep = task % s.replications;
    for (std::size_t t = 0; t < all_targets.size(); ++t) {
      for (std::size_t e = 0; e < s.estimators.size(); ++e) {
        const Outcome& o = outcomes[task][t][e];
        BenchmarkRow row;
        row.target_index = t;
        row.sample_size = s.sample_sizes[si];
        row.replication = rep;
        row.estimator = s.estimators[e];
        row.estimate = o.estimate;
        row.standard_error = o.standard_error;
        row.true_value = result.true_values[t].value;
        row.error = o.error;
        result.rows.push_back(std::move(row));
      }
    }
  }
  return result;
}

std::vector<VarianceCell> variance_sweep(const BenchmarkScenario& scenario,
                                         std::size_t threads) {
  scenario.validate();
  const BenchmarkScenario& s = scenario;
  if (s.variance_replications < 30) {
    throw ConfigError("variance sweep needs at least 30 replications per cell");
  }
  const std::size_t reps = s.variance_replications;
  const std::size_t target = s.variance_target;
  const FixedModels fixed = make_fixed_models(s);
  const std::size_t tasks = s.sample_sizes.size() * reps;
  // [task] -> estimates per estimator, then the on-policy mean last.
  std::vector<std::vector<Outcome>> outcomes(tasks);
  parallel_for(tasks, threads, [&](std::size_t task) {
    const std::size_t si = task / reps;
    const std::size_t rep = task % reps;
    const std::uint64_t n = s.sample_sizes[si];
    const std::size_t targets[] = {target};
    auto res = evaluate_replication(
        s, targets, n, derive_seed(s.seed, kSweepLogStream, n, rep), fixed);
    std::vector<Outcome> row = std::move(res.front());
    Outcome on;
    on.estimate =
        on_policy_mean(s.environment, s.target_policies[target], n,
                       derive_seed(s.seed, kSweepOnPolicyStream, n, rep));
    row.push_back(std::move(on));
    outcomes[task] = std::move(row);
  });

  std::vector<VarianceCell> cells;
  const std::size_t columns = s.estimators.size() + 1;
  for (std::size_t e = 0; e < columns; ++e) {
    for (std::size_t si = 0; si < s.sample_sizes.size(); ++si) {
      VarianceCell cell;
      cell.estimator = e < s.estimators.size()
                           ? std::string(to_string(s.estimators[e]))
                           : std::string(kOnPolicyName);
      cell.sample_size = s.sample_sizes[si];
      CompensatedSum sum;
      std::vector<double> values;
      for (std::size_t rep = 0; rep < reps; ++rep) {
        const Outcome& o = outcomes[si * reps + rep][e];
        if (!o.error.empty() || std::isnan(o.estimate)) {
          ++cell.failures;
          continue;
        }
        values.push_back(o.estimate);
        sum.add(o.estimate);
      }
      cell.replications = values.size();
      if (values.empty()) {
        cell.mean = kNaN;
        cell.variance = kNaN;
      } else {
        cell.mean = sum.value() / static_cast<double>(values.size());
        CompensatedSum sq;
        for (double v : values) sq.add((v - cell.mean) * (v - cell.mean));
        cell.variance = values.size() < 2
                            ? kNaN
                            : sq.value() / static_cast<double>(values.size() - 1);
      }
      cells.push_back(std::move(cell));
    }
  }
  return cells;
}

double pearson_correlation(std::span<const double> xs,
                           std::span<const double> ys) {
  if (xs.size() != ys.size()) throw InputError("pearson: length mismatch");
  if (xs.size() < 2) throw InputError("pearson: need at least two points");
  const double n = static_cast<double>(xs.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = xs[i] - mx;
    const double dy = ys[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) {
    throw EstimationError("pearson: correlation undefined for zero variance");
  }
  const double r = sxy / std::sqrt(sxx * syy);
  return std::clamp(r, -1.0, 1.0);
}

double rmse(std::span<const double> estimates, std::span<const double> truths) {
  if (estimates.size() != truths.size()) throw InputError("rmse: length mismatch");
  if (estimates.empty()) throw InputError("rmse: empty input");
  double sum = 0.0;
  for (std::size_t i = 0; i < estimates.size(); ++i) {
    const double d = estimates[i] - truths[i];
    sum += d * d;
  }
  return std::sqrt(sum / static_cast<double>(estimates.size()));
}

double loglog_slope(std::span<const double> ns,
                    std::span<const double> variances) {
  if (ns.size() != variances.size() || ns.size() < 2) {
    throw InputError("loglog_slope: need two or more paired points");
  }
  std::vector<double> lx;
  std::vector<double> ly;
  for (std::size_t i = 0; i < ns.size(); ++i) {
    if (!(ns[i] > 0.0) || !(variances[i] > 0.0)) {
      throw EstimationError("loglog_slope: values must be positive");
    }
    lx.push_back(std::log(ns[i]));
    ly.push_back(std::log(variances[i]));
  }
  const double m = static_cast<double>(lx.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= m;
  my /= m;
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  if (sxx == 0.0) throw EstimationError("loglog_slope: all n are equal");
  return sxy / sxx;
}

void write_results_csv(std::ostream& out, const BenchmarkResult& result) {
  out << kResultColumns << '\n';
  for (const auto& r : result.rows) {
    out << result.seed << ',' << r.target_index << ',' << r.sample_size << ','
        << r.replication << ',' << to_string(r.estimator) << ','
        << format_double(r.estimate) << ',' << format_double(r.standard_error)
        << ',' << format_double(r.true_value) << ',' << csv_escape(r.error)
        << '\n';
  }
}

void write_variance_csv(std::ostream& out,
                        const std::vector<VarianceCell>& cells) {
  out << kVarianceColumns << '\n';
  for (const auto& c : cells) {
    out << c.estimator << ',' << c.sample_size << ',' << c.replications << ','
        << format_double(c.mean) << ',' << format_double(c.variance) << ','
        << c.failures << '\n';
  }
}

namespace {

void expect_header(std::istream& in, const char* columns) {
  std::string line;
  if (!std::getline(in, line) || line != columns) {
    throw SchemaError(std::string("expected CSV header '") + columns + "'");
  }
}

}  // namespace

std::vector<BenchmarkRow> read_results_csv(std::istream& in,
                                           std::uint64_t* seed) {
  expect_header(in, kResultColumns);
  std::vector<BenchmarkRow> rows;
  std::string line;
  std::uint64_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      const auto f = split_csv_line(line);
      if (f.size() != 9) throw InputError("expected 9 fields");
      if (seed != nullptr) *seed = parse_u64(f[0]);
      BenchmarkRow r;
      r.target_index = parse_u64(f[1]);
      r.sample_size = parse_u64(f[2]);
      r.replication = parse_u64(f[3]);
      r.estimator = estimator_kind_from_string(f[4]);
      r.estimate = parse_double(f[5]);
      r.standard_error = parse_double(f[6]);
      r.true_value = parse_double(f[7]);
      r.error = f[8];
      rows.push_back(std::move(r));
    } catch (const InputError& e) {
      throw RowError(e.what(), line_no);
    }
  }
  return rows;
}

std::vector<VarianceCell> read_variance_csv(std::istream& in) {
  expect_header(in, kVarianceColumns);
  std::vector<VarianceCell> cells;
  std::string line;
  std::uint64_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      const auto f = split_csv_line(line);
      if (f.size() != 6) throw InputError("expected 6 fields");
      VarianceCell c;
      c.estimator = f[0];
      c.sample_size = parse_u64(f[1]);
      c.replications = parse_u64(f[2]);
      c.mean = parse_double(f[3]);
      c.variance = parse_double(f[4]);
      c.failures = parse_u64(f[5]);
      cells.push_back(std::move(c));
    } catch (const InputError& e) {
      throw RowError(e.what(), line_no);
    }
  }
  return cells;
}

}  // namespace ope
