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

#include "ope/config.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "ope/errors.hpp"

namespace ope {
namespace {

// Runs `fn`, converting JSON access errors and invalid values into
// ConfigError prefixed with `what`.
template <typename Fn>
auto guarded(const char* what, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string(what) + ": " + e.what());
  } catch (const InputError& e) {
    throw ConfigError(std::string(what) + ": " + e.what());
  }
}

Json number_or_null(double v) {
  if (std::isnan(v)) return nullptr;
  return v;
}

double number_or_nan(const Json& j) {
  if (j.is_null()) return std::numeric_limits<double>::quiet_NaN();
  return j.get<double>();
}

}  // namespace

Json load_json_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return Json::parse(ss.str());
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

Json to_json(const LinearScorer& s) {
  Json weights = Json::array();
  for (std::size_t a = 0; a < s.action_count; ++a) {
    Json row = Json::array();
    for (std::size_t j = 0; j < s.feature_dim; ++j) {
      row.push_back(s.weights[a * s.feature_dim + j]);
    }
    weights.push_back(std::move(row));
  }
  Json out;
  out["weights"] = std::move(weights);
  out["bias"] = s.bias;
  return out;
}

LinearScorer scorer_from_json(const Json& j) {
  return guarded("scorer", [&] {
    const auto rows = j.at("weights").get<std::vector<std::vector<double>>>();
    LinearScorer s;
    s.action_count = rows.size();
    s.feature_dim = rows.empty() ? 0 : rows.front().size();
    for (const auto& row : rows) {
      if (row.size() != s.feature_dim) {
        throw ConfigError("scorer: weight rows have different lengths");
      }
      s.weights.insert(s.weights.end(), row.begin(), row.end());
    }
    s.bias = j.contains("bias") ? j.at("bias").get<std::vector<double>>()
                                : std::vector<double>(s.action_count, 0.0);
    s.validate();
    return s;
  });
}

Json to_json(const PolicySpec& p) {
  Json out;
  out["kind"] = std::string(to_string(p.kind()));
  out["action_count"] = p.action_count();
  switch (p.kind()) {
    case PolicyKind::kTabular: {
      Json table = Json::object();
      for (const auto& [id, probs] : p.table()) table[id] = probs;
      out["table"] = std::move(table);
      break;
    }
    case PolicyKind::kEpsilonGreedy:
      out["epsilon"] = p.epsilon();
      out["scorer"] = to_json(p.scorer());
      break;
    case PolicyKind::kSoftmax:
      out["temperature"] = p.temperature();
      out["scorer"] = to_json(p.scorer());
      break;
    case PolicyKind::kDeterministic:
      out["scorer"] = to_json(p.scorer());
      break;
  }
  return out;
}

PolicySpec policy_from_json(const Json& j, const BanditEnvironment* env) {
  return guarded("policy", [&] {
    const PolicyKind kind = policy_kind_from_string(j.at("kind").get<std::string>());
    if (kind == PolicyKind::kTabular) {
      PolicySpec::Table table;
      for (const auto& [id, probs] : j.at("table").items()) {
        table[id] = probs.get<std::vector<double>>();
      }
      return PolicySpec::tabular(j.at("action_count").get<std::size_t>(),
                                 std::move(table));
    }
    LinearScorer scorer;
    const Json& sj = j.at("scorer");
    if (sj.is_string()) {
      if (sj.get<std::string>() != "environment" || env == nullptr) {
        throw ConfigError(
            "policy: scorer \"environment\" is only valid next to an "
            "environment");
      }
      scorer = env->true_scorer();
    } else {
      scorer = scorer_from_json(sj);
    }
    if (j.contains("action_count") &&
        j.at("action_count").get<std::size_t>() != scorer.action_count) {
      throw ConfigError("policy: action_count does not match the scorer");
    }
    switch (kind) {
      case PolicyKind::kEpsilonGreedy:
        return PolicySpec::epsilon_greedy(std::move(scorer),
                                          j.at("epsilon").get<double>());
      case PolicyKind::kSoftmax:
        return PolicySpec::softmax(std::move(scorer),
                                   j.value("temperature", 1.0));
      default:
        return PolicySpec::deterministic(std::move(scorer));
    }
  });
}

Json to_json(const BanditEnvironment& env) {
  Json out;
  out["action_count"] = env.action_count;
  Json ctx;
  ctx["kind"] = std::string(to_string(env.context_kind));
  Json reward;
  reward["noise"] = std::string(to_string(env.noise));
  if (env.noise == RewardNoise::kGaussian) reward["noise_stddev"] = env.noise_stddev;
  if (env.context_kind == ContextKind::kDiscrete) {
    ctx["probabilities"] = env.context_probabilities;
    Json table = Json::array();
    for (std::size_t c = 0; c < env.context_count(); ++c) {
      table.push_back(std::vector<double>(
          env.reward_table.begin() + c * env.action_count,
          env.reward_table.begin() + (c + 1) * env.action_count));
    }
    reward["table"] = std::move(table);
  } else {
    ctx["mean"] = env.context_mean;
    ctx["stddev"] = env.context_stddev;
    reward["scorer"] = to_json(env.reward_scorer);
  }
  out["context"] = std::move(ctx);
  out["reward"] = std::move(reward);
  out["seed"] = env.seed;
  return out;
}

BanditEnvironment environment_from_json(const Json& j) {
  return guarded("environment", [&] {
    const Json& ctx = j.at("context");
    const Json& reward = j.at("reward");
    const std::string noise_name = reward.value("noise", std::string("bernoulli"));
    RewardNoise noise;
    if (noise_name == "bernoulli") {
      noise = RewardNoise::kBernoulli;
    } else if (noise_name == "gaussian") {
      noise = RewardNoise::kGaussian;
    } else {
      throw ConfigError("environment: unknown reward noise '" + noise_name + "'");
    }
    const double stddev = reward.value("noise_stddev", 0.0);
    const auto seed = j.value("seed", std::uint64_t{0});
    const std::string kind = ctx.at("kind").get<std::string>();
    if (kind == "discrete") {
      const auto k = j.at("action_count").get<std::size_t>();
      const auto rows = reward.at("table").get<std::vector<std::vector<double>>>();
      std::vector<double> table;
      for (const auto& row : rows) {
        if (row.size() != k) {
          throw ConfigError("environment: reward table rows must have K entries");
        }
        table.insert(table.end(), row.begin(), row.end());
      }
      return BanditEnvironment::discrete(
          k, ctx.at("probabilities").get<std::vector<double>>(),
          std::move(table), noise, stddev, seed);
    }
    if (kind == "gaussian") {
      auto env = BanditEnvironment::gaussian(
          ctx.at("mean").get<std::vector<double>>(),
          ctx.at("stddev").get<std::vector<double>>(),
          scorer_from_json(reward.at("scorer")), noise, stddev, seed);
      if (j.contains("action_count") &&
          j.at("action_count").get<std::size_t>() != env.action_count) {
        throw ConfigError("environment: action_count does not match the scorer");
      }
      return env;
    }
    throw ConfigError("environment: unknown context kind '" + kind + "'");
  });
}

Json to_json(const PropensityConfig& c) {
  Json out;
  out["mode"] = std::string(to_string(c.mode));
  if (c.epsilon) out["epsilon"] = *c.epsilon;
  out["action_count"] = c.action_count;
  if (c.clip_max) out["clip_max"] = *c.clip_max;
  out["support_violation"] = std::string(to_string(c.support_violation));
  return out;
}

PropensityConfig propensity_from_json(const Json& j) {
  return guarded("propensity", [&] {
    PropensityConfig c;
    c.mode = propensity_mode_from_string(j.value("mode", std::string("logged")));
    if (j.contains("epsilon") && !j.at("epsilon").is_null()) {
      c.epsilon = j.at("epsilon").get<double>();
    }
    c.action_count = j.value("action_count", std::size_t{0});
    if (j.contains("clip_max") && !j.at("clip_max").is_null()) {
      c.clip_max = j.at("clip_max").get<double>();
    }
    c.support_violation = support_violation_from_string(
        j.value("support_violation", std::string("error")));
    return c;
  });
}

Json to_json(const RewardModelConfig& c) {
  Json out;
  out["source"] = std::string(to_string(c.source));
  out["kind"] = std::string(to_string(c.spec.kind));
  out["ridge_lambda"] = c.spec.ridge_lambda;
  out["buckets"] = c.spec.buckets;
  out["folds"] = c.folds;
  out["scale"] = c.scale;
  out["shift"] = c.shift;
  return out;
}

RewardModelConfig reward_model_config_from_json(const Json& j) {
  return guarded("reward_model", [&] {
    RewardModelConfig c;
    c.source = reward_model_source_from_string(
        j.value("source", std::string("fitted")));
    c.spec.kind = reward_model_kind_from_string(
        j.value("kind", std::string("ridge-linear")));
    c.spec.ridge_lambda = j.value("ridge_lambda", c.spec.ridge_lambda);
    c.spec.buckets = j.value("buckets", c.spec.buckets);
    c.folds = j.value("folds", c.folds);
    c.scale = j.value("scale", c.scale);
    c.shift = j.value("shift", c.shift);
    return c;
  });
}

Json to_json(const TargetFamilySpec& s) {
  Json out;
  out["count"] = s.count;
  out["temperature_min"] = s.temperature_min;
  out["temperature_max"] = s.temperature_max;
  out["noise_min"] = s.noise_min;
  out["noise_max"] = s.noise_max;
  out["seed"] = s.seed;
  return out;
}

TargetFamilySpec target_family_from_json(const Json& j) {
  return guarded("target_family", [&] {
    TargetFamilySpec s;
    s.count = j.value("count", s.count);
    s.temperature_min = j.value("temperature_min", s.temperature_min);
    s.temperature_max = j.value("temperature_max", s.temperature_max);
    s.noise_min = j.value("noise_min", s.noise_min);
    s.noise_max = j.value("noise_max", s.noise_max);
    s.seed = j.value("seed", s.seed);
    return s;
  });
}

Json to_json(const EstimateReport& r) {
  Json out;
  out["estimator"] = std::string(to_string(r.estimator));
  out["point_estimate"] = number_or_null(r.point_estimate);
  out["standard_error"] = number_or_null(r.standard_error);
  out["n"] = r.n;
  out["effective_sample_size"] = number_or_null(r.effective_sample_size);
  out["clip_fraction"] = r.clip_fraction;
  out["skipped_records"] = r.skipped_records;
  return out;
}

EstimateReport report_from_json(const Json& j) {
  return guarded("report", [&] {
    EstimateReport r;
    r.estimator = estimator_kind_from_string(j.at("estimator").get<std::string>());
    r.point_estimate = number_or_nan(j.at("point_estimate"));
    r.standard_error = number_or_nan(j.at("standard_error"));
    r.n = j.at("n").get<std::uint64_t>();
    r.effective_sample_size = number_or_nan(j.at("effective_sample_size"));
    r.clip_fraction = j.at("clip_fraction").get<double>();
    r.skipped_records = j.at("skipped_records").get<std::uint64_t>();
    return r;
  });
}

Json to_json(const LoggedInteraction& r) {
  Json out;
  out["context_id"] = r.context_id;
  out["features"] = r.features;
  out["action"] = r.action;
  out["reward"] = r.reward;
  if (r.logging_propensity) out["logging_propensity"] = *r.logging_propensity;
  if (r.explored) out["explored"] = *r.explored;
  return out;
}

LoggedInteraction record_from_json(const Json& j) {
  return guarded("record", [&] {
    LoggedInteraction r;
    r.context_id = j.value("context_id", std::string());
    r.features = j.value("features", std::vector<double>{});
    r.action = j.at("action").get<Action>();
    r.reward = j.at("reward").get<double>();
    if (j.contains("logging_propensity")) {
      r.logging_propensity = j.at("logging_propensity").get<double>();
    }
    if (j.contains("explored")) r.explored = j.at("explored").get<bool>();
    return r;
  });
}

BenchmarkScenario scenario_from_json(const Json& j) {
  return guarded("scenario", [&] {
    BenchmarkScenario s;
    s.seed = j.at("seed").get<std::uint64_t>();
    s.environment = environment_from_json(j.at("environment"));
    s.logging_policy = policy_from_json(j.at("logging_policy"), &s.environment);
    if (j.contains("target_policies")) {
      for (const auto& p : j.at("target_policies")) {
        s.target_policies.push_back(policy_from_json(p, &s.environment));
      }
    }
    if (j.contains("target_family")) {
      for (auto& p : make_target_family(
               s.environment, target_family_from_json(j.at("target_family")))) {
        s.target_policies.push_back(std::move(p));
      }
    }
    s.sample_sizes = j.at("sample_sizes").get<std::vector<std::uint64_t>>();
    s.replications = j.value("replications", std::size_t{1});
    for (const auto& e : j.at("estimators")) {
      s.estimators.push_back(estimator_kind_from_string(e.get<std::string>()));
    }
    if (j.contains("propensity")) {
      s.propensity = propensity_from_json(j.at("propensity"));
    }
    if (s.propensity.mode != PropensityMode::kLogged &&
        s.propensity.action_count == 0) {
      s.propensity.action_count = s.environment.action_count;
    }
    if (j.contains("reward_model")) {
      s.reward_model = reward_model_config_from_json(j.at("reward_model"));
    }
    if (j.contains("truth")) {
      const Json& t = j.at("truth");
      const std::string mode = t.value("mode", std::string("exact"));
      if (mode == "exact") {
        s.truth = TruthMode::exact();
      } else if (mode == "monte-carlo") {
        s.truth = TruthMode::monte_carlo(t.at("samples").get<std::uint64_t>(),
                                         t.value("seed", s.seed));
      } else {
        throw ConfigError("scenario: unknown truth mode '" + mode + "'");
      }
    } else if (s.environment.context_kind == ContextKind::kGaussian) {
      s.truth = TruthMode::monte_carlo(1000000, s.seed);
    }
    if (j.contains("variance_sweep")) {
      const Json& v = j.at("variance_sweep");
      s.run_variance_sweep = true;
      s.variance_replications = v.value("replications", s.variance_replications);
      s.variance_target = v.value("target", s.variance_target);
    }
    s.validate();
    return s;
  });
}

Json to_json(const BenchmarkScenario& s) {
  Json out;
  out["seed"] = s.seed;
  out["environment"] = to_json(s.environment);
  out["logging_policy"] = to_json(s.logging_policy);
  Json targets = Json::array();
  for (const auto& p : s.target_policies) targets.push_back(to_json(p));
  out["target_policies"] = std::move(targets);
  out["sample_sizes"] = s.sample_sizes;
  out["replications"] = s.replications;
  Json est = Json::array();
  for (EstimatorKind e : s.estimators) est.push_back(std::string(to_string(e)));
  out["estimators"] = std::move(est);
  out["propensity"] = to_json(s.propensity);
  out["reward_model"] = to_json(s.reward_model);
  Json truth;
  if (s.truth.kind == TruthMode::Kind::kExact) {
    truth["mode"] = "exact";
  } else {
    truth["mode"] = "monte-carlo";
    truth["samples"] = s.truth.samples;
    truth["seed"] = s.truth.seed;
  }
  out["truth"] = std::move(truth);
  if (s.run_variance_sweep) {
    out["variance_sweep"] = {{"replications", s.variance_replications},
                             {"target", s.variance_target}};
  }
  return out;
}

SimulationConfig simulation_from_json(const Json& j) {
  return guarded("simulation", [&] {
    SimulationConfig c;
    c.seed = j.at("seed").get<std::uint64_t>();
    c.n = j.at("n").get<std::uint64_t>();
    c.environment = environment_from_json(j.at("environment"));
    c.logging_policy = policy_from_json(j.at("logging_policy"), &c.environment);
    if (j.contains("format")) {
      c.format = log_format_from_string(j.at("format").get<std::string>());
    }
    c.reward_kind = j.value(
        "reward_kind",
        std::string(c.environment.noise == RewardNoise::kBernoulli ? "binary"
                                                                   : "real"));
    if (c.logging_policy.action_count() != c.environment.action_count) {
      throw ConfigError("simulation: logging policy does not match environment");
    }
    return c;
  });
}

LogHeader simulation_header(const SimulationConfig& c) {
  LogHeader h;
  h.action_count = c.environment.action_count;
  h.feature_dim = c.environment.feature_dim();
  h.reward_kind = c.reward_kind;
  if (c.logging_policy.kind() == PolicyKind::kEpsilonGreedy &&
      c.logging_policy.epsilon() > 0.0) {
    h.epsilon = c.logging_policy.epsilon();
  }
  h.normalize();
  return h;
}

}  // namespace ope
