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

#include "ope/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "ope/benchmark.hpp"
#include "ope/config.hpp"
#include "ope/errors.hpp"
#include "ope/estimators.hpp"
#include "ope/log_io.hpp"
#include "ope/report.hpp"
#include "ope/reward_model.hpp"
#include "ope/simulator.hpp"
#include "ope/text.hpp"

namespace ope {
namespace {

namespace fs = std::filesystem;

struct SimulateArgs {
  std::string config;
  std::string out;
  std::string format;
};

struct EstimateArgs {
  std::string log;
  std::string format;
  std::string target_policy;
  std::vector<std::string> estimators{"ips", "snips"};
  std::string propensity = "logged";
  std::optional<double> epsilon;
  std::optional<double> clip;
  std::string support_violation = "error";
  std::string logging_policy;
  std::string reward_model = "ridge-linear";
  double ridge_lambda = 1e-3;
  std::size_t buckets = 64;
  std::size_t folds = 2;
  std::string reward_model_file;
  std::size_t bootstrap = 0;
  std::uint64_t bootstrap_seed = 0;
  bool lenient = false;
  std::string out;
};

struct BenchmarkArgs {
  std::string scenario;
  std::string out_dir;
  std::size_t threads = 0;
};

struct ReportArgs {
  std::string results;
  std::string variance;
  std::string out;
};

LogFormat resolve_format(const std::string& flag, const fs::path& path) {
  return flag.empty() ? log_format_from_path(path) : log_format_from_string(flag);
}

int run_simulate(const SimulateArgs& args, std::ostream& out) {
  const SimulationConfig cfg = simulation_from_json(load_json_file(args.config));
  const fs::path path(args.out);
  // Precedence: --format, then a recognized extension, then the config.
  LogFormat format = LogFormat::kJsonl;
  if (!args.format.empty()) {
    format = log_format_from_string(args.format);
  } else if (path.extension() == ".csv" || path.extension() == ".jsonl") {
    format = log_format_from_path(path);
  } else if (cfg.format) {
    format = *cfg.format;
  }
  LogWriter writer(path, simulation_header(cfg), format);
  LogGenerator gen(cfg.environment, cfg.logging_policy, cfg.seed);
  LoggedInteraction r;
  for (std::uint64_t i = 0; i < cfg.n; ++i) {
    gen.next(r);
    writer.write(r);
  }
  writer.commit();
  out << "wrote " << cfg.n << " records to " << path.string() << "\n";
  return kExitOk;
}

int run_estimate(const EstimateArgs& args, std::ostream& out, std::ostream& err) {
  const fs::path log_path(args.log);
  const LogFormat format = resolve_format(args.format, log_path);
  const ReadMode mode = args.lenient ? ReadMode::kLenient : ReadMode::kStrict;

  std::vector<EstimatorKind> kinds;
  for (const auto& name : args.estimators) {
    kinds.push_back(estimator_kind_from_string(name));
  }
  if (kinds.empty()) throw ConfigError("no estimators selected");
  bool needs_model = false;
  for (EstimatorKind k : kinds) {
    needs_model |= k == EstimatorKind::kDM || k == EstimatorKind::kDR ||
                   k == EstimatorKind::kBlend;
  }

  LogHeader header = LogReader(log_path, format, mode).header();
  const PolicySpec target = policy_from_json(load_json_file(args.target_policy));
  if (target.action_count() != header.action_count) {
    throw InputError("target policy has " + std::to_string(target.action_count()) +
                     " actions but the log declares " +
                     std::to_string(header.action_count));
  }

  PropensityConfig pcfg;
  pcfg.mode = propensity_mode_from_string(args.propensity);
  pcfg.action_count = header.action_count;
  pcfg.clip_max = args.clip;
  pcfg.support_violation = support_violation_from_string(args.support_violation);
  if (pcfg.mode != PropensityMode::kLogged) {
    pcfg.epsilon = args.epsilon ? args.epsilon : header.epsilon;
  }
  pcfg.validate();

  std::optional<PolicySpec> logging;
  if (!args.logging_policy.empty()) {
    logging = policy_from_json(load_json_file(args.logging_policy));
  }
  if (pcfg.mode == PropensityMode::kEpsilonGreedyRecovery && !logging) {
    throw ConfigError(
        "--propensity epsilon-greedy needs --logging-policy (the base model)");
  }
  const LinearScorer* base = logging && logging->kind() != PolicyKind::kTabular
                                 ? &logging->scorer()
                                 : nullptr;

  std::optional<RewardModel> loaded_model;
  std::unique_ptr<CrossFitModels> cross;
  RewardSource source;
  if (needs_model) {
    if (!args.reward_model_file.empty()) {
      loaded_model = RewardModel::load(args.reward_model_file);
      source = RewardSource(*loaded_model);
    } else {
      RewardModelSpec spec;
      spec.kind = reward_model_kind_from_string(args.reward_model);
      spec.ridge_lambda = args.ridge_lambda;
      spec.buckets = args.buckets;
      cross = std::make_unique<CrossFitModels>(spec, header.action_count,
                                               header.feature_dim, args.folds);
      LogReader reader(log_path, format, mode);
      LoggedInteraction r;
      std::uint64_t i = 0;
      while (reader.next(r)) cross->add(r, i++);
      cross->finish();
      source = RewardSource(*cross);
    }
  }

  EstimationSetup setup{&target, pcfg, base, source};
  EvaluationFold fold(setup, kinds);
  LogReader reader(log_path, format, mode);
  LoggedInteraction r;
  std::uint64_t index = 0;
  while (reader.next(r)) fold.add(r, index++);
  if (reader.malformed_rows() > 0) {
    err << "skipped " << reader.malformed_rows() << " malformed rows\n";
    for (const auto& m : reader.messages()) err << "  " << m << "\n";
  }
  const std::vector<EstimateReport> reports = fold.reports();

  std::vector<std::pair<EstimatorKind, BootstrapInterval>> intervals;
  if (args.bootstrap > 0) {
    const LoadedLog all = read_log(log_path, format, mode);
    for (EstimatorKind k : kinds) {
      intervals.emplace_back(k, bootstrap_estimate(k, all.records, setup,
                                                   args.bootstrap,
                                                   args.bootstrap_seed));
    }
  }

  out << format_report_table(reports);
  for (const auto& [k, b] : intervals) {
    out << "bootstrap " << to_string(k) << ": [" << format_double(b.lower)
        << ", " << format_double(b.upper) << "] from " << b.resamples
        << " resamples\n";
  }

  if (!args.out.empty()) {
    const fs::path out_path(args.out);
    std::string contents;
    if (out_path.extension() == ".csv") {
      contents = format_reports_csv(reports);
    } else {
      Json doc = Json::parse(format_reports_json(reports));
      if (!intervals.empty()) {
        Json list = Json::array();
        for (const auto& [k, b] : intervals) {
          Json item;
          item["estimator"] = std::string(to_string(k));
          item["lower"] = b.lower;
          item["upper"] = b.upper;
          item["standard_error"] = b.standard_error;
          item["resamples"] = b.resamples;
          list.push_back(std::move(item));
        }
        doc["bootstrap"] = std::move(list);
      }
      contents = doc.dump(2) + "\n";
    }
    write_file_atomic(out_path, contents);
  }
  return kExitOk;
}

int run_benchmark_cmd(const BenchmarkArgs& args, std::ostream& out) {
  const BenchmarkScenario scenario =
      scenario_from_json(load_json_file(args.scenario));
  const fs::path dir(args.out_dir);
  // Compute everything before touching the output directory.
  const BenchmarkResult result = run_benchmark(scenario, args.threads);
  std::optional<std::vector<VarianceCell>> cells;
  if (scenario.run_variance_sweep) cells = variance_sweep(scenario, args.threads);

  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  std::ostringstream results;
  write_results_csv(results, result);
  write_file_atomic(dir / "results.csv", results.str());
  std::string truths = "target,true_value,standard_error\n";
  for (std::size_t t = 0; t < result.true_values.size(); ++t) {
    truths += std::to_string(t) + ',' +
              format_double(result.true_values[t].value) + ',' +
              format_double(result.true_values[t].standard_error) + '\n';
  }
  write_file_atomic(dir / "truth.csv", truths);
  if (cells) {
    std::ostringstream v;
    write_variance_csv(v, *cells);
    write_file_atomic(dir / "variance.csv", v.str());
  }
  out << "wrote " << result.rows.size() << " result rows to "
      << (dir / "results.csv").string() << "\n";
  return kExitOk;
}

int run_report(const ReportArgs& args, std::ostream& out) {
  std::ifstream in(args.results, std::ios::binary);
  if (!in) throw IoError("cannot read " + args.results);
  const auto rows = read_results_csv(in);
  std::optional<std::vector<VarianceCell>> cells;
  if (!args.variance.empty()) {
    std::ifstream vin(args.variance, std::ios::binary);
    if (!vin) throw IoError("cannot read " + args.variance);
    cells = read_variance_csv(vin);
  }
  write_report(args.out, rows, cells);
  out << format_summary_csv(summarize_agreement(rows));
  return kExitOk;
}

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out,
             std::ostream& err) {
  CLI::App app{"Off-policy evaluation of logged bandit feedback", "ope"};
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Generate a synthetic log");
  simulate->add_option("--config", sim.config, "Simulation config (JSON)")
      ->required()
      ->check(CLI::ExistingFile);
  simulate->add_option("--out", sim.out, "Output log path")->required();
  simulate->add_option("--format", sim.format, "jsonl or csv (default: from --out)");

  EstimateArgs est;
  auto* estimate = app.add_subcommand("estimate", "Estimate a target policy's value");
  estimate->add_option("--log", est.log, "Logged interactions")
      ->required()
      ->check(CLI::ExistingFile);
  estimate->add_option("--format", est.format, "jsonl or csv (default: from --log)");
  estimate->add_option("--target-policy", est.target_policy, "Target policy (JSON)")
      ->required()
      ->check(CLI::ExistingFile);
  estimate->add_option("--estimators", est.estimators, "Comma-separated list of ips,snips,dm,dr,blend")
      ->delimiter(',');
  estimate->add_option("--propensity", est.propensity,
                       "logged, epsilon-greedy or exploration-only");
  estimate->add_option("--epsilon", est.epsilon, "Exploration rate (default: log header)");
  estimate->add_option("--clip", est.clip, "Clip importance weights at this value (> 1)");
  estimate->add_option("--support-violation", est.support_violation, "error or skip");
  estimate->add_option("--logging-policy", est.logging_policy,
                       "Logging policy whose scorer is the epsilon-greedy base model")
      ->check(CLI::ExistingFile);
  estimate->add_option("--reward-model", est.reward_model, "ridge-linear or tabular-mean");
  estimate->add_option("--ridge-lambda", est.ridge_lambda, "Ridge penalty");
  estimate->add_option("--buckets", est.buckets, "Context buckets for tabular-mean");
  estimate->add_option("--folds", est.folds, "Cross-fitting folds (1 disables)");
  estimate->add_option("--reward-model-file", est.reward_model_file,
                       "Use a saved reward model instead of fitting one")
      ->check(CLI::ExistingFile);
  estimate->add_option("--bootstrap", est.bootstrap,
                       "Percentile bootstrap resamples (loads the log into memory)");
  estimate->add_option("--bootstrap-seed", est.bootstrap_seed, "Bootstrap seed");
  estimate->add_flag("--lenient", est.lenient, "Skip malformed rows instead of failing");
  estimate->add_option("--out", est.out, "Report path (.json or .csv)");

  BenchmarkArgs bench;
  auto* benchmark = app.add_subcommand("benchmark", "Run a benchmark scenario");
  benchmark->add_option("--scenario", bench.scenario, "Scenario (JSON)")
      ->required()
      ->check(CLI::ExistingFile);
  benchmark->add_option("--out-dir", bench.out_dir, "Output directory")->required();
  benchmark->add_option("--threads", bench.threads,
                        "Worker threads (default: $OPE_NUM_THREADS or all cores)");

  ReportArgs rep;
  auto* report = app.add_subcommand("report", "Summarize benchmark results");
  report->add_option("--results", rep.results, "results.csv from benchmark")
      ->required()
      ->check(CLI::ExistingFile);
  report->add_option("--variance", rep.variance, "variance.csv from benchmark")
      ->check(CLI::ExistingFile);
  report->add_option("--out", rep.out, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*simulate) return run_simulate(sim, out);
    if (*estimate) return run_estimate(est, out, err);
    if (*benchmark) return run_benchmark_cmd(bench, out);
    if (*report) return run_report(rep, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitDataError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitDataError;
  }
  return kExitUsage;
}

int cli_main(const std::vector<std::string>& args, std::ostream& out,
             std::ostream& err) {
  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  argv.push_back("ope");
  for (const auto& a : args) argv.push_back(a.c_str());
  return cli_main(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace ope
