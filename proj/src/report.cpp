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

#include "ope/report.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <sstream>

#include "ope/config.hpp"
#include "ope/errors.hpp"
#include "ope/log_io.hpp"
#include "ope/svg.hpp"
#include "ope/text.hpp"

namespace ope {

std::string format_reports_json(std::span<const EstimateReport> reports) {
  Json doc;
  doc["schema_version"] = 1;
  Json list = Json::array();
  for (const auto& r : reports) list.push_back(to_json(r));
  doc["reports"] = std::move(list);
  return doc.dump(2) + "\n";
}

std::vector<EstimateReport> parse_reports_json(const std::string& text) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("report document: ") + e.what());
  }
  if (doc.value("schema_version", 0) != 1) {
    throw SchemaError("report document: unsupported schema version");
  }
  std::vector<EstimateReport> out;
  for (const auto& r : doc.at("reports")) out.push_back(report_from_json(r));
  return out;
}

std::string format_report_csv_row(const EstimateReport& r) {
  return std::string(to_string(r.estimator)) + ',' +
         format_double(r.point_estimate) + ',' +
         format_double(r.standard_error) + ',' + std::to_string(r.n) + ',' +
         format_double(r.effective_sample_size) + ',' +
         format_double(r.clip_fraction) + ',' +
         std::to_string(r.skipped_records);
}

std::string format_reports_csv(std::span<const EstimateReport> reports) {
  std::string out = std::string(kReportColumns) + "\n";
  for (const auto& r : reports) out += format_report_csv_row(r) + "\n";
  return out;
}

std::string format_report_table(std::span<const EstimateReport> reports) {
  std::string out;
  char buf[160];
  std::snprintf(buf, sizeof(buf), "%-9s %12s %12s %12s %12s %8s %9s\n",
                "estimator", "estimate", "std_error", "n", "ess", "clipped",
                "skipped");
  out += buf;
  for (const auto& r : reports) {
    std::snprintf(buf, sizeof(buf),
                  "%-9s %12.4f %12.4f %12llu %12.1f %8.4f %9llu\n",
                  std::string(to_string(r.estimator)).c_str(), r.point_estimate,
                  r.standard_error, static_cast<unsigned long long>(r.n),
                  r.effective_sample_size, r.clip_fraction,
                  static_cast<unsigned long long>(r.skipped_records));
    out += buf;
  }
  return out;
}

std::vector<AgreementSummary> summarize_agreement(
    std::span<const BenchmarkRow> rows) {
  // Keyed by (sample size, estimator) so the output order is stable.
  std::map<std::pair<std::uint64_t, int>, std::vector<const BenchmarkRow*>> groups;
  for (const auto& r : rows) {
    groups[{r.sample_size, static_cast<int>(r.estimator)}].push_back(&r);
  }
  std::vector<AgreementSummary> out;
  for (const auto& [key, members] : groups) {
    AgreementSummary s;
    s.sample_size = key.first;
    s.estimator = static_cast<EstimatorKind>(key.second);
    std::vector<double> est;
    std::vector<double> truth;
    for (const BenchmarkRow* r : members) {
      if (!r->error.empty() || std::isnan(r->estimate)) {
        ++s.failures;
        continue;
      }
      est.push_back(r->estimate);
      truth.push_back(r->true_value);
    }
    s.pairs = est.size();
    const double nan = std::numeric_limits<double>::quiet_NaN();
    s.pearson = nan;
    s.rmse = nan;
    s.mean_error = nan;
    if (!est.empty()) {
      s.rmse = rmse(est, truth);
      double total = 0.0;
      for (std::size_t i = 0; i < est.size(); ++i) total += est[i] - truth[i];
      s.mean_error = total / static_cast<double>(est.size());
      try {
        s.pearson = pearson_correlation(est, truth);
      } catch (const Error&) {
      }
    }
    out.push_back(s);
  }
  return out;
}

std::string format_summary_csv(std::span<const AgreementSummary> summary) {
  std::string out = std::string(kSummaryColumns) + "\n";
  for (const auto& s : summary) {
    out += std::string(to_string(s.estimator)) + ',' +
           std::to_string(s.sample_size) + ',' + std::to_string(s.pairs) + ',' +
           std::to_string(s.failures) + ',' + format_double(s.pearson) + ',' +
           format_double(s.rmse) + ',' + format_double(s.mean_error) + "\n";
  }
  return out;
}

void write_report(const std::filesystem::path& out_dir,
                  std::span<const BenchmarkRow> rows,
                  const std::optional<std::vector<VarianceCell>>& variance) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create " + out_dir.string() + ": " + ec.message());

  const auto summary = summarize_agreement(rows);
  // Render everything first so that a failure leaves no partial output.
  std::vector<std::pair<std::filesystem::path, std::string>> files;
  files.emplace_back(out_dir / "summary.csv", format_summary_csv(summary));

  std::map<std::uint64_t, std::map<int, SvgSeries>> by_size;
  for (const auto& r : rows) {
    if (!r.error.empty() || std::isnan(r.estimate)) continue;
    auto& s = by_size[r.sample_size][static_cast<int>(r.estimator)];
    s.name = std::string(to_string(r.estimator));
    s.points.emplace_back(r.true_value, r.estimate);
  }
  for (auto& [n, series_map] : by_size) {
    SvgChart chart;
    chart.title = "Estimate vs on-policy value, n = " + std::to_string(n);
    chart.x_label = "true policy value";
    chart.y_label = "off-policy estimate";
    chart.diagonal = true;
    for (auto& [kind, s] : series_map) chart.series.push_back(std::move(s));
    files.emplace_back(out_dir / ("agreement_" + std::to_string(n) + ".svg"),
                       chart.render());
  }
  if (variance) {
    std::map<std::string, SvgSeries> curves;
    for (const auto& c : *variance) {
      auto& s = curves[c.estimator];
      s.name = c.estimator;
      s.connect = true;
      s.points.emplace_back(static_cast<double>(c.sample_size), c.variance);
    }
    SvgChart chart;
    chart.title = "Replication variance vs sample size";
    chart.x_label = "records (log scale)";
    chart.y_label = "variance (log scale)";
    chart.log_x = true;
    chart.log_y = true;
    for (auto& [name, s] : curves) chart.series.push_back(std::move(s));
    files.emplace_back(out_dir / "variance.svg", chart.render());
  }
  for (const auto& [path, contents] : files) write_file_atomic(path, contents);
}

}  // namespace ope
