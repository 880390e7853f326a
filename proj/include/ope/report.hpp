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

#ifndef OPE_REPORT_HPP_
#define OPE_REPORT_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ope/benchmark.hpp"
#include "ope/core.hpp"

namespace ope {

// {"schema_version": 1, "reports": [{"estimator", "point_estimate",
//  "standard_error", "n", "effective_sample_size", "clip_fraction",
//  "skipped_records"}, ...]}; undefined reals are null.
std::string format_reports_json(std::span<const EstimateReport> reports);
std::vector<EstimateReport> parse_reports_json(const std::string& text);

inline constexpr const char* kReportColumns =
    "estimator,point_estimate,standard_error,n,effective_sample_size,"
    "clip_fraction,skipped_records";

// One line per report in kReportColumns order, no header.
std::string format_report_csv_row(const EstimateReport& report);
std::string format_reports_csv(std::span<const EstimateReport> reports);

// Fixed-width table for terminals; estimates to 4 decimals.
std::string format_report_table(std::span<const EstimateReport> reports);

// Agreement of one estimator with the truth at one sample size, pooled over
// targets and replications.
struct AgreementSummary {
  EstimatorKind estimator = EstimatorKind::kIPS;
  std::uint64_t sample_size = 0;
  std::size_t pairs = 0;
  std::size_t failures = 0;
  double pearson = 0.0;  // NaN when undefined
  double rmse = 0.0;
  double mean_error = 0.0;
};

std::vector<AgreementSummary> summarize_agreement(
    std::span<const BenchmarkRow> rows);

inline constexpr const char* kSummaryColumns =
    "estimator,sample_size,pairs,failures,pearson,rmse,mean_error";
std::string format_summary_csv(std::span<const AgreementSummary> summary);

// Writes summary.csv, agreement_<n>.svg for every sample size and, when
// variance cells are given, variance.svg into `out_dir`.
void write_report(const std::filesystem::path& out_dir,
                  std::span<const BenchmarkRow> rows,
                  const std::optional<std::vector<VarianceCell>>& variance);

}  // namespace ope

#endif  // OPE_REPORT_HPP_
