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

#ifndef OPE_LOG_IO_HPP_
#define OPE_LOG_IO_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ope/core.hpp"

namespace ope {

enum class LogFormat { kJsonl, kCsv };

std::string_view to_string(LogFormat format);
LogFormat log_format_from_string(std::string_view name);
// ".csv" means CSV; anything else is JSONL.
LogFormat log_format_from_path(const std::filesystem::path& path);

inline constexpr int kLogSchemaVersion = 1;

// Dataset metadata stored in the first line of every log file.
struct LogHeader {
  int schema_version = kLogSchemaVersion;
  std::size_t action_count = 0;
  std::size_t feature_dim = 0;
  std::vector<std::string> feature_names;  // defaults to f0..f{d-1}
  std::string reward_kind = "real";        // "binary" or "real"
  std::optional<double> epsilon;
  std::vector<std::string> action_labels;  // optional, K entries

  // Fills default feature names and checks sizes; throws SchemaError.
  void normalize();
  bool operator==(const LogHeader&) const = default;
};

// Writes `path` through a temporary sibling that is renamed into place by
// commit(). If commit() is never reached the temporary is removed, so a
// failed command leaves no partial output behind.
class AtomicFile {
 public:
  explicit AtomicFile(std::filesystem::path path);
  ~AtomicFile();
  AtomicFile(const AtomicFile&) = delete;
  AtomicFile& operator=(const AtomicFile&) = delete;

  std::ostream& stream() { return out_; }
  void commit();

 private:
  std::filesystem::path path_;
  std::filesystem::path temp_;
  std::ofstream out_;
  bool committed_ = false;
};

// Writes a whole string atomically.
void write_file_atomic(const std::filesystem::path& path,
                       const std::string& contents);

// Line formats. JSONL:
//   {"schema_version":1,"action_count":K,"feature_dim":d,"feature_names":[..],
//    "reward_kind":"binary","epsilon":0.05,"action_labels":[..]}
//   {"context_id":"c0","features":[..],"action":1,"reward":1,
//    "logging_propensity":0.925,"explored":false}
// CSV: "#ope-log " followed by the same header object, a column line
//   context_id,action,reward,logging_propensity,explored,<feature names>
// and one row per record; absent optional values are empty fields.
// Reals use 17 significant digits.
std::string format_header_json(const LogHeader& header);
std::string format_record_jsonl(const LoggedInteraction& record);
std::string format_record_csv(const LoggedInteraction& record);

class LogWriter {
 public:
  LogWriter(const std::filesystem::path& path, LogHeader header,
            LogFormat format);

  void write(const LoggedInteraction& record);
  void commit();

 private:
  LogHeader header_;
  LogFormat format_;
  AtomicFile file_;
};

void write_log(const std::filesystem::path& path, const LogHeader& header,
               std::span<const LoggedInteraction> records, LogFormat format);

enum class ReadMode { kStrict, kLenient };

// Streams records without loading the file. In strict mode a malformed row
// throws RowError naming the line; in lenient mode it is counted, its first
// few messages kept, and skipped.
class LogReader {
 public:
  LogReader(const std::filesystem::path& path, LogFormat format,
            ReadMode mode = ReadMode::kStrict);

  const LogHeader& header() const { return header_; }
  bool next(LoggedInteraction& out);

  std::uint64_t records_read() const { return records_; }
  std::uint64_t malformed_rows() const { return malformed_; }
  const std::vector<std::string>& messages() const { return messages_; }

 private:
  bool parse_row(const std::string& line, LoggedInteraction& out);
  void parse_csv_columns(const std::string& line);

  std::filesystem::path path_;
  LogFormat format_;
  ReadMode mode_;
  std::ifstream in_;
  LogHeader header_;
  std::uint64_t line_ = 0;
  std::uint64_t records_ = 0;
  std::uint64_t malformed_ = 0;
  std::vector<std::string> messages_;
  // CSV column positions; -1 when absent.
  int col_context_ = -1;
  int col_action_ = -1;
  int col_reward_ = -1;
  int col_propensity_ = -1;
  int col_explored_ = -1;
  std::vector<int> col_features_;
  std::size_t column_count_ = 0;
};

struct LoadedLog {
  LogHeader header;
  std::vector<LoggedInteraction> records;
};

LoadedLog read_log(const std::filesystem::path& path, LogFormat format,
                   ReadMode mode = ReadMode::kStrict);

}  // namespace ope

#endif  // OPE_LOG_IO_HPP_
