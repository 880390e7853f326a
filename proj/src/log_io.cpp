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

#include "ope/log_io.hpp"

#include <unistd.h>

#include <cmath>
#include <system_error>

#include "json.hpp"
#include "ope/errors.hpp"
#include "ope/text.hpp"

namespace ope {
namespace {

constexpr const char* kCsvHeaderPrefix = "#ope-log ";
constexpr std::size_t kMaxMessages = 10;

std::string json_string(const std::string& s) { return nlohmann::json(s).dump(); }

std::string json_string_array(const std::vector<std::string>& items) {
  std::string out = "[";
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i > 0) out += ',';
    out += json_string(items[i]);
  }
  return out + "]";
}

bool parse_bool(std::string_view text) {
  if (text == "true" || text == "1") return true;
  if (text == "false" || text == "0") return false;
  throw InputError("not a boolean: '" + std::string(text) + "'");
}

LogHeader parse_header(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("log header is not valid JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("schema_version")) {
    throw SchemaError("log header lacks schema_version");
  }
  LogHeader h;
  try {
    h.schema_version = doc.at("schema_version").get<int>();
    if (h.schema_version != kLogSchemaVersion) {
      throw SchemaError("unsupported log schema version " +
                        std::to_string(h.schema_version));
    }
    h.action_count = doc.at("action_count").get<std::size_t>();
    h.feature_dim = doc.at("feature_dim").get<std::size_t>();
    if (doc.contains("feature_names")) {
      h.feature_names = doc.at("feature_names").get<std::vector<std::string>>();
    }
    if (doc.contains("reward_kind")) {
      h.reward_kind = doc.at("reward_kind").get<std::string>();
    }
    if (doc.contains("epsilon") && !doc.at("epsilon").is_null()) {
      h.epsilon = doc.at("epsilon").get<double>();
    }
    if (doc.contains("action_labels")) {
      h.action_labels = doc.at("action_labels").get<std::vector<std::string>>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("log header: ") + e.what());
  }
  h.normalize();
  return h;
}

void check_record(const LoggedInteraction& r, const LogHeader& h) {
  if (r.features.size() != h.feature_dim) {
    throw InputError("expected " + std::to_string(h.feature_dim) +
                     " features, got " + std::to_string(r.features.size()));
  }
  validate_record(r, h.action_count);
}

}  // namespace

std::string_view to_string(LogFormat format) {
  return format == LogFormat::kCsv ? "csv" : "jsonl";
}

LogFormat log_format_from_string(std::string_view name) {
  if (name == "csv") return LogFormat::kCsv;
  if (name == "jsonl") return LogFormat::kJsonl;
  throw ConfigError("unknown log format '" + std::string(name) + "'");
}

LogFormat log_format_from_path(const std::filesystem::path& path) {
  return path.extension() == ".csv" ? LogFormat::kCsv : LogFormat::kJsonl;
}

void LogHeader::normalize() {
  if (schema_version != kLogSchemaVersion) {
    throw SchemaError("unsupported log schema version " +
                      std::to_string(schema_version));
  }
  if (action_count == 0) throw SchemaError("log header needs action_count >= 1");
  if (feature_names.empty()) {
    for (std::size_t j = 0; j < feature_dim; ++j) {
      feature_names.push_back("f" + std::to_string(j));
    }
  }
  if (feature_names.size() != feature_dim) {
    throw SchemaError("feature_names must have feature_dim entries");
  }
  if (!action_labels.empty() && action_labels.size() != action_count) {
    throw SchemaError("action_labels must have action_count entries");
  }
  if (reward_kind != "binary" && reward_kind != "real") {
    throw SchemaError("reward_kind must be 'binary' or 'real'");
  }
  if (epsilon && !(*epsilon > 0.0 && *epsilon <= 1.0)) {
    throw SchemaError("header epsilon must lie in (0, 1]");
  }
}

AtomicFile::AtomicFile(std::filesystem::path path) : path_(std::move(path)) {
  temp_ = path_;
  temp_ += ".tmp-" + std::to_string(::getpid());
  out_.open(temp_, std::ios::binary | std::ios::trunc);
  if (!out_) throw IoError("cannot open " + temp_.string() + " for writing");
}

AtomicFile::~AtomicFile() {
  if (!committed_) {
    out_.close();
    std::error_code ec;
    std::filesystem::remove(temp_, ec);
  }
}

void AtomicFile::commit() {
  out_.flush();
  if (!out_) throw IoError("failed writing " + temp_.string());
  out_.close();
  std::error_code ec;
  std::filesystem::rename(temp_, path_, ec);
  if (ec) {
    throw IoError("cannot move output into place at " + path_.string() + ": " +
                  ec.message());
  }
  committed_ = true;
}

void write_file_atomic(const std::filesystem::path& path,
                       const std::string& contents) {
  AtomicFile f(path);
  f.stream() << contents;
  f.commit();
}

std::string format_header_json(const LogHeader& h) {
  std::string out = "{\"schema_version\":" + std::to_string(h.schema_version);
  out += ",\"action_count\":" + std::to_string(h.action_count);
  out += ",\"feature_dim\":" + std::to_string(h.feature_dim);
  out += ",\"feature_names\":" + json_string_array(h.feature_names);
  out += ",\"reward_kind\":" + json_string(h.reward_kind);
  if (h.epsilon) out += ",\"epsilon\":" + format_double(*h.epsilon);
  if (!h.action_labels.empty()) {
    out += ",\"action_labels\":" + json_string_array(h.action_labels);
  }
  return out + "}";
}

std::string format_record_jsonl(const LoggedInteraction& r) {
  std::string out = "{\"context_id\":" + json_string(r.context_id);
  out += ",\"features\":[";
  for (std::size_t j = 0; j < r.features.size(); ++j) {
    if (j > 0) out += ',';
    out += format_double(r.features[j]);
  }
  out += "],\"action\":" + std::to_string(r.action);
  out += ",\"reward\":" + format_double(r.reward);
  if (r.logging_propensity) {
    out += ",\"logging_propensity\":" + format_double(*r.logging_propensity);
  }
  if (r.explored) out += *r.explored ? ",\"explored\":true" : ",\"explored\":false";
  return out + "}";
}

std::string format_record_csv(const LoggedInteraction& r) {
  std::string out = csv_escape(r.context_id);
  out += ',' + std::to_string(r.action);
  out += ',' + format_double(r.reward);
  out += ',';
  if (r.logging_propensity) out += format_double(*r.logging_propensity);
  out += ',';
  if (r.explored) out += *r.explored ? "true" : "false";
  for (double f : r.features) out += ',' + format_double(f);
  return out;
}

LogWriter::LogWriter(const std::filesystem::path& path, LogHeader header,
                     LogFormat format)
    : header_(std::move(header)), format_(format), file_(path) {
  header_.normalize();
  auto& out = file_.stream();
  if (format_ == LogFormat::kJsonl) {
    out << format_header_json(header_) << '\n';
  } else {
    out << kCsvHeaderPrefix << format_header_json(header_) << '\n';
    out << "context_id,action,reward,logging_propensity,explored";
    for (const auto& name : header_.feature_names) out << ',' << csv_escape(name);
    out << '\n';
  }
}

void LogWriter::write(const LoggedInteraction& record) {
  check_record(record, header_);
  auto& out = file_.stream();
  if (format_ == LogFormat::kJsonl) {
    out << format_record_jsonl(record) << '\n';
  } else {
    out << format_record_csv(record) << '\n';
  }
}

void LogWriter::commit() { file_.commit(); }

void write_log(const std::filesystem::path& path, const LogHeader& header,
               std::span<const LoggedInteraction> records, LogFormat format) {
  LogWriter writer(path, header, format);
  for (const auto& r : records) writer.write(r);
  writer.commit();
}

LogReader::LogReader(const std::filesystem::path& path, LogFormat format,
                     ReadMode mode)
    : path_(path), format_(format), mode_(mode) {
  in_.open(path, std::ios::binary);
  if (!in_) throw IoError("cannot open log " + path.string());
  std::string line;
  if (!std::getline(in_, line)) {
    throw SchemaError(path.string() + ": missing log header");
  }
  ++line_;
  if (format_ == LogFormat::kCsv) {
    if (line.rfind(kCsvHeaderPrefix, 0) != 0) {
      throw SchemaError(path.string() + ": CSV log must start with '" +
                        kCsvHeaderPrefix + "{...}'");
    }
    header_ = parse_header(line.substr(std::string(kCsvHeaderPrefix).size()));
    if (!std::getline(in_, line)) {
      throw SchemaError(path.string() + ": missing CSV column line");
    }
    ++line_;
    parse_csv_columns(line);
  } else {
    header_ = parse_header(line);
  }
}

void LogReader::parse_csv_columns(const std::string& line) {
  const auto cols = split_csv_line(line);
  column_count_ = cols.size();
  col_features_.assign(header_.feature_dim, -1);
  for (std::size_t i = 0; i < cols.size(); ++i) {
    const auto& c = cols[i];
    const int idx = static_cast<int>(i);
    if (c == "context_id") {
      col_context_ = idx;
    } else if (c == "action") {
      col_action_ = idx;
    } else if (c == "reward") {
      col_reward_ = idx;
    } else if (c == "logging_propensity") {
      col_propensity_ = idx;
    } else if (c == "explored") {
      col_explored_ = idx;
    } else {
      for (std::size_t j = 0; j < header_.feature_names.size(); ++j) {
        if (header_.feature_names[j] == c) col_features_[j] = idx;
      }
    }
  }
  if (col_action_ < 0) throw SchemaError("CSV log lacks the 'action' column");
  if (col_reward_ < 0) throw SchemaError("CSV log lacks the 'reward' column");
  for (std::size_t j = 0; j < col_features_.size(); ++j) {
    if (col_features_[j] < 0) {
      throw SchemaError("CSV log lacks feature column '" +
                        header_.feature_names[j] + "'");
    }
  }
}

bool LogReader::parse_row(const std::string& line, LoggedInteraction& out) {
  out.logging_propensity.reset();
  out.explored.reset();
  if (format_ == LogFormat::kCsv) {
    const auto f = split_csv_line(line);
    if (f.size() != column_count_) {
      throw InputError("expected " + std::to_string(column_count_) +
                       " fields, got " + std::to_string(f.size()));
    }
    out.context_id = col_context_ >= 0 ? f[col_context_] : std::string();
    const std::uint64_t action = parse_u64(f[col_action_]);
    if (action >= header_.action_count) {
      throw InputError("action " + std::to_string(action) +
                       " out of range for " +
                       std::to_string(header_.action_count) + " actions");
    }
    out.action = static_cast<Action>(action);
    out.reward = parse_double(f[col_reward_]);
    if (col_propensity_ >= 0 && !f[col_propensity_].empty()) {
      out.logging_propensity = parse_double(f[col_propensity_]);
    }
    if (col_explored_ >= 0 && !f[col_explored_].empty()) {
      out.explored = parse_bool(f[col_explored_]);
    }
    out.features.resize(col_features_.size());
    for (std::size_t j = 0; j < col_features_.size(); ++j) {
      out.features[j] = parse_double(f[col_features_[j]]);
    }
  } else {
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception&) {
      throw InputError("row is not valid JSON");
    }
    if (!doc.is_object()) throw InputError("row is not a JSON object");
    try {
      out.context_id =
          doc.contains("context_id") ? doc["context_id"].get<std::string>() : "";
      if (!doc.contains("action")) throw InputError("row lacks 'action'");
      if (!doc.contains("reward")) throw InputError("row lacks 'reward'");
      const auto& a = doc["action"];
      if (!a.is_number_integer() || a.get<std::int64_t>() < 0) {
        throw InputError("action must be a non-negative integer");
      }
      const auto action = a.get<std::uint64_t>();
      if (action >= header_.action_count) {
        throw InputError("action " + std::to_string(action) +
                         " out of range for " +
                         std::to_string(header_.action_count) + " actions");
      }
      out.action = static_cast<Action>(action);
      if (!doc["reward"].is_number()) throw InputError("reward must be a number");
      out.reward = doc["reward"].get<double>();
      if (doc.contains("features")) {
        out.features = doc["features"].get<std::vector<double>>();
      } else if (header_.feature_dim == 0) {
        out.features.clear();
      } else {
        throw InputError("row lacks 'features'");
      }
      if (doc.contains("logging_propensity") &&
          !doc["logging_propensity"].is_null()) {
        out.logging_propensity = doc["logging_propensity"].get<double>();
      }
      if (doc.contains("explored") && !doc["explored"].is_null()) {
        out.explored = doc["explored"].get<bool>();
      }
    } catch (const nlohmann::json::exception& e) {
      throw InputError(std::string("bad field type: ") + e.what());
    }
  }
  check_record(out, header_);
  return true;
}

bool LogReader::next(LoggedInteraction& out) {
  std::string line;
  while (std::getline(in_, line)) {
    ++line_;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    try {
      parse_row(line, out);
      ++records_;
      return true;
    } catch (const InputError& e) {
      if (mode_ == ReadMode::kStrict) {
        throw RowError(path_.string() + ": " + e.what(), line_);
      }
      ++malformed_;
      if (messages_.size() < kMaxMessages) {
        messages_.push_back("line " + std::to_string(line_) + ": " + e.what());
      }
    }
  }
  if (in_.bad()) throw IoError("error reading " + path_.string());
  return false;
}

LoadedLog read_log(const std::filesystem::path& path, LogFormat format,
                   ReadMode mode) {
  LogReader reader(path, format, mode);
  LoadedLog out;
  out.header = reader.header();
  LoggedInteraction r;
  while (reader.next(r)) out.records.push_back(r);
  return out;
}

}  // namespace ope
