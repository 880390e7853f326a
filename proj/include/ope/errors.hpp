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

#ifndef OPE_ERRORS_HPP_
#define OPE_ERRORS_HPP_

#include <cstdint>
#include <stdexcept>
#include <string>

namespace ope {

// Base for every error raised by the toolkit. The CLI maps any of these to
// exit code 2 (data / estimation error).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed arguments: dimension mismatches, out-of-range actions, bad
// probabilities, unknown tabular contexts.
class InputError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

// No usable records, zero weight mass, and similar conditions that make an
// estimate undefined.
class EstimationError : public Error {
 public:
  using Error::Error;
};

class UnsupportedModeError : public Error {
 public:
  using Error::Error;
};

// Logging probability is zero for an action the target policy can take.
class SupportViolation : public Error {
 public:
  SupportViolation(const std::string& what, std::uint64_t record_index)
      : Error(what), record_index_(record_index) {}
  std::uint64_t record_index() const { return record_index_; }

 private:
  std::uint64_t record_index_;
};

class SchemaError : public Error {
 public:
  using Error::Error;
};

// A single malformed log row; line numbers are 1-based.
class RowError : public Error {
 public:
  RowError(const std::string& what, std::uint64_t line)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::uint64_t line() const { return line_; }

 private:
  std::uint64_t line_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace ope

#endif  // OPE_ERRORS_HPP_
