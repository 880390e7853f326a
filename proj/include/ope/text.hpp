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

#ifndef OPE_TEXT_HPP_
#define OPE_TEXT_HPP_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace ope {

// Round-trippable fixed formatting: 17 significant digits ("%.17g"); NaN is
// written as "nan".
std::string format_double(double value);

// Strict parsers; throw InputError on trailing garbage or overflow.
double parse_double(std::string_view text);
std::uint64_t parse_u64(std::string_view text);

// Minimal RFC 4180 handling: fields containing a comma, quote or newline
// are quoted, quotes are doubled.
std::string csv_escape(std::string_view field);
std::vector<std::string> split_csv_line(std::string_view line);

std::vector<std::string> split(std::string_view text, char sep);

}  // namespace ope

#endif  // OPE_TEXT_HPP_
