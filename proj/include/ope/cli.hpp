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

#ifndef OPE_CLI_HPP_
#define OPE_CLI_HPP_

#include <iosfwd>
#include <string>
#include <vector>

namespace ope {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitDataError = 2;

// Entry point of the `ope` tool with subcommands simulate, estimate,
// benchmark and report. Returns 0 on success, 1 on usage errors and 2 on
// data or estimation errors.
int cli_main(int argc, const char* const* argv, std::ostream& out,
             std::ostream& err);
int cli_main(const std::vector<std::string>& args, std::ostream& out,
             std::ostream& err);

}  // namespace ope

#endif  // OPE_CLI_HPP_
