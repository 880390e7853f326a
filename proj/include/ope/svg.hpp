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

#ifndef OPE_SVG_HPP_
#define OPE_SVG_HPP_

#include <string>
#include <utility>
#include <vector>

namespace ope {

struct SvgSeries {
  std::string name;
  std::vector<std::pair<double, double>> points;
  bool connect = false;  // polyline through the points, else markers only
};

// Static 2-D chart with optional log axes. Output is deterministic text.
struct SvgChart {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_x = false;
  bool log_y = false;
  bool diagonal = false;  // dashed y = x reference
  std::vector<SvgSeries> series;

  std::string render() const;
};

}  // namespace ope

#endif  // OPE_SVG_HPP_
