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

#ifndef OPE_RANDOM_HPP_
#define OPE_RANDOM_HPP_

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <numbers>
#include <random>
#include <vector>

namespace ope {

// Seeded generator with platform-independent output. The engine and
// std::seed_seq are fully specified by the standard; the conversions to
// doubles are done here rather than with std:: distributions, whose
// algorithms vary between standard libraries.
//
// Independent streams are split off by passing distinct stream words, e.g.
// Rng(seed, {replication, sample_size}).
class Rng {
 public:
  explicit Rng(std::uint64_t seed,
               std::initializer_list<std::uint64_t> stream = {}) {
    std::vector<std::uint32_t> words;
    words.reserve(2 + 2 * stream.size());
    auto push = [&words](std::uint64_t v) {
      words.push_back(static_cast<std::uint32_t>(v));
      words.push_back(static_cast<std::uint32_t>(v >> 32));
    };
    push(seed);
    for (std::uint64_t s : stream) push(s);
    std::seed_seq seq(words.begin(), words.end());
    engine_.seed(seq);
  }

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // Uniform integer in [0, n).
  std::size_t below(std::size_t n) {
    const auto i = static_cast<std::size_t>(uniform() * static_cast<double>(n));
    return i < n ? i : n - 1;
  }

  bool bernoulli(double p) { return uniform() < p; }

  // Standard normal via Box-Muller.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

  // Index drawn from a probability vector by inverse CDF.
  std::size_t categorical(const double* probs, std::size_t size) {
    const double u = uniform();
    double cumulative = 0.0;
    for (std::size_t i = 0; i + 1 < size; ++i) {
      cumulative += probs[i];
      if (u < cumulative) return i;
    }
    // Rounding can leave u above the partial sums; never return an index
    // with zero probability.
    std::size_t last = size - 1;
    while (last > 0 && probs[last] <= 0.0) --last;
    return last;
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace ope

#endif  // OPE_RANDOM_HPP_
