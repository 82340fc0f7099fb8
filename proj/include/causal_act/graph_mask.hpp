// Copyright 2026 The causal_act Authors.
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

#ifndef CAUSAL_ACT_GRAPH_MASK_HPP_
#define CAUSAL_ACT_GRAPH_MASK_HPP_

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "causal_act/common.hpp"

namespace causal_act {

/// Binary gate over policy feature dimensions. Bit i set means feature i is a
/// parent of the action node; cleared bits are multiplied out of the input.
class GraphMask {
 public:
  GraphMask() = default;
  explicit GraphMask(std::size_t n, bool value = false) : bits_(n, value ? 1 : 0) {}
  explicit GraphMask(std::vector<std::uint8_t> bits) : bits_(std::move(bits)) {
    for (auto b : bits_)
      if (b > 1) throw UsageError("GraphMask: entries must be 0 or 1");
  }

  static GraphMask ones(std::size_t n) { return GraphMask(n, true); }
  static GraphMask zeros(std::size_t n) { return GraphMask(n, false); }

  /// Parses a string of '0'/'1' characters.
  static GraphMask from_string(std::string_view s) {
    std::vector<std::uint8_t> bits;
    bits.reserve(s.size());
    for (char c : s) {
      if (c != '0' && c != '1')
        throw DataError("graph bits must be '0'/'1', got '" + std::string(s) + "'");
      bits.push_back(c == '1' ? 1 : 0);
    }
    return GraphMask(std::move(bits));
  }

  std::string to_string() const {
    std::string s;
    s.reserve(bits_.size());
    for (auto b : bits_) s.push_back(b ? '1' : '0');
    return s;
  }

  std::size_t size() const { return bits_.size(); }
  bool operator[](std::size_t i) const { return bits_[i] != 0; }
  void set(std::size_t i, bool v) { bits_.at(i) = v ? 1 : 0; }
  std::size_t count() const {
    std::size_t c = 0;
    for (auto b : bits_) c += b;
    return c;
  }
  const std::vector<std::uint8_t>& bits() const { return bits_; }

  friend bool operator==(const GraphMask&, const GraphMask&) = default;

 private:
  std::vector<std::uint8_t> bits_;
};

/// Every bit i.i.d. Bernoulli(1/2).
inline GraphMask sample_uniform_graph(std::size_t feature_dim, Rng& rng) {
  if (feature_dim == 0) throw UsageError("sample_uniform_graph: feature_dim must be >= 1");
  GraphMask g(feature_dim);
  for (std::size_t i = 0; i < feature_dim; ++i) g.set(i, (rng.next_u64() >> 63) != 0);
  return g;
}

}  // namespace causal_act

#endif  // CAUSAL_ACT_GRAPH_MASK_HPP_
