// Copyright (c) 2026 The protfit Authors. All Rights Reserved.
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

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>

namespace protfit::model {

enum class PositionEncoding {
  kGroupedAlibi,
  kLearned,  // ablation only
};

/// How the four head groups receive their ALiBi slopes.
enum class SlopeLayout {
  kRepeated,  // every group gets the geometric set for heads-per-group
  kDistinct,  // one geometric set over all heads, split into contiguous groups
};

inline constexpr std::array<std::size_t, 4> kKernelSizes = {1, 3, 5, 7};
inline constexpr std::size_t kHeadGroups = 4;

struct ModelConfig {
  std::size_t n_layers = 2;
  std::size_t n_heads = 8;
  std::size_t d_model = 64;
  std::size_t d_ff = 256;
  std::size_t vocab_size = 23;
  std::size_t max_context = 1024;
  bool use_conv = true;
  PositionEncoding position_encoding = PositionEncoding::kGroupedAlibi;
  SlopeLayout slope_layout = SlopeLayout::kRepeated;
  std::string precision;  // filled with the build's scalar type when empty
  std::uint64_t seed = 0;

  std::size_t heads_per_group() const { return n_heads / kHeadGroups; }
  std::size_t head_dim() const { return d_model / n_heads; }

  /// Throws ConfigError on any violated invariant.
  void validate() const;

  /// Canonical text: fixed key order, one key=value per line.
  std::string to_text() const;
  static ModelConfig from_text(std::string_view text, const std::string& source);
  /// Applies one key; returns false for an unknown key.
  bool set(std::string_view key, std::string_view value, const std::string& context);

  bool operator==(const ModelConfig&) const = default;
};

}  // namespace protfit::model
