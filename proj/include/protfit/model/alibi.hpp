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

#include <cstddef>
#include <vector>

#include "protfit/model/config.hpp"
#include "protfit/nn/tensor.hpp"

namespace protfit::model {

/// Slopes for each of the four head groups. With the repeated layout every
/// group holds m_i = 2^(-8i/h), i = 1..h, where h = n_heads / 4.
std::vector<std::vector<double>> alibi_slopes(
    std::size_t n_heads, SlopeLayout layout = SlopeLayout::kRepeated);

/// Causal distance bias shared by every sequence of length `steps`.
struct GroupedAlibiBias {
  std::vector<double> head_slopes;  // one per head, contiguous groups
  nn::Tensor bias;                  // [H, T, T]: -slope*(i-j) for j <= i, -inf above

  static GroupedAlibiBias build(std::vector<double> head_slopes, std::size_t steps);
  static GroupedAlibiBias from_config(const ModelConfig& config, std::size_t steps);
};

/// Pure causal mask [H, T, T] (0 on and below the diagonal, -inf above).
nn::Tensor causal_mask(std::size_t n_heads, std::size_t steps);

}  // namespace protfit::model
