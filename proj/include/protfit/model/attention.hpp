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

#include "protfit/nn/graph.hpp"

namespace protfit::model {

/// Graph handles for one attention layer. conv_* hold the depthwise kernels
/// of head groups 2..4 (sizes 3, 5, 7), each shaped [k, group_width].
struct AttentionParams {
  nn::Var wq, bq, wk, bk, wv, bv, wo, bo;
  std::array<nn::Var, 3> conv_q, conv_k, conv_v;
};

struct AttentionShape {
  std::size_t n_heads = 4;
  bool use_conv = true;
};

struct AttentionResult {
  nn::Var output;  // [B, T, D] after the output projection
  nn::Var heads;   // [B, T, D] concatenated head outputs before projection
};

// Multi-head causal self-attention with heads split into four contiguous
// groups. Group 1 uses the raw Q/K/V projections; groups 2-4 pass their
// slice of Q, K and V through causal depthwise convolutions of width 3, 5
// and 7. `bias` is the additive [H, T, T] score bias (distance penalty plus
// causal mask).
AttentionResult grouped_conv_attention(nn::Graph& g, nn::Var x,
                                       const AttentionParams& params,
                                       const AttentionShape& shape,
                                       const nn::Tensor& bias);

}  // namespace protfit::model
