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

#include "protfit/model/attention.hpp"

#include <vector>

#include "protfit/model/config.hpp"
#include "protfit/nn/ops.hpp"
#include "protfit/util/error.hpp"

namespace protfit::model {

namespace {

nn::Var convolve_groups(nn::Graph& g, nn::Var t, const std::array<nn::Var, 3>& kernels,
                        std::size_t group_width) {
  std::vector<nn::Var> parts;
  parts.reserve(kHeadGroups);
  parts.push_back(nn::slice_last(g, t, 0, group_width));
  for (std::size_t grp = 1; grp < kHeadGroups; ++grp) {
    nn::Var slice = nn::slice_last(g, t, grp * group_width, (grp + 1) * group_width);
    parts.push_back(nn::causal_depthwise_conv1d(g, slice, kernels[grp - 1]));
  }
  return nn::concat_last(g, parts);
}

}  // namespace

AttentionResult grouped_conv_attention(nn::Graph& g, nn::Var x,
                                       const AttentionParams& params,
                                       const AttentionShape& shape,
                                       const nn::Tensor& bias) {
  const nn::Tensor& X = g.value(x);
  if (X.rank() != 3) throw ShapeError("attention: input must be [B,T,D]");
  const std::size_t d = X.dim(2);
  if (shape.n_heads % kHeadGroups != 0 || d % shape.n_heads != 0) {
    throw ShapeError("attention: heads must split into 4 groups evenly");
  }
  const std::size_t group_width = d / kHeadGroups;

  nn::Var q = nn::linear(g, x, params.wq, params.bq);
  nn::Var k = nn::linear(g, x, params.wk, params.bk);
  nn::Var v = nn::linear(g, x, params.wv, params.bv);
  if (shape.use_conv) {
    q = convolve_groups(g, q, params.conv_q, group_width);
    k = convolve_groups(g, k, params.conv_k, group_width);
    v = convolve_groups(g, v, params.conv_v, group_width);
  }
  nn::Var scores = nn::attention_scores(g, q, k, shape.n_heads, /*causal=*/true);
  nn::Var probs = nn::softmax_lastaxis(g, scores, &bias);
  nn::Var heads = nn::attention_mix(g, probs, v, /*causal=*/true);
  return {nn::linear(g, heads, params.wo, params.bo), heads};
}

}  // namespace protfit::model
