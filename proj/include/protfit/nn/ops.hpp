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

#include <span>
#include <vector>

#include "protfit/nn/graph.hpp"

// Differentiable primitives. Every function takes its operands as graph
// handles and returns a new handle; shape violations throw ShapeError.
namespace protfit::nn {

/// x[..., din] @ W[din, dout] + b[dout].
Var linear(Graph& g, Var x, Var weight, Var bias);

/// Elementwise a + b, identical shapes.
Var add(Graph& g, Var a, Var b);

/// max(x, 0)^2.
Var squared_relu(Graph& g, Var x);

/// Normalises over the last axis, then scales by `gain` and shifts by `bias`.
Var layer_norm(Graph& g, Var x, Var gain, Var bias, double eps = 1e-5);

/// Rows of `table[V, D]` gathered by `ids`; output shape `outer` + [D].
Var embedding(Graph& g, Var table, std::span<const int> ids, const Shape& outer);

/// x[B, T, D] + table[t, :] for t < T (learned absolute positions).
Var add_positions(Graph& g, Var x, Var table);

/// Per-channel convolution along the sequence axis with k-1 zeros of left
/// padding: y[b,t,c] = sum_j kernel[j,c] * x[b, t-(k-1)+j, c].
/// kernel[k-1] weights the current position.
Var causal_depthwise_conv1d(Graph& g, Var x, Var kernel);

/// Channels [begin, end) of the last axis.
Var slice_last(Graph& g, Var x, std::size_t begin, std::size_t end);
/// Concatenation along the last axis; leading axes must agree.
Var concat_last(Graph& g, const std::vector<Var>& parts);

/// Per-head scaled dot products: q,k [B,T,D] -> [B,H,T,T] with scale
/// 1/sqrt(D/H). With `causal`, entries j > i are left at zero and must be
/// masked by the caller.
Var attention_scores(Graph& g, Var q, Var k, std::size_t n_heads, bool causal);

/// Weighted values: probs [B,H,T,T], v [B,T,D] -> [B,T,D].
Var attention_mix(Graph& g, Var probs, Var v, bool causal);

/// Numerically stable softmax over the last axis of x + mask. The mask is a
/// constant additive bias (0, -inf, or finite) whose shape is a suffix of
/// x's shape. A row whose entries are all -inf is an error.
Var softmax_lastaxis(Graph& g, Var x, const Tensor* mask = nullptr);

/// Mean token cross-entropy in nats over targets != ignore_id.
/// logits [..., V], targets has logits.rows() entries.
Var cross_entropy(Graph& g, Var logits, std::span<const int> targets,
                  int ignore_id);

/// sum(x * weights); a scalar, used to reduce outputs in gradient checks.
Var weighted_sum(Graph& g, Var x, const Tensor& weights);

Var sum(Graph& g, Var x);

/// Non-differentiable log-softmax over the last axis.
Tensor log_softmax(const Tensor& logits);

}  // namespace protfit::nn
