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
#include <span>
#include <vector>

#include "protfit/model/attention.hpp"
#include "protfit/model/config.hpp"
#include "protfit/nn/graph.hpp"
#include "protfit/seq/sequence.hpp"

namespace protfit::model {

/// Right-padded token batch, row-major [batch, steps].
struct TokenBatch {
  std::vector<int> ids;
  std::size_t batch = 0;
  std::size_t steps = 0;

  static TokenBatch from_sequences(std::span<const seq::TokenSeq> seqs);
  int at(std::size_t b, std::size_t t) const { return ids[b * steps + t]; }
};

struct ForwardOptions {
  /// Permit inputs longer than max_context (distance biases extrapolate).
  bool allow_over_length = false;
};

struct SequenceLogProb {
  double total = 0.0;
  /// log P(token_{i+1} | tokens_{<=i}) for every residue, then EOS if included.
  std::vector<double> per_position;
};

// Decoder-only protein language model: token embedding without added
// positions, pre-norm blocks of grouped convolution attention and a
// squared-ReLU MLP, final layer norm and an untied output head.
class ProteinLM {
 public:
  /// Random initialisation from config.seed.
  explicit ProteinLM(ModelConfig config);

  const ModelConfig& config() const { return config_; }
  nn::ParameterSet& parameters() { return params_; }
  const nn::ParameterSet& parameters() const { return params_; }

  /// Trainable forward; logits [batch, steps, vocab]. logits[b, t] scores
  /// the token at t + 1.
  nn::Var forward(nn::Graph& g, const TokenBatch& batch,
                  const ForwardOptions& options = {});
  /// Frozen forward (no gradient reaches the parameters).
  nn::Var forward(nn::Graph& g, const TokenBatch& batch,
                  const ForwardOptions& options = {}) const;

  /// Inference logits without a gradient tape.
  nn::Tensor logits(const TokenBatch& batch, const ForwardOptions& options = {}) const;

  /// Attention-layer handles bound into `g` (frozen when `this` is const).
  AttentionParams attention_params(nn::Graph& g, std::size_t layer);
  AttentionParams attention_params(nn::Graph& g, std::size_t layer) const;

 private:
  template <class Self>
  static nn::Var forward_impl(Self& self, nn::Graph& g, const TokenBatch& batch,
                              const ForwardOptions& options);
  template <class Self>
  static AttentionParams bind_attention(Self& self, nn::Graph& g, std::size_t layer);

  void initialise();

  ModelConfig config_;
  nn::ParameterSet params_;
};

/// Sum of per-token log-probabilities of a standard-residue sequence. The
/// tokenized length must not exceed max_context.
SequenceLogProb sequence_log_prob(const ProteinLM& model, std::string_view residues,
                                  bool include_eos = true);

}  // namespace protfit::model
