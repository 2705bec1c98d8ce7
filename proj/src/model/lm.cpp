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

#include "protfit/model/lm.hpp"

#include <algorithm>
#include <string>

#include "protfit/model/alibi.hpp"
#include "protfit/nn/ops.hpp"
#include "protfit/seq/vocab.hpp"
#include "protfit/util/error.hpp"
#include "protfit/util/rng.hpp"

namespace protfit::model {

using nn::Graph;
using nn::Scalar;
using nn::Tensor;
using nn::Var;

TokenBatch TokenBatch::from_sequences(std::span<const seq::TokenSeq> seqs) {
  TokenBatch out;
  out.batch = seqs.size();
  for (const auto& s : seqs) out.steps = std::max(out.steps, s.size());
  out.ids.assign(out.batch * out.steps, seq::kPad);
  for (std::size_t b = 0; b < seqs.size(); ++b) {
    std::copy(seqs[b].ids.begin(), seqs[b].ids.end(),
              out.ids.begin() + static_cast<std::ptrdiff_t>(b * out.steps));
  }
  return out;
}

namespace {

std::string layer_prefix(std::size_t layer) {
  return "layers." + std::to_string(layer) + ".";
}

Tensor normal_tensor(nn::Shape shape, double stddev, Rng& rng) {
  Tensor t(std::move(shape));
  for (std::size_t i = 0; i < t.size(); ++i) {
    t[i] = static_cast<Scalar>(stddev * rng.normal());
  }
  return t;
}

}  // namespace

ProteinLM::ProteinLM(ModelConfig config) : config_(std::move(config)) {
  if (config_.precision.empty()) config_.precision = nn::kPrecisionName;
  config_.validate();
  initialise();
}

void ProteinLM::initialise() {
  constexpr double kStd = 0.02;
  Rng rng(config_.seed);
  const std::size_t d = config_.d_model, ff = config_.d_ff, vocab = config_.vocab_size;
  const std::size_t group_width = d / kHeadGroups;

  params_.add("embed.tokens", normal_tensor({vocab, d}, kStd, rng));
  if (config_.position_encoding == PositionEncoding::kLearned) {
    params_.add("embed.positions", normal_tensor({config_.max_context, d}, kStd, rng));
  }
  for (std::size_t l = 0; l < config_.n_layers; ++l) {
    const std::string p = layer_prefix(l);
    params_.add(p + "ln_attn.gain", Tensor({d}, Scalar(1)));
    params_.add(p + "ln_attn.bias", Tensor({d}));
    for (const char* proj : {"q", "k", "v", "out"}) {
      params_.add(p + "attn." + proj + ".weight", normal_tensor({d, d}, kStd, rng));
      params_.add(p + "attn." + proj + ".bias", Tensor({d}));
    }
    for (const char* which : {"q", "k", "v"}) {
      for (std::size_t grp = 1; grp < kHeadGroups; ++grp) {
        const std::size_t k = kKernelSizes[grp];
        // near-identity start: impulse on the current position plus noise
        Tensor kernel = normal_tensor({k, group_width}, kStd, rng);
        for (std::size_t c = 0; c < group_width; ++c) kernel[(k - 1) * group_width + c] += 1;
        params_.add(p + "attn.conv_" + which + ".k" + std::to_string(k), std::move(kernel));
      }
    }
    params_.add(p + "ln_mlp.gain", Tensor({d}, Scalar(1)));
    params_.add(p + "ln_mlp.bias", Tensor({d}));
    params_.add(p + "mlp.fc1.weight", normal_tensor({d, ff}, kStd, rng));
    params_.add(p + "mlp.fc1.bias", Tensor({ff}));
    params_.add(p + "mlp.fc2.weight", normal_tensor({ff, d}, kStd, rng));
    params_.add(p + "mlp.fc2.bias", Tensor({d}));
  }
  params_.add("final_ln.gain", Tensor({d}, Scalar(1)));
  params_.add("final_ln.bias", Tensor({d}));
  params_.add("head.weight", normal_tensor({d, vocab}, kStd, rng));
  params_.add("head.bias", Tensor({vocab}));
}

template <class Self>
AttentionParams ProteinLM::bind_attention(Self& self, Graph& g, std::size_t layer) {
  const std::string p = layer_prefix(layer) + "attn.";
  auto bind = [&](const std::string& name) { return g.parameter(self.params_.get(p + name)); };
  AttentionParams a;
  a.wq = bind("q.weight");
  a.bq = bind("q.bias");
  a.wk = bind("k.weight");
  a.bk = bind("k.bias");
  a.wv = bind("v.weight");
  a.bv = bind("v.bias");
  a.wo = bind("out.weight");
  a.bo = bind("out.bias");
  for (std::size_t grp = 1; grp < kHeadGroups; ++grp) {
    const std::string suffix = ".k" + std::to_string(kKernelSizes[grp]);
    a.conv_q[grp - 1] = bind("conv_q" + suffix);
    a.conv_k[grp - 1] = bind("conv_k" + suffix);
    a.conv_v[grp - 1] = bind("conv_v" + suffix);
  }
  return a;
}

AttentionParams ProteinLM::attention_params(Graph& g, std::size_t layer) {
  return bind_attention(*this, g, layer);
}

AttentionParams ProteinLM::attention_params(Graph& g, std::size_t layer) const {
  return bind_attention(*this, g, layer);
}

template <class Self>
Var ProteinLM::forward_impl(Self& self, Graph& g, const TokenBatch& batch,
                            const ForwardOptions& options) {
  const ModelConfig& cfg = self.config_;
  if (batch.batch == 0 || batch.steps == 0) throw ShapeError("forward: empty batch");
  if (batch.steps > cfg.max_context && !options.allow_over_length) {
    throw ValidationError("sequence of " + std::to_string(batch.steps) +
                          " tokens exceeds max_context " +
                          std::to_string(cfg.max_context));
  }
  auto bind = [&](const std::string& name) { return g.parameter(self.params_.get(name)); };

  Var x = nn::embedding(g, bind("embed.tokens"), batch.ids, {batch.batch, batch.steps});
  Tensor bias;
  if (cfg.position_encoding == PositionEncoding::kLearned) {
    x = nn::add_positions(g, x, bind("embed.positions"));
    bias = causal_mask(cfg.n_heads, batch.steps);
  } else {
    bias = GroupedAlibiBias::from_config(cfg, batch.steps).bias;
  }
  const AttentionShape shape{cfg.n_heads, cfg.use_conv};
  for (std::size_t l = 0; l < cfg.n_layers; ++l) {
    const std::string p = layer_prefix(l);
    Var h = nn::layer_norm(g, x, bind(p + "ln_attn.gain"), bind(p + "ln_attn.bias"));
    const AttentionParams attn = bind_attention(self, g, l);
    x = nn::add(g, x, grouped_conv_attention(g, h, attn, shape, bias).output);
    h = nn::layer_norm(g, x, bind(p + "ln_mlp.gain"), bind(p + "ln_mlp.bias"));
    h = nn::linear(g, h, bind(p + "mlp.fc1.weight"), bind(p + "mlp.fc1.bias"));
    h = nn::squared_relu(g, h);
    h = nn::linear(g, h, bind(p + "mlp.fc2.weight"), bind(p + "mlp.fc2.bias"));
    x = nn::add(g, x, h);
  }
  x = nn::layer_norm(g, x, bind("final_ln.gain"), bind("final_ln.bias"));
  return nn::linear(g, x, bind("head.weight"), bind("head.bias"));
}

Var ProteinLM::forward(Graph& g, const TokenBatch& batch, const ForwardOptions& options) {
  return forward_impl(*this, g, batch, options);
}

Var ProteinLM::forward(Graph& g, const TokenBatch& batch,
                       const ForwardOptions& options) const {
  return forward_impl(*this, g, batch, options);
}

Tensor ProteinLM::logits(const TokenBatch& batch, const ForwardOptions& options) const {
  Graph g(false);
  return g.value(forward(g, batch, options));
}

SequenceLogProb sequence_log_prob(const ProteinLM& model, std::string_view residues,
                                  bool include_eos) {
  const seq::TokenSeq tokens = seq::tokenize(residues);
  if (tokens.size() > model.config().max_context) {
    throw ValidationError("sequence of " + std::to_string(residues.size()) +
                          " residues does not fit max_context " +
                          std::to_string(model.config().max_context) +
                          "; select a scoring window first");
  }
  const TokenBatch batch = TokenBatch::from_sequences(std::span(&tokens, 1));
  const Tensor logp = nn::log_softmax(model.logits(batch));
  const std::size_t vocab = logp.last_dim();
  const std::size_t n_scored = include_eos ? tokens.size() - 1 : tokens.size() - 2;
  SequenceLogProb out;
  out.per_position.resize(n_scored);
  for (std::size_t t = 0; t < n_scored; ++t) {
    out.per_position[t] =
        static_cast<double>(logp[t * vocab + static_cast<std::size_t>(tokens.ids[t + 1])]);
    out.total += out.per_position[t];
  }
  return out;
}

}  // namespace protfit::model
