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

#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "protfit/model/alibi.hpp"
#include "protfit/model/attention.hpp"
#include "protfit/model/checkpoint.hpp"
#include "protfit/model/lm.hpp"
#include "protfit/nn/grad_check.hpp"
#include "protfit/nn/ops.hpp"
#include "protfit/seq/vocab.hpp"
#include "protfit/util/error.hpp"

namespace protfit::model {
namespace {

using nn::Graph;
using nn::Tensor;
using nn::Var;

ModelConfig tiny_config(std::uint64_t seed = 1) {
  ModelConfig c;
  c.n_layers = 2;
  c.n_heads = 4;
  c.d_model = 16;
  c.d_ff = 32;
  c.max_context = 64;
  c.seed = seed;
  return c;
}

Tensor random_tensor(nn::Shape shape, std::uint64_t seed, double scale = 1.0) {
  Tensor t(std::move(shape));
  Rng rng(seed);
  for (auto& v : t.values()) v = static_cast<nn::Scalar>(scale * rng.normal());
  return t;
}

std::string random_residues(Rng& rng, std::size_t len) {
  std::string s;
  for (std::size_t i = 0; i < len; ++i) s += seq::kStandardResidues[rng.index(20)];
  return s;
}

// Randomises every parameter so tests do not depend on the near-identity init.
void scramble(ProteinLM& m, std::uint64_t seed, double scale = 0.3) {
  Rng rng(seed);
  for (auto& p : m.parameters()) {
    for (auto& v : p.value.values()) v += static_cast<nn::Scalar>(scale * rng.normal());
  }
}

TEST(Config, Validation) {
  ModelConfig c = tiny_config();
  EXPECT_NO_THROW(c.validate());
  c.n_heads = 6;
  EXPECT_THROW(c.validate(), ConfigError);
  c = tiny_config();
  c.d_model = 18;
  EXPECT_THROW(c.validate(), ConfigError);
  c = tiny_config();
  c.max_context = 3;
  EXPECT_THROW(c.validate(), ConfigError);
}

TEST(Config, TextRoundTrip) {
  ModelConfig c = tiny_config(77);
  c.slope_layout = SlopeLayout::kDistinct;
  c.use_conv = false;
  c.precision = nn::kPrecisionName;
  const std::string text = c.to_text();
  EXPECT_EQ(ModelConfig::from_text(text, "t"), c);
  EXPECT_NE(text.find("kernel_sizes=1,3,5,7"), std::string::npos);
  EXPECT_THROW(ModelConfig::from_text("n_heads=8\nbogus=1\n", "t"), ConfigError);
}

TEST(Alibi, SlopesForEightHeads) {
  auto s = alibi_slopes(8);
  ASSERT_EQ(s.size(), 4u);
  for (const auto& grp : s) {
    ASSERT_EQ(grp.size(), 2u);
    EXPECT_EQ(grp[0], std::ldexp(1.0, -4));
    EXPECT_EQ(grp[1], std::ldexp(1.0, -8));
  }
}

TEST(Alibi, SlopesForFourHeads) {
  for (const auto& grp : alibi_slopes(4)) {
    ASSERT_EQ(grp.size(), 1u);
    EXPECT_EQ(grp[0], std::ldexp(1.0, -8));
  }
}

TEST(Alibi, SlopesPositiveAndDecreasingWithinGroups) {
  for (auto layout : {SlopeLayout::kRepeated, SlopeLayout::kDistinct}) {
    for (std::size_t h : {4u, 8u, 12u, 16u, 32u}) {
      for (const auto& grp : alibi_slopes(h, layout)) {
        for (std::size_t i = 0; i < grp.size(); ++i) {
          EXPECT_GT(grp[i], 0);
          EXPECT_LE(grp[i], 1);
          if (i > 0) {
            EXPECT_LT(grp[i], grp[i - 1]);
          }
        }
      }
    }
  }
  EXPECT_THROW(alibi_slopes(6), ConfigError);
}

TEST(Alibi, DistinctLayoutDiffersAcrossGroups) {
  auto s = alibi_slopes(8, SlopeLayout::kDistinct);
  EXPECT_GT(s[0][1], s[1][0]);
}

TEST(Alibi, BiasMatrixStructure) {
  auto b = GroupedAlibiBias::from_config(tiny_config(), 6);
  ASSERT_EQ(b.bias.shape(), (nn::Shape{4, 6, 6}));
  for (std::size_t h = 0; h < 4; ++h) {
    for (std::size_t i = 0; i < 6; ++i) {
      for (std::size_t j = 0; j < 6; ++j) {
        const double v = b.bias[(h * 6 + i) * 6 + j];
        if (j > i) {
          EXPECT_EQ(v, -std::numeric_limits<double>::infinity());
        } else {
          EXPECT_DOUBLE_EQ(v, -b.head_slopes[h] * static_cast<double>(i - j));
        }
      }
    }
  }
}

struct AttentionFixture {
  static constexpr std::size_t kB = 2, kT = 5, kD = 16, kH = 4;
  std::vector<Tensor> tensors;

  explicit AttentionFixture(std::uint64_t seed) {
    const std::size_t gw = kD / 4;
    tensors.push_back(random_tensor({kB, kT, kD}, seed));
    for (int i = 0; i < 4; ++i) {
      tensors.push_back(random_tensor({kD, kD}, seed + 10 + i, 0.4));
      tensors.push_back(random_tensor({kD}, seed + 20 + i, 0.1));
    }
    for (int which = 0; which < 3; ++which) {
      for (std::size_t k : {3u, 5u, 7u}) {
        tensors.push_back(random_tensor({k, gw}, seed + 30 + which * 7 + k, 0.5));
      }
    }
  }

  static AttentionParams bind(const std::vector<Var>& v) {
    AttentionParams p;
    p.wq = v[1], p.bq = v[2], p.wk = v[3], p.bk = v[4];
    p.wv = v[5], p.bv = v[6], p.wo = v[7], p.bo = v[8];
    for (int i = 0; i < 3; ++i) {
      p.conv_q[i] = v[9 + i];
      p.conv_k[i] = v[12 + i];
      p.conv_v[i] = v[15 + i];
    }
    return p;
  }

  AttentionResult run(Graph& g, const Tensor& bias, bool use_conv = true) const {
    std::vector<Var> v;
    for (const auto& t : tensors) v.push_back(g.constant(t));
    return grouped_conv_attention(g, v[0], bind(v), {kH, use_conv}, bias);
  }
};

TEST(Attention, Causal) {
  AttentionFixture f(3);
  const Tensor bias = GroupedAlibiBias::from_config(tiny_config(), f.kT).bias;
  for (std::size_t t = 0; t < f.kT; ++t) {
    Graph g1(false);
    const Tensor before = g1.value(f.run(g1, bias).output);
    AttentionFixture p = f;
    for (std::size_t c = 0; c < f.kD; ++c) p.tensors[0][t * f.kD + c] += 0.7;
    Graph g2(false);
    const Tensor after = g2.value(p.run(g2, bias).output);
    for (std::size_t b = 0; b < f.kB; ++b) {
      for (std::size_t s = 0; s < f.kT; ++s) {
        for (std::size_t c = 0; c < f.kD; ++c) {
          const std::size_t i = (b * f.kT + s) * f.kD + c;
          if (s < t || b == 1) {
            EXPECT_EQ(before[i], after[i]) << "t=" << t << " s=" << s;
          }
        }
      }
    }
  }
}

TEST(Attention, SteepSlopesAndImpulseKernelsAttendToSelf) {
  AttentionFixture f(5);
  for (std::size_t i = 9; i < f.tensors.size(); ++i) {
    Tensor& k = f.tensors[i];
    k.fill(0);
    const std::size_t width = k.dim(1);
    for (std::size_t c = 0; c < width; ++c) k[(k.dim(0) - 1) * width + c] = 1;
  }
  auto bias = GroupedAlibiBias::build(std::vector<double>(f.kH, 1e3), f.kT).bias;
  Graph g(false);
  auto r = f.run(g, bias);
  Graph ref(false);
  auto v = nn::linear(ref, ref.constant(f.tensors[0]), ref.constant(f.tensors[5]),
                      ref.constant(f.tensors[6]));
  const Tensor& heads = g.value(r.heads);
  const Tensor& expect = ref.value(v);
  for (std::size_t i = 0; i < heads.size(); ++i) EXPECT_NEAR(heads[i], expect[i], 1e-6);
}

TEST(Attention, FirstGroupIgnoresConvolutions) {
  AttentionFixture f(8);
  const Tensor bias = GroupedAlibiBias::from_config(tiny_config(), f.kT).bias;
  Graph g1(false), g2(false);
  const Tensor with = g1.value(f.run(g1, bias, true).heads);
  const Tensor without = g2.value(f.run(g2, bias, false).heads);
  const std::size_t gw = f.kD / 4;
  bool other_groups_differ = false;
  for (std::size_t r = 0; r < with.rows(); ++r) {
    for (std::size_t c = 0; c < f.kD; ++c) {
      const std::size_t i = r * f.kD + c;
      if (c < gw) {
        EXPECT_EQ(with[i], without[i]);
      } else {
        other_groups_differ |= with[i] != without[i];
      }
    }
  }
  EXPECT_TRUE(other_groups_differ);
}

TEST(Attention, GradCheck) {
  AttentionFixture f(11);
  const Tensor bias = GroupedAlibiBias::from_config(tiny_config(), f.kT).bias;
  const Tensor w = random_tensor({f.kB, f.kT, f.kD}, 4);
  auto r = nn::grad_check(
      [&](Graph& g, const std::vector<Var>& in) {
        auto out = grouped_conv_attention(g, in[0], AttentionFixture::bind(in), {f.kH, true}, bias);
        return nn::weighted_sum(g, out.output, w);
      },
      // The key-bias gradient is exactly zero for the conv-free group, so a
      // tiny floor would turn difference noise into a large relative error.
      f.tensors, {.eps = 1e-6, .floor = 1e-4});
  EXPECT_LT(r.max_rel_error, 1e-4) << "input " << r.worst_input;
}

TEST(LanguageModel, LogitShapeAndNormalisation) {
  ProteinLM m(tiny_config());
  std::vector<seq::TokenSeq> seqs = {seq::tokenize("ACDEFG"), seq::tokenize("KLM")};
  auto batch = TokenBatch::from_sequences(seqs);
  Tensor logits = m.logits(batch);
  EXPECT_EQ(logits.shape(), (nn::Shape{2, 8, seq::kVocabSize}));
  Tensor lp = nn::log_softmax(logits);
  for (std::size_t r = 0; r < lp.rows(); ++r) {
    double s = 0;
    for (std::size_t c = 0; c < lp.last_dim(); ++c) s += std::exp(lp[r * lp.last_dim() + c]);
    EXPECT_NEAR(s, 1.0, 1e-12);
  }
}

TEST(LanguageModel, PaddingDoesNotAffectRealPositions) {
  ProteinLM m(tiny_config());
  scramble(m, 4);
  std::vector<seq::TokenSeq> one = {seq::tokenize("KLM")};
  std::vector<seq::TokenSeq> two = {seq::tokenize("KLM"), seq::tokenize("ACDEFGHIK")};
  Tensor a = m.logits(TokenBatch::from_sequences(one));
  Tensor b = m.logits(TokenBatch::from_sequences(two));
  const std::size_t v = seq::kVocabSize;
  for (std::size_t t = 0; t < 5; ++t) {
    for (std::size_t c = 0; c < v; ++c) EXPECT_NEAR(a[t * v + c], b[t * v + c], 1e-12);
  }
}

TEST(LanguageModel, OverLengthInput) {
  ModelConfig c = tiny_config();
  c.max_context = 64;
  ProteinLM m(c);
  Rng rng(1);
  std::vector<seq::TokenSeq> seqs = {seq::tokenize(random_residues(rng, 126))};
  auto batch = TokenBatch::from_sequences(seqs);
  EXPECT_THROW(m.logits(batch), ValidationError);
  Tensor logits = m.logits(batch, {.allow_over_length = true});
  for (auto v : logits.values()) EXPECT_TRUE(std::isfinite(v));
  EXPECT_THROW(sequence_log_prob(m, random_residues(rng, 63)), ValidationError);
  EXPECT_NO_THROW(sequence_log_prob(m, random_residues(rng, 62)));
}

TEST(LanguageModel, SequenceLogProbContract) {
  ProteinLM m(tiny_config());
  scramble(m, 2);
  auto lp = sequence_log_prob(m, "MKTAYIAK");
  ASSERT_EQ(lp.per_position.size(), 9u);
  double s = 0;
  for (double v : lp.per_position) {
    EXPECT_LE(v, 0);
    s += v;
  }
  EXPECT_EQ(lp.total, s);
  auto no_eos = sequence_log_prob(m, "MKTAYIAK", false);
  ASSERT_EQ(no_eos.per_position.size(), 8u);
  for (std::size_t i = 0; i < 8; ++i) EXPECT_EQ(no_eos.per_position[i], lp.per_position[i]);
}

TEST(LanguageModel, StrictlyAutoregressive) {
  Rng rng(99);
  for (int trial = 0; trial < 20; ++trial) {
    ModelConfig c = tiny_config(static_cast<std::uint64_t>(trial));
    c.n_layers = 1 + trial % 2;
    ProteinLM m(c);
    scramble(m, static_cast<std::uint64_t>(100 + trial));
    std::string s = random_residues(rng, 6 + rng.index(20));
    const std::size_t t = rng.index(s.size());
    auto before = sequence_log_prob(m, s);
    s[t] = s[t] == 'A' ? 'W' : 'A';
    auto after = sequence_log_prob(m, s);
    for (std::size_t i = 0; i < t; ++i) {
      EXPECT_EQ(before.per_position[i], after.per_position[i]) << "trial " << trial;
    }
    EXPECT_NE(before.per_position[t], after.per_position[t]);
  }
}

TEST(LanguageModel, LearnedPositionAblationRuns) {
  ModelConfig c = tiny_config();
  c.position_encoding = PositionEncoding::kLearned;
  c.use_conv = false;
  ProteinLM m(c);
  EXPECT_TRUE(m.parameters().contains("embed.positions"));
  EXPECT_TRUE(std::isfinite(sequence_log_prob(m, "ACDE").total));
}

TEST(LanguageModel, FullModelGradCheck) {
  ProteinLM m(tiny_config());
  scramble(m, 6, 0.2);
  std::vector<seq::TokenSeq> seqs = {seq::tokenize("MKTAYIA"), seq::tokenize("GHL")};
  auto batch = TokenBatch::from_sequences(seqs);
  std::vector<int> targets(batch.ids.size(), seq::kPad);
  for (std::size_t b = 0; b < batch.batch; ++b) {
    for (std::size_t t = 0; t + 1 < batch.steps; ++t) {
      targets[b * batch.steps + t] = batch.at(b, t + 1);
    }
  }
  std::vector<nn::Parameter*> params;
  for (auto& p : m.parameters()) params.push_back(&p);
  auto r = nn::grad_check(
      [&](Graph& g) { return nn::cross_entropy(g, m.forward(g, batch), targets, seq::kPad); },
      params, {.eps = 1e-5});
  EXPECT_LT(r.max_rel_error, 1e-4) << m.parameters()[r.worst_input].name;
  EXPECT_GT(r.checked, 1000u);
}

TEST(Checkpoint, RoundTripIsBitExact) {
  ProteinLM m(tiny_config(5));
  scramble(m, 5);
  const std::string bytes = serialize_checkpoint(m, 123, "beta1=0.9\n");
  auto loaded = deserialize_checkpoint(bytes, "mem");
  EXPECT_EQ(loaded.step, 123u);
  EXPECT_EQ(loaded.metadata, "beta1=0.9\n");
  EXPECT_EQ(loaded.model.config(), m.config());
  std::vector<seq::TokenSeq> seqs = {seq::tokenize("MKTAYIAKQR")};
  auto batch = TokenBatch::from_sequences(seqs);
  EXPECT_TRUE(loaded.model.logits(batch).identical(m.logits(batch)));
  EXPECT_EQ(serialize_checkpoint(loaded.model, 123, "beta1=0.9\n"), bytes);
}

TEST(Checkpoint, CorruptedByteFailsChecksum) {
  ProteinLM m(tiny_config());
  std::string bytes = serialize_checkpoint(m, 0, "");
  for (std::size_t pos : {std::size_t{3}, bytes.size() / 2, bytes.size() - 1}) {
    std::string bad = bytes;
    bad[pos] = static_cast<char>(bad[pos] ^ 0x20);
    EXPECT_THROW(deserialize_checkpoint(bad, "mem"), ChecksumError);
  }
  EXPECT_THROW(deserialize_checkpoint(bytes.substr(0, 6), "mem"), ParseError);
}

TEST(Checkpoint, MismatchedVocabIsConfigError) {
  ModelConfig c = tiny_config();
  c.vocab_size = 25;
  EXPECT_THROW(deserialize_checkpoint(serialize_checkpoint(ProteinLM(c), 0, ""), "mem"),
               ConfigError);
}

TEST(Checkpoint, FileRoundTrip) {
  const auto path = std::filesystem::temp_directory_path() / "protfit_model_test.ckpt";
  ProteinLM m(tiny_config(9));
  save_checkpoint(path, m, 7, "");
  auto loaded = load_checkpoint(path);
  EXPECT_EQ(loaded.step, 7u);
  for (std::size_t i = 0; i < m.parameters().count(); ++i) {
    EXPECT_TRUE(loaded.model.parameters()[i].value.identical(m.parameters()[i].value));
  }
  std::filesystem::remove(path);
}

}  // namespace
}  // namespace protfit::model
