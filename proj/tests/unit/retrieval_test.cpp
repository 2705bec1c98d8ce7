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

#include "protfit/retrieval/msa.hpp"
#include "protfit/retrieval/profile.hpp"
#include "protfit/seq/mutation.hpp"
#include "protfit/seq/vocab.hpp"
#include "protfit/util/error.hpp"
#include "protfit/util/rng.hpp"

namespace protfit::retrieval {
namespace {

double prob(const RetrievalProfile& p, std::size_t pos, char a) {
  return std::exp(p.columns.at(pos).logp[seq::residue_index(a)]);
}

TEST(A2m, MatchColumnsFollowSeed) {
  const auto msa = parse_a2m(">s\nAC-D\n>r\nAgCE-\n");
  EXPECT_EQ(msa.seed_residues, "ACD");
  EXPECT_EQ(msa.match_columns, (std::vector<std::size_t>{0, 1, 3}));
  EXPECT_EQ(msa.rows[1].match, "ACE-");
  EXPECT_EQ(msa.n_cols(), 4u);
}

TEST(A2m, LowercaseSeedLetterIsUnmatched) {
  const auto msa = parse_a2m(">s\nAcD\n>r\nAE\n");
  EXPECT_EQ(msa.seed_residues, "ACD");
  EXPECT_EQ(msa.position_column[1], Msa::kNoColumn);
}

TEST(A2m, Errors) {
  EXPECT_THROW(parse_a2m(""), ParseError);
  EXPECT_THROW(parse_a2m("AC\n>s\nAC\n"), ParseError);
  EXPECT_THROW(parse_a2m(">s\nACD\n>r\nAC\n"), ParseError);
  EXPECT_THROW(parse_a2m(">s\nAC*\n"), ParseError);
}

TEST(A2m, FormatRoundTrip) {
  const std::string text = ">s\nAC-D\n>r\nAgCE-\n";
  const auto msa = parse_a2m(text);
  const auto again = parse_a2m(format_a2m(msa));
  EXPECT_EQ(again.seed_residues, msa.seed_residues);
  ASSERT_EQ(again.n_rows(), msa.n_rows());
  for (std::size_t r = 0; r < msa.n_rows(); ++r) EXPECT_EQ(again.rows[r].match, msa.rows[r].match);
}

TEST(Weights, IdenticalRowsShareWeight) {
  const auto w = sequence_weights(parse_a2m(">a\nACDE\n>b\nACDE\n>c\nACDE\n"));
  for (double x : w.weights) EXPECT_DOUBLE_EQ(x, 1.0 / 3.0);
  EXPECT_NEAR(w.n_eff, 1.0, 1e-15);
}

TEST(Weights, DissimilarRowsAndSingleRow) {
  const auto w = sequence_weights(parse_a2m(">a\nACDEF\n>b\nGHIKL\n>c\nMNPQR\n"));
  for (double x : w.weights) EXPECT_EQ(x, 1.0);
  EXPECT_EQ(sequence_weights(parse_a2m(">a\nAC\n")).weights, std::vector<double>{1.0});
}

TEST(Weights, ThresholdBoundary) {
  // 4 of 5 match columns agree: identity 0.8, inside the 80% neighbourhood.
  const auto w = sequence_weights(parse_a2m(">a\nACDEF\n>b\nACDEG\n"), 0.2);
  EXPECT_DOUBLE_EQ(w.weights[0], 0.5);
  // Gaps count as mismatches: identity 0.6.
  const auto g = sequence_weights(parse_a2m(">a\nACDEF\n>b\nACD--\n"), 0.2);
  EXPECT_DOUBLE_EQ(g.weights[0], 1.0);
  // Shared gaps agree, so duplicated gappy rows stay neighbours.
  const auto d = sequence_weights(parse_a2m(">a\nACDEF\n>b\nAC---\n>c\nAC---\n"), 0.2);
  EXPECT_EQ(d.weights, (std::vector<double>{1.0, 0.5, 0.5}));
}

TEST(Profile, WorkedPseudocountColumn) {
  // Column 0 holds A, A, C with unit weights; rows differ elsewhere.
  const auto msa = parse_a2m(">s\nAD\n>r1\nAE\n>r2\nCF\n");
  const auto w = sequence_weights(msa, 0.0);
  ASSERT_EQ(w.weights, (std::vector<double>{1, 1, 1}));
  const auto p = build_profile(msa, w, 1e-5);
  EXPECT_NEAR(prob(p, 0, 'A'), (2 + 1e-5) / (3 + 2e-4), 1e-12);
  EXPECT_NEAR(prob(p, 0, 'C'), (1 + 1e-5) / (3 + 2e-4), 1e-12);
  EXPECT_NEAR(prob(p, 0, 'W'), 1e-5 / (3 + 2e-4), 1e-12);
}

TEST(Profile, CoverageIgnoresGapsAndIndeterminates) {
  const auto msa = parse_a2m(">s\nAcD\n>r1\nA-\n>r2\nAX\n");
  const auto p = build_profile(msa, sequence_weights(msa));
  EXPECT_TRUE(p.columns[0].covered);
  EXPECT_FALSE(p.columns[1].covered);  // lowercase seed letter
  EXPECT_TRUE(p.columns[2].covered);   // seed residue D
  EXPECT_NEAR(prob(p, 2, 'D'), (1 + 1e-5) / (1 + 2e-4), 1e-12);
}

Msa random_msa(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  Rng rng(seed);
  std::string text;
  for (std::size_t r = 0; r < rows; ++r) {
    text += ">r" + std::to_string(r) + "\n";
    for (std::size_t c = 0; c < cols; ++c) {
      const auto u = rng.index(25);
      text += r == 0 || u < 20 ? seq::residue_char(static_cast<int>(u % 20)) : '-';
    }
    text += "\n";
  }
  return parse_a2m(text);
}

TEST(Profile, ColumnsAreNormalised) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto msa = random_msa(12, 15, seed);
    const auto p = build_profile(msa, sequence_weights(msa));
    for (const auto& col : p.columns) {
      if (!col.covered) continue;
      double s = 0.0;
      for (double lp : col.logp) s += std::exp(lp);
      EXPECT_NEAR(s, 1.0, 1e-12);
    }
  }
}

double kl_to_uniform(const ProfileColumn& c) {
  double kl = 0.0;
  for (double lp : c.logp) kl += std::exp(lp) * (lp + std::log(20.0));
  return kl;
}

TEST(Profile, LargerLambdaMovesTowardUniform) {
  const auto msa = random_msa(8, 10, 3);
  const auto w = sequence_weights(msa);
  const auto a = build_profile(msa, w, 1e-5);
  const auto b = build_profile(msa, w, 0.1);
  const auto c = build_profile(msa, w, 10.0);
  for (std::size_t i = 0; i < a.length(); ++i) {
    EXPECT_GE(kl_to_uniform(a.columns[i]), kl_to_uniform(b.columns[i]) - 1e-12);
    EXPECT_GE(kl_to_uniform(b.columns[i]), kl_to_uniform(c.columns[i]) - 1e-12);
  }
}

TEST(Profile, DuplicatingRowsLeavesProfileUnchanged) {
  const auto msa = random_msa(7, 12, 5);
  const auto base = build_profile(msa, sequence_weights(msa));
  for (std::size_t k : {2, 3, 5}) {
    std::string text;
    for (std::size_t r = 0; r < msa.n_rows(); ++r) {
      for (std::size_t j = 0; j < k; ++j) {
        text += ">" + msa.rows[r].id + "_" + std::to_string(j) + "\n" + msa.rows[r].aligned + "\n";
      }
    }
    const auto dup = parse_a2m(text);
    const auto p = build_profile(dup, sequence_weights(dup));
    for (std::size_t i = 0; i < p.length(); ++i) {
      ASSERT_EQ(p.columns[i].covered, base.columns[i].covered);
      for (int a = 0; a < 20; ++a) {
        EXPECT_NEAR(std::exp(p.columns[i].logp[a]), std::exp(base.columns[i].logp[a]), 1e-12);
      }
    }
  }
}

TEST(Profile, TextRoundTrip) {
  const auto msa = parse_a2m(">s\nAcDE\n>r1\nAEE\n>r2\nCgD-\n");
  const auto p = build_profile(msa, sequence_weights(msa), 1e-3);
  const auto q = RetrievalProfile::from_text(p.to_text(), "p");
  EXPECT_EQ(q.seed_residues, p.seed_residues);
  EXPECT_EQ(q.lambda, p.lambda);
  ASSERT_EQ(q.length(), p.length());
  for (std::size_t i = 0; i < p.length(); ++i) {
    EXPECT_EQ(q.columns[i].covered, p.columns[i].covered);
    if (p.columns[i].covered) {
      EXPECT_EQ(q.columns[i].logp, p.columns[i].logp);
    }
  }
  EXPECT_THROW(RetrievalProfile::from_text("garbage\n", "p"), ParseError);
}

TEST(Profile, RetrievalLogProbsAndMirror) {
  const auto msa = parse_a2m(">s\nAcD\n>r1\nAE\n");
  const auto p = build_profile(msa, sequence_weights(msa));
  const auto lp = retrieval_log_probs("ACE", p);
  ASSERT_TRUE(lp[0] && lp[2]);
  EXPECT_FALSE(lp[1]);
  EXPECT_DOUBLE_EQ(*lp[2], p.columns[2].logp[seq::residue_index('E')]);
  const auto m = mirror(p);
  EXPECT_EQ(m.seed_residues, "DCA");
  EXPECT_EQ(m.columns[0].logp, p.columns[2].logp);
  EXPECT_THROW(retrieval_log_probs("AC", p), ValidationError);
}

const seq::ProteinSequence kWt{"wt", "MKTAYIAKQR", ""};

ColumnMap surgery(std::string_view code, const seq::ProteinSequence& wt = kWt) {
  return surgery_for_indels(wt.residues.size(), seq::parse_mutation(code, wt));
}

TEST(Surgery, Examples) {
  const seq::ProteinSequence three{"t", "MKT", ""};
  EXPECT_EQ(surgery("del2-2", three).source,
            (std::vector<std::optional<std::size_t>>{0, 2}));
  EXPECT_EQ(surgery("ins1:GS", three).source,
            (std::vector<std::optional<std::size_t>>{0, std::nullopt, std::nullopt, 1, 2}));
  EXPECT_EQ(surgery("", three), ColumnMap::identity(3));
  EXPECT_EQ(surgery("K2A", three), ColumnMap::identity(3));
}

TEST(Surgery, RemapMarksInsertionsUncovered) {
  const auto msa = parse_a2m(">s\nMKT\n>r\nMRT\n");
  const auto p = build_profile(msa, sequence_weights(msa));
  const auto r = remap_profile(p, surgery("ins1:G", {"t", "MKT", ""}));
  ASSERT_EQ(r.length(), 4u);
  EXPECT_FALSE(r.columns[1].covered);
  EXPECT_EQ(r.columns[2].logp, p.columns[1].logp);
}

TEST(Surgery, SequentialDeletionsCompose) {
  Rng rng(17);
  const std::size_t n = kWt.residues.size();
  for (int trial = 0; trial < 200; ++trial) {
    // Two disjoint ranges a < b, applied jointly or one after the other.
    std::size_t a0 = rng.index(n), a1 = a0 + rng.index(n - a0);
    if (a1 + 2 >= n) continue;
    std::size_t b0 = a1 + 2 + rng.index(n - a1 - 2), b1 = b0 + rng.index(n - b0);
    auto del = [](std::size_t x, std::size_t y) {
      return "del" + std::to_string(x + 1) + "-" + std::to_string(y + 1);
    };
    const auto joint = surgery(del(a0, a1) + ":" + del(b0, b1));

    const auto first_b = seq::parse_mutation(del(b0, b1), kWt);
    const auto via_b = surgery_for_indels(n, first_b)
                           .then(surgery(del(a0, a1), first_b.mutant));
    EXPECT_EQ(via_b, joint);

    const auto first_a = seq::parse_mutation(del(a0, a1), kWt);
    const std::size_t shift = a1 - a0 + 1;
    const auto via_a = surgery_for_indels(n, first_a)
                           .then(surgery(del(b0 - shift, b1 - shift), first_a.mutant));
    EXPECT_EQ(via_a, joint);
  }
}

TEST(Filter, KeepsRowsAtOrAboveThreshold) {
  const std::string seed = "ACDEFGHIKL";
  const auto msa = parse_a2m(">s\n" + seed + "\n>r10\nACDEFGHIKL\n>r9\nACDEFGHIKW\n" +
                             ">r5\nACDEFWWWWW\n>r2\nACWWWWWWWW\n");
  EXPECT_DOUBLE_EQ(identity_to_seed(msa, 2), 0.9);
  const auto f = filter_by_similarity(msa, 0.6);
  ASSERT_EQ(f.n_rows(), 3u);
  EXPECT_EQ(f.rows[1].id, "r10");
  EXPECT_EQ(f.rows[2].id, "r9");
  EXPECT_EQ(filter_by_similarity(msa, 0.0).n_rows(), 5u);
  EXPECT_EQ(filter_by_similarity(msa, 1.0).n_rows(), 2u);
}

}  // namespace
}  // namespace protfit::retrieval
