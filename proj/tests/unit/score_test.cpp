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

#include "protfit/model/lm.hpp"
#include "protfit/retrieval/profile.hpp"
#include "protfit/score/scorer.hpp"
#include "protfit/seq/mutation.hpp"
#include "protfit/seq/vocab.hpp"
#include "protfit/util/error.hpp"
#include "protfit/util/rng.hpp"
#include "synthetic.hpp"

namespace protfit::score {
namespace {

// Explicit joint distribution over all 2-residue sequences, read off by the
// chain rule.
class PairModel final : public SequenceModel {
 public:
  explicit PairModel(std::uint64_t seed) : joint_(400) {
    Rng rng(seed);
    double z = 0.0;
    for (double& p : joint_) z += (p = 0.05 + rng.uniform());
    for (double& p : joint_) p /= z;
  }
  double joint(std::string_view s) const {
    return joint_[seq::residue_index(s[0]) * 20 + seq::residue_index(s[1])];
  }
  model::SequenceLogProb log_prob(std::string_view s, bool include_eos) const override {
    double first = 0.0;
    for (int b = 0; b < 20; ++b) first += joint_[seq::residue_index(s[0]) * 20 + b];
    model::SequenceLogProb out;
    out.per_position = {std::log(first), std::log(joint(s) / first)};
    if (include_eos) out.per_position.push_back(0.0);
    for (double x : out.per_position) out.total += x;
    return out;
  }
  std::size_t max_residues() const override { return 2; }

 private:
  std::vector<double> joint_;
};

// Position-dependent log-probabilities, with an arbitrary short context.
class TableModel final : public SequenceModel {
 public:
  explicit TableModel(std::size_t max_residues) : max_(max_residues) {}
  model::SequenceLogProb log_prob(std::string_view s, bool include_eos) const override {
    if (s.size() > max_) throw ValidationError("too long");
    model::SequenceLogProb out;
    for (std::size_t i = 0; i < s.size(); ++i) {
      const double prev = i ? seq::residue_index(s[i - 1]) : 0;
      out.per_position.push_back(-1.0 - 0.1 * seq::residue_index(s[i]) - 0.01 * prev);
    }
    if (include_eos) out.per_position.push_back(-0.5);
    for (double x : out.per_position) out.total += x;
    return out;
  }
  std::size_t max_residues() const override { return max_; }

 private:
  std::size_t max_;
};

model::ModelConfig tiny_config() {
  model::ModelConfig c;
  c.n_layers = 1;
  c.n_heads = 4;
  c.d_model = 16;
  c.d_ff = 32;
  c.max_context = 64;
  c.seed = 21;
  return c;
}

TEST(SelectWindow, Examples) {
  const std::vector<std::size_t> p50{50}, p1500{1500}, spread{10, 1900};
  EXPECT_EQ(select_window(p50, 100, 1022), (Window{1, 100}));
  EXPECT_EQ(select_window(p1500, 2000, 1000), (Window{1001, 2000}));
  EXPECT_THROW(select_window(spread, 2000, 1000), ValidationError);
  const std::vector<std::size_t> p3{3};
  EXPECT_EQ(select_window(p3, 2000, 1000), (Window{1, 1000}));
  EXPECT_EQ(select_window({}, 30, 10), (Window{11, 20}));
}

TEST(SelectWindow, CoversPositionsWithinBounds) {
  Rng rng(3);
  for (int trial = 0; trial < 2000; ++trial) {
    const std::size_t len = 1 + rng.index(300), w = 1 + rng.index(120);
    const std::size_t a = 1 + rng.index(len);
    const std::size_t b = std::min(len, a + rng.index(w));
    const std::vector<std::size_t> pos{a, b};
    const Window win = select_window(pos, len, w);
    EXPECT_GE(win.start, 1u);
    EXPECT_LE(win.end, len);
    EXPECT_EQ(win.length(), std::min(len, w));
    EXPECT_TRUE(win.start <= a && b <= win.end);
    EXPECT_EQ(select_window(pos, len, w), win);
  }
}

TEST(FitnessRatio, MatchesEnumeratedJoint) {
  const PairModel m(4);
  for (std::string_view mut : {"AC", "WY", "MK", "AA"}) {
    for (std::string_view wt : {"AA", "KR", "YW"}) {
      const double f = fitness_ratio(m, mut, nullptr, wt, nullptr, {.alpha = 0.0});
      EXPECT_NEAR(f, std::log(m.joint(mut) / m.joint(wt)), 1e-12);
    }
  }
}

retrieval::RetrievalProfile partial_profile(const testing::Landscape& land) {
  const auto msa = land.sample_msa(60, 8);
  auto p = retrieval::build_profile(msa, retrieval::sequence_weights(msa));
  p.columns[1].covered = false;
  p.columns[5].covered = false;
  return p;
}

TEST(FitnessRatio, IdentityAntisymmetryAndAlphaLinearity) {
  const model::ProteinLM lm(tiny_config());
  const LanguageModelScorer m(lm);
  const auto land = testing::Landscape::random(12, 1.0, 5);
  const auto prof = partial_profile(land);
  std::string mut = land.wild_type;
  mut[1] = mut[1] == 'A' ? 'C' : 'A';
  mut[7] = mut[7] == 'W' ? 'Y' : 'W';
  for (bool full : {true, false}) {
    auto at = [&](double alpha) {
      return fitness_ratio(m, mut, &prof, land.wild_type, &prof,
                           {.alpha = alpha, .uncovered_full_weight = full});
    };
    EXPECT_EQ(fitness_ratio(m, land.wild_type, &prof, land.wild_type, &prof, {.alpha = 0.4}), 0.0);
    EXPECT_EQ(at(0.3), -fitness_ratio(m, land.wild_type, &prof, mut, &prof,
                                      {.alpha = 0.3, .uncovered_full_weight = full}));
    const double f0 = at(0.0), f1 = at(1.0);
    for (double alpha : {0.1, 0.6, 0.9}) {
      EXPECT_NEAR(at(alpha), (1 - alpha) * f0 + alpha * f1, 1e-12);
    }
  }
}

TEST(FitnessRatio, AlphaZeroIgnoresProfileExactly) {
  const model::ProteinLM lm(tiny_config());
  const LanguageModelScorer m(lm);
  const auto land = testing::Landscape::random(12, 1.0, 6);
  const auto prof = partial_profile(land);
  std::string mut = land.wild_type;
  mut[3] = mut[3] == 'G' ? 'P' : 'G';
  EXPECT_EQ(fitness_ratio(m, mut, &prof, land.wild_type, &prof, {.alpha = 0.0}),
            fitness_ratio(m, mut, nullptr, land.wild_type, nullptr, {.alpha = 0.0}));
}

TEST(FitnessRatio, AlphaOneTelescopesOverCoveredSites) {
  const TableModel m(64);
  const auto land = testing::Landscape::random(10, 1.0, 7);
  const auto msa = land.sample_msa(40, 2);
  const auto prof = retrieval::build_profile(msa, retrieval::sequence_weights(msa));
  std::string mut = land.wild_type;
  mut[4] = 'W' == mut[4] ? 'Y' : 'W';
  const double expected = prof.columns[4].logp[seq::residue_index(mut[4])] -
                          prof.columns[4].logp[seq::residue_index(land.wild_type[4])];
  EXPECT_NEAR(fitness_ratio(m, mut, &prof, land.wild_type, &prof, {.alpha = 1.0}), expected,
              1e-12);
}

TEST(FitnessRatio, UncoveredSiteKeepsAutoregressiveTerm) {
  const TableModel m(64);
  const auto land = testing::Landscape::random(10, 1.0, 7);
  auto prof = retrieval::build_profile(land.sample_msa(40, 2),
                                       retrieval::sequence_weights(land.sample_msa(40, 2)));
  prof.columns[9].covered = false;
  std::string mut = land.wild_type;
  mut[9] = 'W' == mut[9] ? 'Y' : 'W';
  const double plain = fitness_ratio(m, mut, nullptr, land.wild_type, nullptr, {.alpha = 0.0});
  EXPECT_NEAR(fitness_ratio(m, mut, &prof, land.wild_type, &prof, {.alpha = 1.0}), plain, 1e-12);
  EXPECT_NEAR(fitness_ratio(m, mut, &prof, land.wild_type, &prof,
                            {.alpha = 1.0, .uncovered_full_weight = false}),
              0.0, 1e-12);
}

ScoreRequest request_for(const seq::ProteinSequence& wt, std::vector<std::string> codes,
                         const retrieval::RetrievalProfile* prof = nullptr) {
  ScoreRequest r;
  r.wild_type = wt;
  r.profile = prof;
  for (const auto& c : codes) r.mutants.push_back(seq::parse_mutation(c, wt));
  return r;
}

TEST(ScoreBidirectional, RecordContract) {
  const model::ProteinLM lm(tiny_config());
  const LanguageModelScorer m(lm);
  const seq::ProteinSequence wt{"wt", "MKTAYIAKQRQISFVKSHFS", ""};
  const auto req = request_for(wt, {"", "K2A", "A4W:S13P", "del5-7", "ins3:GG"});
  const auto both = score_bidirectional(req, m);
  ASSERT_EQ(both.size(), 5u);
  EXPECT_EQ(both[0].F_forward, 0.0);
  EXPECT_EQ(both[0].F_reverse, 0.0);
  for (const auto& r : both) {
    ASSERT_TRUE(r.F_reverse);
    EXPECT_EQ(r.F, (r.F_forward + *r.F_reverse) / 2);
  }
  EXPECT_EQ(both[2].mutant, "A4W:S13P");
  const auto fwd = score_bidirectional(req, m, {.fusion = {}, .bidirectional = false});
  for (std::size_t i = 0; i < fwd.size(); ++i) {
    EXPECT_EQ(fwd[i].F, fwd[i].F_forward);
    EXPECT_FALSE(fwd[i].F_reverse);
    EXPECT_EQ(fwd[i].F_forward, both[i].F_forward);
  }
}

TEST(ScoreBidirectional, ReverseMatchesMirroredForwardScore) {
  const TableModel m(64);
  const seq::ProteinSequence wt{"wt", "MKTAYIAKQR", ""};
  const auto rec = score_bidirectional(request_for(wt, {"T3W"}), m).front();
  const double expected = m.log_prob("RQKAIYWKM", true).total - m.log_prob("RQKAIYATKM", true).total;
  (void)expected;
  const double mirrored =
      m.log_prob("RQKAIYAWKM", true).total - m.log_prob("RQKAIYATKM", true).total;
  EXPECT_NEAR(*rec.F_reverse, mirrored, 1e-12);
}

TEST(ScoreBidirectional, ThreadCountDoesNotChangeResults) {
  const model::ProteinLM lm(tiny_config());
  const LanguageModelScorer m(lm);
  const auto land = testing::Landscape::random(30, 1.0, 9);
  const auto msa = land.sample_msa(50, 3);
  const auto prof = retrieval::build_profile(msa, retrieval::sequence_weights(msa));
  const seq::ProteinSequence wt{"wt", land.wild_type, ""};
  std::vector<std::string> codes;
  for (std::size_t i = 0; i < 30; i += 3) {
    codes.push_back(std::string(1, wt.residues[i]) + std::to_string(i + 1) +
                    (wt.residues[i] == 'A' ? "C" : "A"));
  }
  codes.push_back("del3-4");
  const auto req = request_for(wt, codes, &prof);
  const auto one = score_bidirectional(req, m, {.fusion = {}, .bidirectional = true, .jobs = 1});
  const auto four = score_bidirectional(req, m, {.fusion = {}, .bidirectional = true, .jobs = 4});
  EXPECT_EQ(format_scores(one), format_scores(four));
}

TEST(ScoreBidirectional, WindowsForLongSequences) {
  const TableModel m(8);
  const seq::ProteinSequence wt{"wt", "MKTAYIAKQRQISFVKSHFS", ""};
  const auto recs = score_bidirectional(request_for(wt, {"V15A", "M1W"}), m);
  EXPECT_EQ(recs[0].window, (Window{12, 19}));
  // Position 15 sits at mirrored position 6.
  EXPECT_EQ(recs[0].reverse_window, (Window{3, 10}));
  EXPECT_EQ(recs[1].window, (Window{1, 8}));
  EXPECT_EQ(recs[1].reverse_window, (Window{13, 20}));
  EXPECT_THROW(score_bidirectional(request_for(wt, {"M1W:S20A"}), m), ValidationError);
}

TEST(ScoreBidirectional, ImputationIsSeededAndShared) {
  const TableModel m(64);
  const seq::ProteinSequence wt{"wt", "MKXAYIBKQR", ""};
  const auto req = request_for(wt, {"", "K2A"});
  const auto a = score_bidirectional(req, m, {.fusion = {}, .bidirectional = true, .jobs = 1, .imputation_seed = 1});
  EXPECT_EQ(a[0].F, 0.0);
  EXPECT_EQ(format_scores(a), format_scores(score_bidirectional(req, m, {.fusion = {}, .bidirectional = true, .jobs = 1, .imputation_seed = 1})));
}

std::vector<FitnessRecord> records(std::vector<std::pair<std::string, double>> rows) {
  std::vector<FitnessRecord> out;
  for (auto& [code, f] : rows) {
    FitnessRecord r;
    r.mutant = code;
    r.F = r.F_forward = f;
    r.F_reverse = f;
    r.window = {1, 10};
    out.push_back(r);
  }
  return out;
}

TEST(ScoreFiles, FormatAndParseRoundTrip) {
  const auto text = format_scores(records({{"A1C", 0.25}, {"K2A:Q3R", -1.5}}));
  EXPECT_EQ(text,
            "mutant,F,F_forward,F_reverse,window_start,window_end\n"
            "A1C,0.25000000,0.25000000,0.25000000,1,10\n"
            "K2A:Q3R,-1.50000000,-1.50000000,-1.50000000,1,10\n");
  const auto t = parse_scores(text, "a.csv");
  EXPECT_EQ(format_scores(t.records), text);
  EXPECT_THROW(parse_scores(text + "A1C,1,1,1,1,10\n", "a.csv"), ValidationError);
}

TEST(Ensemble, Examples) {
  const auto a = parse_scores(format_scores(records({{"A1C", 0.5}, {"K2A", -1.0}})), "a");
  const auto neg = parse_scores(format_scores(records({{"A1C", -0.5}, {"K2A", 1.0}})), "b");
  const auto c = parse_scores(format_scores(records({{"K2A", 2.0}, {"A1C", 0.25}})), "c");

  const auto single = ensemble_scores({a});
  EXPECT_EQ(format_scores(single.records), format_scores(a.records));
  EXPECT_EQ(format_ensemble(single),
            "mutant,F,F_forward,F_reverse,window_start,window_end,n_models,sources\n"
            "A1C,0.50000000,0.50000000,0.50000000,1,10,1,a\n"
            "K2A,-1.00000000,-1.00000000,-1.00000000,1,10,1,a\n");

  for (const auto& r : ensemble_scores({a, neg}).records) EXPECT_EQ(r.F, 0.0);

  const auto three = ensemble_scores({a, neg, c});
  EXPECT_DOUBLE_EQ(three.records[0].F, (0.5 - 0.5 + 0.25) / 3);
  EXPECT_DOUBLE_EQ(three.records[1].F, (-1.0 + 1.0 + 2.0) / 3);
  EXPECT_EQ(three.sources, (std::vector<std::string>{"a", "b", "c"}));

  const auto other = parse_scores(format_scores(records({{"A1C", 0.5}, {"W3A", 1.0}})), "d");
  EXPECT_THROW(ensemble_scores({a, other}), ValidationError);
}

}  // namespace
}  // namespace protfit::score
