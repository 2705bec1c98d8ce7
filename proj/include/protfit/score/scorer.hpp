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
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "protfit/model/lm.hpp"
#include "protfit/retrieval/profile.hpp"
#include "protfit/seq/mutation.hpp"

namespace protfit::score {

/// Anything that assigns autoregressive per-token log-probabilities.
class SequenceModel {
 public:
  virtual ~SequenceModel() = default;
  virtual model::SequenceLogProb log_prob(std::string_view residues, bool include_eos) const = 0;
  /// Longest residue string accepted by log_prob.
  virtual std::size_t max_residues() const = 0;
};

class LanguageModelScorer final : public SequenceModel {
 public:
  explicit LanguageModelScorer(const model::ProteinLM& model) : model_(model) {}
  model::SequenceLogProb log_prob(std::string_view residues, bool include_eos) const override {
    return model::sequence_log_prob(model_, residues, include_eos);
  }
  std::size_t max_residues() const override { return model_.config().max_context - 2; }

 private:
  const model::ProteinLM& model_;
};

/// 1-based inclusive range.
struct Window {
  std::size_t start = 1;
  std::size_t end = 0;
  std::size_t length() const { return end + 1 - start; }
  bool operator==(const Window&) const = default;
};

/// Full sequence when it fits; otherwise `window_len` residues centred on
/// floor(mean(positions)) and shifted back inside [1, seq_len]. Throws
/// ValidationError when the positions cannot share one window.
Window select_window(std::span<const std::size_t> positions, std::size_t seq_len,
                     std::size_t window_len);

struct FusionOptions {
  double alpha = 0.6;
  bool include_eos = true;
  /// At positions without a retrieval term the autoregressive term keeps
  /// weight 1; when false it is scaled by (1 - alpha) like everywhere else.
  bool uncovered_full_weight = true;
};

/// sum_i w_i a_i + alpha r_i with w_i = 1 - alpha where r_i exists. `profile`,
/// when given, must be aligned position-for-position with `residues`.
double fused_log_likelihood(const SequenceModel& model, std::string_view residues,
                            const retrieval::RetrievalProfile* profile,
                            const FusionOptions& fusion);

/// log P(mut) - log P(wt) with both terms from fused_log_likelihood.
double fitness_ratio(const SequenceModel& model, std::string_view mutant,
                     const retrieval::RetrievalProfile* mutant_profile,
                     std::string_view wild_type,
                     const retrieval::RetrievalProfile* wild_type_profile,
                     const FusionOptions& fusion);

struct FitnessRecord {
  std::string mutant;
  double F = 0.0;
  double F_forward = 0.0;
  std::optional<double> F_reverse;
  Window window;          // forward direction, mutant coordinates
  Window reverse_window;  // mirrored mutant coordinates
};

struct ScoreOptions {
  FusionOptions fusion;
  bool bidirectional = true;
  std::size_t jobs = 1;
  /// Seed of the single imputation draw made per scoring call.
  std::uint64_t imputation_seed = 0;
};

struct ScoreRequest {
  seq::ProteinSequence wild_type;
  std::vector<seq::MutationSet> mutants;
  const retrieval::RetrievalProfile* profile = nullptr;  // seed = wild type
};

/// Scores every mutant; output order follows the request.
std::vector<FitnessRecord> score_bidirectional(const ScoreRequest& request,
                                               const SequenceModel& model,
                                               const ScoreOptions& options = {});

/// `mutant,F,F_forward,F_reverse,window_start,window_end`.
std::string format_scores(const std::vector<FitnessRecord>& records);

struct ScoreTable {
  std::string source;
  std::vector<FitnessRecord> records;
  std::vector<std::string> sources;  // provenance carried by ensembled files
};

ScoreTable parse_scores(std::string_view text, const std::string& source);

/// Per-mutant arithmetic mean over tables with identical mutant sets.
ScoreTable ensemble_scores(const std::vector<ScoreTable>& tables);
/// Score columns plus `n_models,sources`.
std::string format_ensemble(const ScoreTable& table);

}  // namespace protfit::score
