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

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "protfit/model/lm.hpp"
#include "protfit/seq/sequence.hpp"
#include "protfit/train/config.hpp"
#include "protfit/util/rng.hpp"

namespace protfit::train {

struct LossRecord {
  std::size_t step;
  double lr;
  double loss;  // nats per target token, measured before the update
};

struct LossTrace {
  std::vector<LossRecord> records;
  /// `step,lr,loss` CSV.
  std::string to_csv() const;
};

/// Augmented example: mirror decision, random slice when the sequence does
/// not fit `max_context`, imputation, then BOS/EOS. Draw order is fixed so
/// that for one seed the mirrored result is the mirror of the unmirrored one.
seq::TokenSeq make_training_example(const seq::ProteinSequence& s, std::size_t max_context,
                                    double mirror_prob, Rng& rng);

struct TrainOptions {
  std::optional<std::map<std::string, std::string>> cluster_map;
  /// Called every checkpoint_every steps and after the final step.
  std::function<void(std::size_t step, const model::ProteinLM&, const std::string& optimizer)>
      on_checkpoint;
};

struct TrainResult {
  LossTrace trace;
  seq::FilterResult filtered;
  std::vector<std::string> train_ids;
  std::vector<std::string> validation_ids;
  std::optional<double> validation_loss;
};

/// Trains `model` in place. Deterministic for a given seed.
TrainResult train(const std::vector<seq::ProteinSequence>& corpus, model::ProteinLM& model,
                  const TrainConfig& cfg, const TrainOptions& options = {});

/// Mean per-token cross-entropy (nats, EOS included) of unaugmented
/// sequences, truncated to the model context. Sequences must be free of
/// indeterminates.
double corpus_loss(const model::ProteinLM& model,
                   const std::vector<seq::ProteinSequence>& seqs,
                   std::size_t batch_size = 16);

}  // namespace protfit::train
