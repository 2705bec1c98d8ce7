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

#include "protfit/train/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "protfit/nn/ops.hpp"
#include "protfit/seq/vocab.hpp"
#include "protfit/train/adamw.hpp"
#include "protfit/util/error.hpp"
#include "protfit/util/io.hpp"

namespace protfit::train {

std::string LossTrace::to_csv() const {
  std::string out = "step,lr,loss\n";
  for (const auto& r : records) {
    out += std::to_string(r.step) + "," + format_exact(r.lr) + "," + format_exact(r.loss) + "\n";
  }
  return out;
}

seq::TokenSeq make_training_example(const seq::ProteinSequence& s, std::size_t max_context,
                                    double mirror_prob, Rng& rng) {
  if (max_context < 3) throw ConfigError("max_context too small for a training example");
  const bool flip = rng.bernoulli(mirror_prob);
  const std::size_t room = max_context - 2;
  seq::ProteinSequence piece = s;
  if (s.residues.size() > room) {
    const std::size_t start = rng.index(s.residues.size() - room + 1);
    piece.residues = s.residues.substr(start, room);
  }
  piece = seq::impute_indeterminates(piece, rng);
  if (flip) piece = seq::mirror(piece);
  return seq::tokenize(piece);
}

namespace {

template <class T>
void shuffle(std::vector<T>& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::swap(v[i - 1], v[rng.index(i)]);
  }
}

// Per-epoch batches: shuffle, sort pools of several batches by length so
// that padding stays small, cut, then shuffle the batch order.
class BucketSampler {
 public:
  BucketSampler(const std::vector<seq::ProteinSequence>& data, std::size_t batch_size)
      : data_(data), batch_size_(batch_size) {}

  std::vector<std::size_t> next(Rng& rng) {
    if (cursor_ == batches_.size()) refill(rng);
    return batches_[cursor_++];
  }

 private:
  void refill(Rng& rng) {
    constexpr std::size_t kPoolBatches = 8;
    std::vector<std::size_t> order(data_.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    shuffle(order, rng);
    batches_.clear();
    const std::size_t pool = batch_size_ * kPoolBatches;
    for (std::size_t p = 0; p < order.size(); p += pool) {
      auto first = order.begin() + static_cast<std::ptrdiff_t>(p);
      auto last = order.begin() + static_cast<std::ptrdiff_t>(std::min(order.size(), p + pool));
      std::stable_sort(first, last, [&](std::size_t a, std::size_t b) {
        return data_[a].length() < data_[b].length();
      });
      for (auto it = first; it < last; it += static_cast<std::ptrdiff_t>(
                                           std::min<std::size_t>(batch_size_, last - it))) {
        batches_.emplace_back(it, it + static_cast<std::ptrdiff_t>(
                                           std::min<std::size_t>(batch_size_, last - it)));
      }
    }
    shuffle(batches_, rng);
    cursor_ = 0;
  }

  const std::vector<seq::ProteinSequence>& data_;
  std::size_t batch_size_;
  std::vector<std::vector<std::size_t>> batches_;
  std::size_t cursor_ = 0;
};

std::vector<int> next_token_targets(const model::TokenBatch& batch) {
  std::vector<int> targets(batch.ids.size(), seq::kPad);
  for (std::size_t b = 0; b < batch.batch; ++b) {
    for (std::size_t t = 0; t + 1 < batch.steps; ++t) {
      targets[b * batch.steps + t] = batch.at(b, t + 1);
    }
  }
  return targets;
}

}  // namespace

TrainResult train(const std::vector<seq::ProteinSequence>& corpus, model::ProteinLM& model,
                  const TrainConfig& cfg, const TrainOptions& options) {
  cfg.validate();
  TrainResult result;
  result.filtered = seq::filter_training_sequences(corpus, options.cluster_map);
  const auto& kept = result.filtered.kept;
  if (kept.empty()) {
    throw ValidationError("training corpus is empty after filtering (" +
                          std::to_string(result.filtered.rejected.size()) + " rejected)");
  }

  Rng root(cfg.seed);
  Rng split_rng = root.split();
  Rng data_rng = root.split();

  // Validation split: only indeterminate-free sequences are eligible.
  std::vector<std::size_t> eligible;
  for (std::size_t i = 0; i < kept.size(); ++i) {
    if (!seq::has_indeterminates(kept[i].residues)) eligible.push_back(i);
  }
  std::size_t n_val = static_cast<std::size_t>(
      std::floor(cfg.validation_fraction * static_cast<double>(kept.size())));
  n_val = std::min({n_val, eligible.size(), kept.size() - 1});
  shuffle(eligible, split_rng);
  std::set<std::size_t> val_index(eligible.begin(),
                                  eligible.begin() + static_cast<std::ptrdiff_t>(n_val));
  std::vector<seq::ProteinSequence> train_set, val_set;
  for (std::size_t i = 0; i < kept.size(); ++i) {
    if (val_index.count(i)) {
      val_set.push_back(kept[i]);
      result.validation_ids.push_back(kept[i].id);
    } else {
      train_set.push_back(kept[i]);
      result.train_ids.push_back(kept[i].id);
    }
  }

  AdamW opt({cfg.beta1, cfg.beta2, cfg.adam_eps, cfg.weight_decay, cfg.max_grad_norm});
  BucketSampler sampler(train_set, cfg.batch_size);
  auto& params = model.parameters();
  const std::size_t max_context = model.config().max_context;

  for (std::size_t step = 1; step <= cfg.steps; ++step) {
    const double lr = lr_schedule(step, cfg);
    std::vector<seq::TokenSeq> examples;
    for (std::size_t idx : sampler.next(data_rng)) {
      examples.push_back(
          make_training_example(train_set[idx], max_context, cfg.mirror_prob, data_rng));
    }
    const auto batch = model::TokenBatch::from_sequences(examples);
    const auto targets = next_token_targets(batch);

    params.zero_grad();
    nn::Graph g;
    nn::Var loss = nn::cross_entropy(g, model.forward(g, batch), targets, seq::kPad);
    g.backward(loss);
    opt.step(params, lr);
    result.trace.records.push_back({step, lr, static_cast<double>(g.value(loss)[0])});

    const bool cadence = cfg.checkpoint_every > 0 && step % cfg.checkpoint_every == 0;
    if (options.on_checkpoint && (cadence || step == cfg.steps)) {
      options.on_checkpoint(step, model, opt.describe());
    }
  }
  if (!val_set.empty()) result.validation_loss = corpus_loss(model, val_set);
  return result;
}

double corpus_loss(const model::ProteinLM& model, const std::vector<seq::ProteinSequence>& seqs,
                   std::size_t batch_size) {
  if (seqs.empty()) throw ValidationError("corpus_loss: no sequences");
  const std::size_t room = model.config().max_context - 2;
  double total = 0.0;
  std::size_t count = 0;
  for (std::size_t first = 0; first < seqs.size(); first += batch_size) {
    std::vector<seq::TokenSeq> tokens;
    for (std::size_t i = first; i < std::min(seqs.size(), first + batch_size); ++i) {
      tokens.push_back(seq::tokenize(std::string_view(seqs[i].residues).substr(0, room)));
    }
    const auto batch = model::TokenBatch::from_sequences(tokens);
    const nn::Tensor logp = nn::log_softmax(model.logits(batch));
    const std::size_t vocab = logp.last_dim();
    for (std::size_t b = 0; b < batch.batch; ++b) {
      for (std::size_t t = 0; t + 1 < batch.steps; ++t) {
        const int target = batch.at(b, t + 1);
        if (target == seq::kPad) break;
        total -= static_cast<double>(logp[(b * batch.steps + t) * vocab +
                                          static_cast<std::size_t>(target)]);
        ++count;
      }
    }
  }
  return total / static_cast<double>(count);
}

}  // namespace protfit::train
