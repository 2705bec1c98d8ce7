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
#include <string>
#include <string_view>

namespace protfit::train {

struct TrainConfig {
  std::size_t steps = 1000;
  std::size_t batch_size = 8;
  double peak_lr = 3e-4;
  std::size_t warmup_steps = 100;
  double weight_decay = 1e-4;
  double mirror_prob = 0.5;
  std::uint64_t seed = 0;
  std::size_t checkpoint_every = 0;  // 0 disables intermediate checkpoints
  double validation_fraction = 0.01;
  double max_grad_norm = 0.0;  // 0 disables clipping
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_eps = 1e-8;

  void validate() const;
  std::string to_text() const;
  static TrainConfig from_text(std::string_view text, const std::string& source);
  bool set(std::string_view key, std::string_view value, const std::string& context);

  bool operator==(const TrainConfig&) const = default;
};

/// Linear warmup from 0 to peak over warmup_steps, then linear decay to 0
/// at cfg.steps.
double lr_schedule(std::size_t step, const TrainConfig& cfg);

}  // namespace protfit::train
