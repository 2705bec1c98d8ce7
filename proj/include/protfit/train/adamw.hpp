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
#include <string>
#include <vector>

#include "protfit/nn/graph.hpp"

namespace protfit::train {

struct AdamWOptions {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 0.0;
  double max_grad_norm = 0.0;  // 0: no clipping
};

// Adam with decoupled weight decay. Moment buffers follow the parameter
// order of the set passed to step().
class AdamW {
 public:
  explicit AdamW(AdamWOptions options = {}) : options_(options) {}

  /// One update from the gradients stored in `params`. Throws NumericError
  /// naming the parameter if any gradient is non-finite. Returns the global
  /// gradient norm before clipping.
  double step(nn::ParameterSet& params, double lr);

  std::size_t steps_taken() const { return t_; }
  const AdamWOptions& options() const { return options_; }
  /// key=value description stored alongside checkpoints.
  std::string describe() const;

 private:
  AdamWOptions options_;
  std::size_t t_ = 0;
  std::vector<std::vector<double>> m_, v_;
};

}  // namespace protfit::train
