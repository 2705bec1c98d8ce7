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
#include <span>
#include <vector>

#include "protfit/nn/graph.hpp"

namespace protfit::nn {

struct GradCheckOptions {
  double eps = 1e-6;
  /// Denominator floor: rel = |a - n| / max(|a|, |n|, floor).
  double floor = 1e-6;
};

struct GradCheckResult {
  double max_rel_error = 0.0;
  std::size_t worst_input = 0;
  std::size_t worst_index = 0;
  double analytic = 0.0;
  double numeric = 0.0;
  std::size_t checked = 0;
};

/// Compares backward() gradients with central differences for every element
/// of every parameter. `loss` must build a scalar from the parameters using
/// Graph::parameter. Parameter values are restored before returning.
GradCheckResult grad_check(const std::function<Var(Graph&)>& loss,
                           std::span<Parameter* const> params,
                           const GradCheckOptions& options = {});

/// Convenience form over plain input tensors.
GradCheckResult grad_check(
    const std::function<Var(Graph&, const std::vector<Var>&)>& f,
    std::vector<Tensor> inputs, const GradCheckOptions& options = {});

}  // namespace protfit::nn
