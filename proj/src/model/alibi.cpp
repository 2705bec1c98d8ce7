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

#include "protfit/model/alibi.hpp"

#include <cmath>
#include <limits>

#include "protfit/util/error.hpp"

namespace protfit::model {

namespace {

std::vector<double> geometric_slopes(std::size_t n) {
  std::vector<double> out(n);
  for (std::size_t i = 1; i <= n; ++i) {
    out[i - 1] = std::exp2(-8.0 * static_cast<double>(i) / static_cast<double>(n));
  }
  return out;
}

}  // namespace

std::vector<std::vector<double>> alibi_slopes(std::size_t n_heads, SlopeLayout layout) {
  if (n_heads == 0 || n_heads % kHeadGroups != 0) {
    throw ConfigError("alibi_slopes: n_heads (" + std::to_string(n_heads) +
                      ") must be a positive multiple of 4");
  }
  const std::size_t h = n_heads / kHeadGroups;
  std::vector<std::vector<double>> groups(kHeadGroups);
  if (layout == SlopeLayout::kRepeated) {
    for (auto& g : groups) g = geometric_slopes(h);
  } else {
    const auto all = geometric_slopes(n_heads);
    for (std::size_t g = 0; g < kHeadGroups; ++g) {
      groups[g].assign(all.begin() + static_cast<std::ptrdiff_t>(g * h),
                       all.begin() + static_cast<std::ptrdiff_t>((g + 1) * h));
    }
  }
  return groups;
}

GroupedAlibiBias GroupedAlibiBias::build(std::vector<double> head_slopes,
                                         std::size_t steps) {
  GroupedAlibiBias out;
  const std::size_t n_heads = head_slopes.size();
  out.bias = nn::Tensor({n_heads, steps, steps});
  constexpr nn::Scalar kNegInf = -std::numeric_limits<nn::Scalar>::infinity();
  for (std::size_t h = 0; h < n_heads; ++h) {
    const auto slope = static_cast<nn::Scalar>(head_slopes[h]);
    for (std::size_t i = 0; i < steps; ++i) {
      nn::Scalar* row = out.bias.data() + (h * steps + i) * steps;
      for (std::size_t j = 0; j < steps; ++j) {
        row[j] = j <= i ? -slope * static_cast<nn::Scalar>(i - j) : kNegInf;
      }
    }
  }
  out.head_slopes = std::move(head_slopes);
  return out;
}

GroupedAlibiBias GroupedAlibiBias::from_config(const ModelConfig& config,
                                               std::size_t steps) {
  std::vector<double> flat;
  for (const auto& group : alibi_slopes(config.n_heads, config.slope_layout)) {
    flat.insert(flat.end(), group.begin(), group.end());
  }
  return build(std::move(flat), steps);
}

nn::Tensor causal_mask(std::size_t n_heads, std::size_t steps) {
  return GroupedAlibiBias::build(std::vector<double>(n_heads, 0.0), steps).bias;
}

}  // namespace protfit::model
