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

#include <optional>
#include <span>
#include <vector>

namespace protfit::bench {

/// Average ranks (1-based); tied values share the mean of their ranks.
std::vector<double> average_ranks(std::span<const double> values);

double median(std::span<const double> values);

/// Pearson correlation of average ranks. Absent when fewer than two points
/// or either side has zero rank variance.
std::optional<double> spearman(std::span<const double> x, std::span<const double> y);

/// Mann-Whitney AUC, ties counting one half. Absent unless both classes occur.
std::optional<double> auc(std::span<const double> scores, std::span<const int> labels);

struct MccResult {
  std::optional<double> value;
  bool degenerate = false;  // zero denominator, value reported as 0
};

/// Predictions are score >= median(scores). Absent unless both label
/// classes occur.
MccResult mcc(std::span<const double> scores, std::span<const int> labels);

}  // namespace protfit::bench
