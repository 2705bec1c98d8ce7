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

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "protfit/bench/assay.hpp"

namespace protfit::bench {

struct AssayMetrics {
  std::string assay_id;
  std::size_t n = 0;
  std::optional<double> spearman;
  std::optional<double> auc;
  std::optional<double> mcc;
  bool mcc_degenerate = false;
};

/// Metrics for one assay given predictions aligned with its rows.
AssayMetrics evaluate_assay(const AssayTable& table, const std::vector<double>& predictions);

struct MetricSummary {
  std::optional<double> spearman, auc, mcc;
  std::size_t n_assays = 0;
  std::size_t n_uniprots = 0;
};

struct AggregateReport {
  MetricSummary overall;
  std::map<std::string, MetricSummary> per_uniprot;
  /// dimension ("msa_depth", "mutation_depth", "taxon") -> bucket -> summary
  std::map<std::string, std::map<std::string, MetricSummary>> buckets;
};

/// Unweighted mean over assays within each uniprot id, then over ids.
/// Absent values are left out of both means. Every assay must appear in
/// `metadata`.
AggregateReport aggregate(const std::vector<AssayMetrics>& assays,
                          const std::map<std::string, AssayMetadata>& metadata);

std::string format_assay_metrics(const std::vector<AssayMetrics>& assays);
/// `group,bucket,n_assays,n_uniprots,spearman,auc,mcc`.
std::string format_summary(const AggregateReport& report);
/// Fixed-width text tables, one block per grouping.
std::string format_text_report(const AggregateReport& report);

}  // namespace protfit::bench
