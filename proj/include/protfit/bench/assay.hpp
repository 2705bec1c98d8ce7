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

#include "protfit/seq/sequence.hpp"
#include "protfit/util/csv.hpp"

namespace protfit::bench {

enum class CutoffMethod { kManual, kMedian };

/// One row of the reference metadata file.
struct AssayMetadata {
  std::string assay_id;
  std::string uniprot_id;
  std::optional<double> cutoff;
  CutoffMethod method = CutoffMethod::kMedian;
  std::string msa_depth_bucket;
  std::string mutation_depth_bucket;
  std::string taxon;
};

/// `assay_id,uniprot_id,cutoff,cutoff_method,msa_depth_bucket,mutation_depth_bucket,taxon`.
std::vector<AssayMetadata> parse_reference(const CsvTable& table);
std::string format_reference(const std::vector<AssayMetadata>& rows);

struct AssayRecord {
  std::string mutant;  // canonical code
  double dms_score;    // higher is fitter
};

struct AssayTable {
  std::string assay_id;
  std::optional<AssayMetadata> metadata;
  std::vector<AssayRecord> rows;
};

struct PreprocessSummary {
  std::size_t input_rows = 0;
  std::size_t silent_removed = 0;
  std::size_t duplicates_merged = 0;
  std::size_t missing_dropped = 0;
  std::vector<std::string> errors;  // unparseable mutant codes, one per row
};

/// Assay CSV with `mutant` and `DMS_score` columns. Silent edits are
/// removed, duplicate mutants averaged, missing measurements dropped, and
/// malformed codes collected into the summary without stopping the run.
AssayTable preprocess_assay(const CsvTable& raw, const seq::ProteinSequence& wild_type,
                            PreprocessSummary* summary = nullptr);

struct Labels {
  std::vector<int> values;
  double cutoff = 0.0;
  bool defaulted = false;  // no metadata: median used
};

/// label = dms_score > cutoff. A recorded cutoff is used as is; otherwise
/// the median of the scores.
Labels binarize_labels(const AssayTable& table);

}  // namespace protfit::bench
