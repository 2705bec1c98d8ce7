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

#include "protfit/bench/assay.hpp"

#include <algorithm>
#include <cmath>

#include "protfit/bench/metrics.hpp"
#include "protfit/seq/mutation.hpp"
#include "protfit/util/error.hpp"
#include "protfit/util/io.hpp"

namespace protfit::bench {

namespace {

bool is_missing(std::string_view field) {
  const std::string_view f = trim(field);
  return f.empty() || f == "NA" || f == "NaN" || f == "nan" || f == "None";
}

}  // namespace

std::vector<AssayMetadata> parse_reference(const CsvTable& table) {
  const std::size_t c_assay = table.require_column("assay_id");
  const std::size_t c_uniprot = table.require_column("uniprot_id");
  const auto c_cut = table.column("cutoff");
  const auto c_method = table.column("cutoff_method");
  const auto c_msa = table.column("msa_depth_bucket");
  const auto c_mut = table.column("mutation_depth_bucket");
  const auto c_taxon = table.column("taxon");
  std::vector<AssayMetadata> out;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& row = table.rows[i];
    const std::string where = table.source + ":" + std::to_string(table.line_numbers[i]);
    AssayMetadata m;
    m.assay_id = row[c_assay];
    m.uniprot_id = row[c_uniprot];
    if (m.assay_id.empty() || m.uniprot_id.empty()) {
      throw ValidationError(where + ": assay_id and uniprot_id are required");
    }
    if (c_cut && !is_missing(row[*c_cut])) m.cutoff = parse_real(row[*c_cut], where + ": cutoff");
    if (c_method && !row[*c_method].empty()) {
      if (row[*c_method] == "manual") m.method = CutoffMethod::kManual;
      else if (row[*c_method] == "median") m.method = CutoffMethod::kMedian;
      else throw ValidationError(where + ": cutoff_method must be manual or median");
    }
    if (m.method == CutoffMethod::kManual && !m.cutoff) {
      throw ValidationError(where + ": manual cutoff_method needs a cutoff value");
    }
    if (c_msa) m.msa_depth_bucket = row[*c_msa];
    if (c_mut) m.mutation_depth_bucket = row[*c_mut];
    if (c_taxon) m.taxon = row[*c_taxon];
    for (const auto& prev : out) {
      if (prev.assay_id == m.assay_id) {
        throw ValidationError(where + ": duplicate assay_id '" + m.assay_id + "'");
      }
    }
    out.push_back(std::move(m));
  }
  return out;
}

std::string format_reference(const std::vector<AssayMetadata>& rows) {
  std::string out =
      "assay_id,uniprot_id,cutoff,cutoff_method,msa_depth_bucket,mutation_depth_bucket,taxon\n";
  for (const auto& m : rows) {
    out += csv_row({m.assay_id, m.uniprot_id, m.cutoff ? format_exact(*m.cutoff) : "",
                    m.method == CutoffMethod::kManual ? "manual" : "median",
                    m.msa_depth_bucket, m.mutation_depth_bucket, m.taxon});
  }
  return out;
}

AssayTable preprocess_assay(const CsvTable& raw, const seq::ProteinSequence& wild_type,
                            PreprocessSummary* summary) {
  PreprocessSummary local;
  PreprocessSummary& s = summary ? *summary : local;
  s = {};
  const std::size_t c_mut = raw.require_column("mutant");
  const std::size_t c_score = raw.require_column("DMS_score");

  struct Acc {
    double sum = 0.0;
    std::size_t count = 0;
  };
  std::vector<std::string> order;
  std::map<std::string, Acc> acc;
  for (std::size_t i = 0; i < raw.rows.size(); ++i) {
    const auto& row = raw.rows[i];
    const std::string where = raw.source + ":" + std::to_string(raw.line_numbers[i]);
    ++s.input_rows;
    if (is_missing(row[c_score])) {
      ++s.missing_dropped;
      continue;
    }
    std::string key;
    double value = 0.0;
    try {
      value = parse_real(row[c_score], where + ": DMS_score");
      if (!std::isfinite(value)) {
        ++s.missing_dropped;
        continue;
      }
      const auto m = seq::parse_mutation(row[c_mut], wild_type);
      if (m.mutant.residues == wild_type.residues) {
        ++s.silent_removed;
        continue;
      }
      key = seq::format_mutation(m);
    } catch (const Error& e) {
      s.errors.push_back(e.what());
      continue;
    }
    auto [it, inserted] = acc.try_emplace(key);
    if (inserted) {
      order.push_back(key);
    } else {
      ++s.duplicates_merged;
    }
    it->second.sum += value;
    ++it->second.count;
  }
  AssayTable table;
  table.rows.reserve(order.size());
  for (const auto& key : order) {
    const Acc& a = acc.at(key);
    table.rows.push_back({key, a.sum / static_cast<double>(a.count)});
  }
  return table;
}

Labels binarize_labels(const AssayTable& table) {
  Labels out;
  std::vector<double> scores;
  for (const auto& r : table.rows) scores.push_back(r.dms_score);
  if (table.metadata && table.metadata->cutoff) {
    out.cutoff = *table.metadata->cutoff;
  } else {
    out.defaulted = !table.metadata;
    out.cutoff = scores.empty() ? 0.0 : median(scores);
  }
  for (double v : scores) out.values.push_back(v > out.cutoff ? 1 : 0);
  return out;
}

}  // namespace protfit::bench
