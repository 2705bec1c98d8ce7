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

#include "protfit/retrieval/profile.hpp"

#include <algorithm>
#include <cmath>

#include "protfit/seq/vocab.hpp"
#include "protfit/util/csv.hpp"
#include "protfit/util/error.hpp"
#include "protfit/util/io.hpp"
#include "protfit/util/keyvalue.hpp"

namespace protfit::retrieval {

RetrievalProfile build_profile(const Msa& msa, const SequenceWeights& weights, double lambda) {
  if (weights.weights.size() != msa.n_rows()) {
    throw ValidationError("profile: " + std::to_string(weights.weights.size()) +
                          " weights for " + std::to_string(msa.n_rows()) + " rows");
  }
  if (!(lambda > 0)) throw ValidationError("profile: lambda must be > 0");
  RetrievalProfile p;
  p.seed_id = msa.seed_id;
  p.seed_residues = msa.seed_residues;
  p.lambda = lambda;
  p.theta = weights.theta;
  p.columns.resize(msa.seed_length());
  for (std::size_t pos = 0; pos < msa.seed_length(); ++pos) {
    const std::size_t col = msa.position_column[pos];
    if (col == Msa::kNoColumn) continue;
    std::array<double, 20> counts{};
    double total = 0.0;
    for (std::size_t s = 0; s < msa.n_rows(); ++s) {
      const int a = seq::residue_index(msa.rows[s].match[col]);
      if (a < 0) continue;  // gap or indeterminate
      counts[static_cast<std::size_t>(a)] += weights.weights[s];
      total += weights.weights[s];
    }
    if (total <= 0) continue;
    ProfileColumn& out = p.columns[pos];
    out.covered = true;
    const double denom = total + 20.0 * lambda;
    for (std::size_t a = 0; a < 20; ++a) out.logp[a] = std::log((counts[a] + lambda) / denom);
  }
  return p;
}

std::string RetrievalProfile::to_text() const {
  std::string out = "# protfit retrieval profile\n";
  out += "version=" + std::to_string(kProfileVersion) + "\n";
  out += "lambda=" + format_exact(lambda) + "\n";
  out += "theta=" + format_exact(theta) + "\n";
  out += "seed_id=" + seed_id + "\n";
  out += "seed=" + seed_residues + "\n";
  out += "position,covered";
  for (char a : seq::kStandardResidues) out += std::string(",logp_") + a;
  out += '\n';
  for (std::size_t i = 0; i < columns.size(); ++i) {
    out += std::to_string(i + 1) + (columns[i].covered ? ",1" : ",0");
    for (double v : columns[i].logp) {
      out += ',';
      if (columns[i].covered) out += format_exact(v);
    }
    out += '\n';
  }
  return out;
}

RetrievalProfile RetrievalProfile::from_text(std::string_view text, const std::string& source) {
  const auto table_start = text.find("position,covered");
  if (table_start == std::string_view::npos) {
    throw ParseError(source + ": missing 'position,covered,...' table header");
  }
  RetrievalProfile p;
  bool have_version = false;
  for (const auto& [key, value] : parse_key_values(text.substr(0, table_start), source)) {
    if (key == "version") {
      if (parse_integer(value, source + ": version") != kProfileVersion) {
        throw ConfigError(source + ": unsupported profile version " + value);
      }
      have_version = true;
    } else if (key == "lambda") {
      p.lambda = parse_real(value, source + ": lambda");
    } else if (key == "theta") {
      p.theta = parse_real(value, source + ": theta");
    } else if (key == "seed_id") {
      p.seed_id = value;
    } else if (key == "seed") {
      p.seed_residues = value;
    } else {
      throw ParseError(source + ": unknown profile header key '" + key + "'");
    }
  }
  if (!have_version) throw ParseError(source + ": profile has no version line");
  const CsvTable table = parse_csv(text.substr(table_start), source);
  if (table.header.size() != 22) throw ParseError(source + ": profile table needs 22 columns");
  // Table line numbers are relative to the table; offset them for messages.
  const std::size_t offset =
      static_cast<std::size_t>(std::count(text.begin(), text.begin() + table_start, '\n'));
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const std::string where = source + ":" + std::to_string(table.line_numbers[r] + offset);
    if (parse_integer(row[0], where + ": position") != static_cast<long long>(r + 1)) {
      throw ParseError(where + ": positions must be 1, 2, ... in order");
    }
    ProfileColumn col;
    col.covered = parse_integer(row[1], where + ": covered") != 0;
    if (col.covered) {
      for (std::size_t a = 0; a < 20; ++a) {
        col.logp[a] = parse_real(row[2 + a], where + ": logp");
      }
    }
    p.columns.push_back(col);
  }
  if (!p.seed_residues.empty() && p.seed_residues.size() != p.columns.size()) {
    throw ValidationError(source + ": seed length " + std::to_string(p.seed_residues.size()) +
                          " differs from " + std::to_string(p.columns.size()) +
                          " profile positions");
  }
  return p;
}

ColumnMap ColumnMap::identity(std::size_t length) {
  ColumnMap m;
  m.source.resize(length);
  for (std::size_t i = 0; i < length; ++i) m.source[i] = i;
  return m;
}

ColumnMap ColumnMap::then(const ColumnMap& next) const {
  ColumnMap out;
  out.source.reserve(next.size());
  for (const auto& s : next.source) {
    if (s && *s >= source.size()) throw ValidationError("column map index out of range");
    out.source.push_back(s ? source[*s] : std::nullopt);
  }
  return out;
}

ColumnMap surgery_for_indels(std::size_t seed_length, const seq::MutationSet& mutation) {
  const std::size_t len = mutation.wild_type.residues.size();
  if (len != seed_length) {
    throw ValidationError("wild type has " + std::to_string(len) +
                          " residues but the alignment seed has " +
                          std::to_string(seed_length));
  }
  std::vector<char> deleted(len, 0);
  for (const auto& d : mutation.deletions) {
    if (d.begin >= d.end || d.end > len) {
      throw ValidationError("deletion range outside the seed length");
    }
    std::fill(deleted.begin() + static_cast<std::ptrdiff_t>(d.begin),
              deleted.begin() + static_cast<std::ptrdiff_t>(d.end), 1);
  }
  ColumnMap map;
  auto ins = mutation.insertions.begin();
  for (std::size_t i = 0; i <= len; ++i) {
    for (; ins != mutation.insertions.end() && ins->before == i; ++ins) {
      map.source.insert(map.source.end(), ins->residues.size(), std::nullopt);
    }
    if (i < len && !deleted[i]) map.source.push_back(i);
  }
  if (map.size() != mutation.mutant.residues.size()) {
    throw ValidationError("column map does not match the mutant length for '" +
                          mutation.code + "'");
  }
  return map;
}

RetrievalProfile remap_profile(const RetrievalProfile& profile, const ColumnMap& map) {
  RetrievalProfile out = profile;
  out.columns.assign(map.size(), ProfileColumn{});
  out.seed_residues.clear();
  for (std::size_t i = 0; i < map.size(); ++i) {
    if (!map.source[i]) continue;
    if (*map.source[i] >= profile.length()) {
      throw ValidationError("column map refers past the profile end");
    }
    out.columns[i] = profile.columns[*map.source[i]];
  }
  return out;
}

RetrievalProfile mirror(const RetrievalProfile& profile) {
  RetrievalProfile out = profile;
  std::reverse(out.columns.begin(), out.columns.end());
  std::reverse(out.seed_residues.begin(), out.seed_residues.end());
  return out;
}

std::vector<std::optional<double>> retrieval_log_probs(std::string_view residues,
                                                       const RetrievalProfile& profile) {
  if (residues.size() != profile.length()) {
    throw ValidationError("sequence of length " + std::to_string(residues.size()) +
                          " is not aligned to a profile of length " +
                          std::to_string(profile.length()));
  }
  std::vector<std::optional<double>> out(residues.size());
  for (std::size_t i = 0; i < residues.size(); ++i) {
    const int a = seq::residue_index(residues[i]);
    if (a >= 0 && profile.columns[i].covered) {
      out[i] = profile.columns[i].logp[static_cast<std::size_t>(a)];
    }
  }
  return out;
}

}  // namespace protfit::retrieval
