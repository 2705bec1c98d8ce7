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
#include <limits>
#include <string>
#include <string_view>
#include <vector>

namespace protfit::retrieval {

struct MsaRow {
  std::string id;
  std::string aligned;  // as read, insert states included
  std::string match;    // match-state characters only (upper case or '-')
};

// Seed-anchored alignment in A2M convention: the first record is the seed;
// upper-case letters and '-' are match states, lower-case letters and '.'
// are insert states. Seed residues are numbered over all of the seed's
// letters; a lower-case seed letter has no match column.
struct Msa {
  static constexpr std::size_t kNoColumn = std::numeric_limits<std::size_t>::max();

  std::string seed_id;
  std::string seed_residues;                  // upper-cased, gaps removed
  std::vector<MsaRow> rows;                   // rows[0] is the seed
  std::vector<std::size_t> position_column;   // per seed residue, or kNoColumn
  std::vector<std::size_t> match_columns;     // columns holding a seed residue

  std::size_t n_rows() const { return rows.size(); }
  std::size_t n_cols() const { return rows.empty() ? 0 : rows.front().match.size(); }
  std::size_t seed_length() const { return seed_residues.size(); }
};

Msa parse_a2m(std::string_view text, const std::string& source = "<a2m>");
std::string format_a2m(const Msa& msa);

/// Fraction of the seed's match columns where `row` carries the seed residue.
double identity_to_seed(const Msa& msa, std::size_t row);

struct SequenceWeights {
  std::vector<double> weights;
  double theta = 0.2;
  double n_eff = 0.0;
};

/// w_s = 1 / |{t : identity(s, t) >= 1 - theta}| over the seed's match
/// columns, gaps counting as mismatches.
SequenceWeights sequence_weights(const Msa& msa, double theta = 0.2);

/// Seed plus every row with identity_to_seed >= min_identity.
Msa filter_by_similarity(const Msa& msa, double min_identity);

}  // namespace protfit::retrieval
