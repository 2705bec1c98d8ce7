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

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "protfit/retrieval/msa.hpp"
#include "protfit/seq/mutation.hpp"

namespace protfit::retrieval {

inline constexpr int kProfileVersion = 1;

struct ProfileColumn {
  bool covered = false;
  std::array<double, 20> logp{};  // natural log, standard residue order
};

// Per seed position amino-acid log-probabilities from weighted, smoothed
// alignment counts. Positions without a standard residue in any row are
// uncovered and carry no distribution.
struct RetrievalProfile {
  std::string seed_id;
  std::string seed_residues;
  double lambda = 1e-5;
  double theta = 0.2;
  std::vector<ProfileColumn> columns;  // one per seed position

  std::size_t length() const { return columns.size(); }
  std::string to_text() const;
  static RetrievalProfile from_text(std::string_view text, const std::string& source);
};

/// P(a|i) = (sum_s w_s [row_s(i) = a] + lambda) / (sum_s w_s [row_s(i) standard] + 20 lambda).
/// Gaps and indeterminate residues contribute to neither count.
RetrievalProfile build_profile(const Msa& msa, const SequenceWeights& weights,
                               double lambda = 1e-5);

/// Maps each position of a sequence to a seed position, or nullopt for
/// positions with no counterpart (insertions).
struct ColumnMap {
  std::vector<std::optional<std::size_t>> source;

  static ColumnMap identity(std::size_t length);
  std::size_t size() const { return source.size(); }
  /// `next` maps positions of a later sequence into this map's domain.
  ColumnMap then(const ColumnMap& next) const;
  bool operator==(const ColumnMap&) const = default;
};

/// Column bookkeeping for an edited sequence: deleted seed positions drop
/// out, inserted residues map to nothing (uncovered).
ColumnMap surgery_for_indels(std::size_t seed_length, const seq::MutationSet& mutation);

/// The profile as seen from the mutant: columns reordered per `map`,
/// unmapped positions uncovered.
RetrievalProfile remap_profile(const RetrievalProfile& profile, const ColumnMap& map);

/// Profile of the mirrored seed.
RetrievalProfile mirror(const RetrievalProfile& profile);

/// log P_R(residue) at covered positions, nullopt elsewhere. `residues`
/// must be aligned position-for-position with the profile.
std::vector<std::optional<double>> retrieval_log_probs(std::string_view residues,
                                                       const RetrievalProfile& profile);

}  // namespace protfit::retrieval
