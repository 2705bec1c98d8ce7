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
#include <string_view>
#include <vector>

#include "protfit/seq/sequence.hpp"

namespace protfit::seq {

// All indices below are 0-based; the textual grammar is 1-based.
struct Substitution {
  std::size_t index;
  char from;
  char to;
  bool operator==(const Substitution&) const = default;
};

/// Inserts `residues` before wild-type index `before` (i.e. after the
/// 1-based position `before`); before == 0 prepends.
struct Insertion {
  std::size_t before;
  std::string residues;
  bool operator==(const Insertion&) const = default;
};

/// Removes wild-type indices [begin, end).
struct Deletion {
  std::size_t begin;
  std::size_t end;
  bool operator==(const Deletion&) const = default;
};

struct MutationSet {
  std::string code;
  ProteinSequence wild_type;
  std::vector<Substitution> substitutions;  // sorted by index
  std::vector<Insertion> insertions;        // sorted by position
  std::vector<Deletion> deletions;          // sorted by begin
  ProteinSequence mutant;

  bool has_indels() const { return !insertions.empty() || !deletions.empty(); }
  bool empty() const {
    return substitutions.empty() && insertions.empty() && deletions.empty();
  }
  /// Mutated wild-type positions, 1-based, used for window selection.
  std::vector<std::size_t> wild_type_positions() const;
  /// Positions of the edits in the mutant's own coordinates, 1-based.
  std::vector<std::size_t> mutant_positions() const;
};

/// Grammar: tokens joined by ':'. "A42G" substitution; "ins42:GS" inserts GS
/// after position 42; "del42-45" deletes the inclusive range. An empty code
/// or "WT" denotes the unmodified wild type.
MutationSet parse_mutation(std::string_view code, const ProteinSequence& wt);

/// Canonical code: edits ordered by position, substitutions before an
/// insertion at the same position.
std::string format_mutation(const MutationSet& m);

}  // namespace protfit::seq
