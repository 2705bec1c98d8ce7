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
#include <string_view>
#include <vector>

#include "protfit/util/rng.hpp"

namespace protfit::seq {

struct ProteinSequence {
  std::string id;
  std::string residues;  // upper case; standard20, X/B/J/Z, and O/U pre-filter
  std::string source;

  std::size_t length() const { return residues.size(); }
  bool operator==(const ProteinSequence&) const = default;
};

/// BOS + residue ids + EOS.
struct TokenSeq {
  std::vector<int> ids;

  std::size_t size() const { return ids.size(); }
  std::size_t residue_count() const { return ids.size() - 2; }
};

/// Parses FASTA text. Lower-case letters are upper-cased; whitespace inside
/// sequence lines is dropped. Errors name the record and the 0-based offset
/// of the offending character within the record's residues.
std::vector<ProteinSequence> parse_fasta(std::string_view text,
                                         const std::string& source = "<fasta>");

std::string format_fasta(const std::vector<ProteinSequence>& seqs,
                         std::size_t line_width = 60);

/// Replaces X/B/J/Z by a uniformly drawn compatible standard residue.
/// Throws ValidationError if O or U is present.
ProteinSequence impute_indeterminates(const ProteinSequence& s, Rng& rng);

bool has_indeterminates(std::string_view residues);

TokenSeq tokenize(const ProteinSequence& s);
TokenSeq tokenize(std::string_view residues);
std::string detokenize(const TokenSeq& tokens);

ProteinSequence mirror(const ProteinSequence& s);

enum class RejectReason { kExcludedResidue, kConsecutiveX, kSingletonCluster, kNoCluster };

std::string_view to_string(RejectReason reason);

struct Rejection {
  ProteinSequence sequence;
  RejectReason reason;
};

struct FilterResult {
  std::vector<ProteinSequence> kept;
  std::vector<Rejection> rejected;
};

/// Training-set quality filter. When a cluster map is given, sequences in a
/// cluster of size one are dropped, and so are ids absent from the map.
FilterResult filter_training_sequences(
    const std::vector<ProteinSequence>& seqs,
    const std::optional<std::map<std::string, std::string>>& cluster_map =
        std::nullopt);

/// `id,reason` CSV.
std::string rejection_report_csv(const FilterResult& result);

}  // namespace protfit::seq
