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

#include "protfit/seq/sequence.hpp"

#include <algorithm>
#include <cctype>

#include "protfit/seq/vocab.hpp"
#include "protfit/util/csv.hpp"
#include "protfit/util/error.hpp"

namespace protfit::seq {

std::string_view token_name(int id) {
  static constexpr std::array<std::string_view, 3> kSpecial = {"<bos>", "<eos>",
                                                               "<pad>"};
  if (id >= 0 && id < kNumStandard) {
    return kStandardResidues.substr(static_cast<std::size_t>(id), 1);
  }
  if (id >= kBos && id < kVocabSize) {
    return kSpecial[static_cast<std::size_t>(id - kBos)];
  }
  return "<unk>";
}

namespace {

bool fasta_allowed(char c) {
  return is_standard(c) || is_indeterminate(c) || is_excluded(c);
}

void finish_record(std::vector<ProteinSequence>& out, const std::string& source) {
  if (!out.empty() && out.back().residues.empty()) {
    throw ParseError(source + ": record '" + out.back().id + "' is empty");
  }
}

}  // namespace

std::vector<ProteinSequence> parse_fasta(std::string_view text,
                                         const std::string& source) {
  std::vector<ProteinSequence> out;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.front() == '>') {
      finish_record(out, source);
      std::string_view header = line.substr(1);
      const auto stop = header.find_first_of(" \t\r");
      ProteinSequence rec;
      rec.id = std::string(header.substr(0, stop));
      rec.source = source;
      out.push_back(std::move(rec));
      continue;
    }
    for (char raw : line) {
      if (std::isspace(static_cast<unsigned char>(raw))) continue;
      if (out.empty()) {
        throw ParseError(source + ":" + std::to_string(line_no) +
                         ": sequence data before the first '>' header");
      }
      const char c =
          static_cast<char>(std::toupper(static_cast<unsigned char>(raw)));
      auto& rec = out.back();
      if (!fasta_allowed(c)) {
        throw ParseError(source + ":" + std::to_string(line_no) + ": record '" +
                         rec.id + "': illegal character '" + std::string(1, raw) +
                         "' at offset " + std::to_string(rec.residues.size()));
      }
      rec.residues.push_back(c);
    }
  }
  finish_record(out, source);
  return out;
}

std::string format_fasta(const std::vector<ProteinSequence>& seqs,
                         std::size_t line_width) {
  std::string out;
  for (const auto& s : seqs) {
    out += '>';
    out += s.id;
    out += '\n';
    for (std::size_t i = 0; i < s.residues.size(); i += line_width) {
      out += s.residues.substr(i, line_width);
      out += '\n';
    }
  }
  return out;
}

bool has_indeterminates(std::string_view residues) {
  return std::any_of(residues.begin(), residues.end(), is_indeterminate);
}

ProteinSequence impute_indeterminates(const ProteinSequence& s, Rng& rng) {
  ProteinSequence out = s;
  for (std::size_t i = 0; i < out.residues.size(); ++i) {
    char& c = out.residues[i];
    switch (c) {
      case 'X':
        c = residue_char(static_cast<int>(rng.index(kNumStandard)));
        break;
      case 'B':
        c = rng.index(2) == 0 ? 'D' : 'N';
        break;
      case 'J':
        c = rng.index(2) == 0 ? 'I' : 'L';
        break;
      case 'Z':
        c = rng.index(2) == 0 ? 'E' : 'Q';
        break;
      case 'O':
      case 'U':
        throw ValidationError("sequence '" + s.id + "': residue '" +
                              std::string(1, c) + "' at offset " +
                              std::to_string(i) + " must be filtered out");
      default:
        break;
    }
  }
  return out;
}

TokenSeq tokenize(std::string_view residues) {
  if (residues.empty()) throw ValidationError("cannot tokenize an empty sequence");
  TokenSeq t;
  t.ids.reserve(residues.size() + 2);
  t.ids.push_back(kBos);
  for (std::size_t i = 0; i < residues.size(); ++i) {
    const int id = residue_index(residues[i]);
    if (id < 0) {
      throw ValidationError("cannot tokenize '" + std::string(1, residues[i]) +
                            "' at offset " + std::to_string(i) +
                            " (impute indeterminates first)");
    }
    t.ids.push_back(id);
  }
  t.ids.push_back(kEos);
  return t;
}

TokenSeq tokenize(const ProteinSequence& s) { return tokenize(s.residues); }

std::string detokenize(const TokenSeq& tokens) {
  if (tokens.ids.size() < 2 || tokens.ids.front() != kBos ||
      tokens.ids.back() != kEos) {
    throw ValidationError("token sequence must start with BOS and end with EOS");
  }
  std::string out;
  out.reserve(tokens.ids.size() - 2);
  for (std::size_t i = 1; i + 1 < tokens.ids.size(); ++i) {
    const int id = tokens.ids[i];
    if (id < 0 || id >= kNumStandard) {
      throw ValidationError("non-residue token inside sequence at index " +
                            std::to_string(i));
    }
    out.push_back(residue_char(id));
  }
  return out;
}

ProteinSequence mirror(const ProteinSequence& s) {
  ProteinSequence out = s;
  std::reverse(out.residues.begin(), out.residues.end());
  return out;
}

std::string_view to_string(RejectReason reason) {
  switch (reason) {
    case RejectReason::kExcludedResidue:
      return "contains_O_or_U";
    case RejectReason::kConsecutiveX:
      return "consecutive_X";
    case RejectReason::kSingletonCluster:
      return "singleton_cluster";
    case RejectReason::kNoCluster:
      return "no_cluster";
  }
  return "unknown";
}

FilterResult filter_training_sequences(
    const std::vector<ProteinSequence>& seqs,
    const std::optional<std::map<std::string, std::string>>& cluster_map) {
  std::map<std::string, std::size_t> cluster_size;
  if (cluster_map) {
    for (const auto& [id, cluster] : *cluster_map) ++cluster_size[cluster];
  }
  FilterResult result;
  for (const auto& s : seqs) {
    std::optional<RejectReason> reason;
    if (std::any_of(s.residues.begin(), s.residues.end(), is_excluded)) {
      reason = RejectReason::kExcludedResidue;
    } else if (s.residues.find("XX") != std::string::npos) {
      reason = RejectReason::kConsecutiveX;
    } else if (cluster_map) {
      auto it = cluster_map->find(s.id);
      if (it == cluster_map->end()) {
        reason = RejectReason::kNoCluster;
      } else if (cluster_size[it->second] < 2) {
        reason = RejectReason::kSingletonCluster;
      }
    }
    if (reason) {
      result.rejected.push_back({s, *reason});
    } else {
      result.kept.push_back(s);
    }
  }
  return result;
}

std::string rejection_report_csv(const FilterResult& result) {
  std::string out = "id,reason\n";
  for (const auto& r : result.rejected) {
    out += csv_row({r.sequence.id, std::string(to_string(r.reason))});
  }
  return out;
}

}  // namespace protfit::seq
