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

#include "protfit/retrieval/msa.hpp"

#include <cctype>

#include "protfit/util/error.hpp"

namespace protfit::retrieval {

namespace {

bool is_match_state(char c) { return std::isupper(static_cast<unsigned char>(c)) || c == '-'; }
bool is_insert_state(char c) { return std::islower(static_cast<unsigned char>(c)) || c == '.'; }

}  // namespace

Msa parse_a2m(std::string_view text, const std::string& source) {
  Msa msa;
  std::size_t pos = 0, line_no = 0;
  bool in_record = false;
  auto finish = [&](std::size_t header_line) {
    if (!in_record) return;
    MsaRow& row = msa.rows.back();
    if (row.aligned.empty()) {
      throw ParseError(source + ":" + std::to_string(header_line) + ": record '" + row.id +
                       "' is empty");
    }
    if (msa.rows.size() > 1 && row.match.size() != msa.rows.front().match.size()) {
      throw ParseError(source + ":" + std::to_string(header_line) + ": record '" + row.id +
                       "' has " + std::to_string(row.match.size()) +
                       " match-state columns, seed has " +
                       std::to_string(msa.rows.front().match.size()));
    }
  };
  std::size_t header_line = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!line.empty() && line.front() == '>') {
      finish(header_line);
      header_line = line_no;
      std::string_view header = line.substr(1);
      const auto space = header.find_first_of(" \t");
      msa.rows.push_back({std::string(header.substr(0, space)), "", ""});
      in_record = true;
      continue;
    }
    for (std::size_t i = 0; i < line.size(); ++i) {
      const char c = line[i];
      if (std::isspace(static_cast<unsigned char>(c))) continue;
      if (!in_record) {
        throw ParseError(source + ":" + std::to_string(line_no) +
                         ": alignment data before the first header (no seed record)");
      }
      if (!is_match_state(c) && !is_insert_state(c)) {
        throw ParseError(source + ":" + std::to_string(line_no) + ": illegal character '" +
                         std::string(1, c) + "' in record '" + msa.rows.back().id + "'");
      }
      msa.rows.back().aligned += c;
      if (is_match_state(c)) msa.rows.back().match += c;
    }
  }
  finish(header_line);
  if (msa.rows.empty()) throw ParseError(source + ": no seed record");

  const MsaRow& seed = msa.rows.front();
  msa.seed_id = seed.id;
  std::size_t column = 0;
  for (char c : seed.aligned) {
    if (std::isalpha(static_cast<unsigned char>(c))) {
      msa.seed_residues += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
      if (std::isupper(static_cast<unsigned char>(c))) {
        msa.position_column.push_back(column);
        msa.match_columns.push_back(column);
      } else {
        msa.position_column.push_back(Msa::kNoColumn);
      }
    }
    if (is_match_state(c)) ++column;
  }
  if (msa.seed_residues.empty()) throw ParseError(source + ": seed record has no residues");
  return msa;
}

std::string format_a2m(const Msa& msa) {
  std::string out;
  for (const auto& row : msa.rows) {
    out += '>' + row.id + '\n' + row.aligned + '\n';
  }
  return out;
}

double identity_to_seed(const Msa& msa, std::size_t row) {
  if (msa.match_columns.empty()) return 0.0;
  const std::string& seed = msa.rows.front().match;
  const std::string& r = msa.rows.at(row).match;
  std::size_t same = 0;
  for (std::size_t c : msa.match_columns) same += r[c] != '-' && r[c] == seed[c];
  return static_cast<double>(same) / static_cast<double>(msa.match_columns.size());
}

SequenceWeights sequence_weights(const Msa& msa, double theta) {
  if (!(theta >= 0 && theta <= 1)) throw ValidationError("theta must lie in [0, 1]");
  const std::size_t n = msa.n_rows();
  const std::size_t len = msa.match_columns.size();
  // Rows restricted to the seed's match columns. Gap against residue is a
  // mismatch; gap against gap agrees, so a gappy row still neighbours its
  // own duplicates.
  std::vector<std::string> cols(n, std::string(len, '\0'));
  for (std::size_t s = 0; s < n; ++s) {
    for (std::size_t j = 0; j < len; ++j) {
      const char c = msa.rows[s].match[msa.match_columns[j]];
      cols[s][j] = c;
    }
  }
  const double needed = (1.0 - theta) * static_cast<double>(len) - 1e-9;
  std::vector<std::size_t> neighbours(n, 1);
  for (std::size_t s = 0; s < n; ++s) {
    for (std::size_t t = s + 1; t < n; ++t) {
      std::size_t same = 0;
      for (std::size_t j = 0; j < len; ++j) same += cols[s][j] == cols[t][j];
      if (static_cast<double>(same) >= needed) {
        ++neighbours[s];
        ++neighbours[t];
      }
    }
  }
  SequenceWeights out;
  out.theta = theta;
  out.weights.resize(n);
  for (std::size_t s = 0; s < n; ++s) {
    out.weights[s] = 1.0 / static_cast<double>(neighbours[s]);
    out.n_eff += out.weights[s];
  }
  return out;
}

Msa filter_by_similarity(const Msa& msa, double min_identity) {
  if (!(min_identity >= 0 && min_identity <= 1)) {
    throw ValidationError("min_identity must lie in [0, 1]");
  }
  Msa out = msa;
  out.rows.clear();
  out.rows.push_back(msa.rows.front());
  for (std::size_t r = 1; r < msa.n_rows(); ++r) {
    if (identity_to_seed(msa, r) >= min_identity - 1e-12) out.rows.push_back(msa.rows[r]);
  }
  return out;
}

}  // namespace protfit::retrieval
