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

#include "protfit/seq/mutation.hpp"

#include <algorithm>
#include <cctype>
#include <tuple>

#include "protfit/seq/vocab.hpp"
#include "protfit/util/error.hpp"

namespace protfit::seq {

namespace {

[[noreturn]] void fail(std::string_view code, const std::string& msg) {
  throw ValidationError("mutation '" + std::string(code) + "': " + msg);
}

std::size_t parse_position(std::string_view digits, std::string_view code) {
  if (digits.empty() ||
      !std::all_of(digits.begin(), digits.end(),
                   [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
    fail(code, "malformed position '" + std::string(digits) + "'");
  }
  if (digits.size() > 9) fail(code, "position out of range");
  std::size_t v = 0;
  for (char c : digits) v = v * 10 + static_cast<std::size_t>(c - '0');
  return v;
}

bool valid_target(char c) { return is_standard(c) || is_indeterminate(c); }

std::vector<std::string_view> split(std::string_view code) {
  std::vector<std::string_view> tokens;
  std::size_t pos = 0;
  while (true) {
    const auto next = code.find(':', pos);
    tokens.push_back(code.substr(pos, next - pos));
    if (next == std::string_view::npos) break;
    pos = next + 1;
  }
  return tokens;
}

}  // namespace

MutationSet parse_mutation(std::string_view code, const ProteinSequence& wt) {
  MutationSet m;
  m.code = std::string(code);
  m.wild_type = wt;
  const std::size_t len = wt.residues.size();

  if (!code.empty() && code != "WT" && code != "_wt") {
    const auto tokens = split(code);
    for (std::size_t t = 0; t < tokens.size(); ++t) {
      std::string_view tok = tokens[t];
      if (tok.empty()) fail(code, "empty edit token");
      if (tok.starts_with("ins")) {
        const std::size_t after = parse_position(tok.substr(3), code);
        if (after > len) fail(code, "insertion position " + std::to_string(after) +
                                        " beyond sequence length " + std::to_string(len));
        if (t + 1 >= tokens.size()) fail(code, "insertion without residues");
        std::string_view res = tokens[++t];
        if (res.empty() || !std::all_of(res.begin(), res.end(), valid_target)) {
          fail(code, "invalid inserted residues '" + std::string(res) + "'");
        }
        m.insertions.push_back({after, std::string(res)});
      } else if (tok.starts_with("del")) {
        std::string_view range = tok.substr(3);
        const auto dash = range.find('-');
        const std::size_t first = parse_position(range.substr(0, dash), code);
        const std::size_t last = dash == std::string_view::npos
                                     ? first
                                     : parse_position(range.substr(dash + 1), code);
        if (first < 1 || last < first || last > len) {
          fail(code, "deletion range " + std::string(range) + " out of bounds");
        }
        m.deletions.push_back({first - 1, last});
      } else {
        if (tok.size() < 3) fail(code, "malformed edit '" + std::string(tok) + "'");
        const char from = tok.front();
        const char to = tok.back();
        const std::size_t pos = parse_position(tok.substr(1, tok.size() - 2), code);
        if (!std::isupper(static_cast<unsigned char>(from)) || !valid_target(to)) {
          fail(code, "malformed edit '" + std::string(tok) + "'");
        }
        if (pos < 1 || pos > len) {
          fail(code, "position " + std::to_string(pos) + " out of range 1.." +
                         std::to_string(len));
        }
        if (wt.residues[pos - 1] != from) {
          fail(code, "wild-type residue at " + std::to_string(pos) + " is '" +
                         std::string(1, wt.residues[pos - 1]) + "', not '" +
                         std::string(1, from) + "'");
        }
        m.substitutions.push_back({pos - 1, from, to});
      }
    }
  }

  std::sort(m.substitutions.begin(), m.substitutions.end(),
            [](const auto& a, const auto& b) { return a.index < b.index; });
  std::sort(m.insertions.begin(), m.insertions.end(),
            [](const auto& a, const auto& b) { return a.before < b.before; });
  std::sort(m.deletions.begin(), m.deletions.end(),
            [](const auto& a, const auto& b) { return a.begin < b.begin; });

  for (std::size_t i = 1; i < m.substitutions.size(); ++i) {
    if (m.substitutions[i].index == m.substitutions[i - 1].index) {
      fail(code, "overlapping edits at position " +
                     std::to_string(m.substitutions[i].index + 1));
    }
  }
  for (std::size_t i = 1; i < m.insertions.size(); ++i) {
    if (m.insertions[i].before == m.insertions[i - 1].before) {
      fail(code, "two insertions after position " +
                     std::to_string(m.insertions[i].before));
    }
  }
  for (std::size_t i = 1; i < m.deletions.size(); ++i) {
    if (m.deletions[i].begin < m.deletions[i - 1].end) {
      fail(code, "overlapping deletions");
    }
  }
  std::vector<char> deleted(len, 0);
  for (const auto& d : m.deletions) {
    std::fill(deleted.begin() + static_cast<std::ptrdiff_t>(d.begin),
              deleted.begin() + static_cast<std::ptrdiff_t>(d.end), 1);
    for (const auto& ins : m.insertions) {
      if (ins.before > d.begin && ins.before < d.end) {
        fail(code, "insertion inside deleted range");
      }
    }
  }
  for (const auto& s : m.substitutions) {
    if (deleted[s.index]) fail(code, "substitution inside deleted range");
  }

  // Materialize left to right; equivalent to applying the edits from the
  // highest position down since every coordinate refers to the wild type.
  std::string mutant;
  mutant.reserve(len + 16);
  std::size_t si = 0, ii = 0;
  for (std::size_t i = 0; i <= len; ++i) {
    if (ii < m.insertions.size() && m.insertions[ii].before == i) {
      mutant += m.insertions[ii++].residues;
    }
    if (i == len) break;
    char c = wt.residues[i];
    if (si < m.substitutions.size() && m.substitutions[si].index == i) {
      c = m.substitutions[si++].to;
    }
    if (!deleted[i]) mutant.push_back(c);
  }
  if (mutant.empty()) fail(code, "edits delete the whole sequence");
  m.mutant = {wt.id + ":" + std::string(code), std::move(mutant), wt.source};
  return m;
}

std::vector<std::size_t> MutationSet::wild_type_positions() const {
  const std::size_t len = wild_type.residues.size();
  std::vector<std::size_t> out;
  for (const auto& s : substitutions) out.push_back(s.index + 1);
  for (const auto& d : deletions) {
    for (std::size_t i = d.begin; i < d.end; ++i) out.push_back(i + 1);
  }
  for (const auto& ins : insertions) {
    out.push_back(std::clamp<std::size_t>(ins.before, 1, len));
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::size_t> MutationSet::mutant_positions() const {
  const std::size_t len = wild_type.residues.size();
  std::vector<std::size_t> out;
  std::size_t si = 0, ii = 0, di = 0;
  std::size_t mpos = 0;  // residues emitted so far
  for (std::size_t i = 0; i <= len; ++i) {
    if (ii < insertions.size() && insertions[ii].before == i) {
      for (std::size_t k = 0; k < insertions[ii].residues.size(); ++k) {
        out.push_back(++mpos);
      }
      ++ii;
    }
    if (i == len) break;
    if (di < deletions.size() && i >= deletions[di].begin && i < deletions[di].end) {
      if (i + 1 == deletions[di].end) {
        // junction: the residue that now follows the deleted block
        out.push_back(std::clamp<std::size_t>(mpos + 1, 1, mutant.residues.size()));
        ++di;
      }
      continue;
    }
    ++mpos;
    if (si < substitutions.size() && substitutions[si].index == i) {
      out.push_back(mpos);
      ++si;
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::string format_mutation(const MutationSet& m) {
  // (1-based position, kind, index into the edit list)
  std::vector<std::tuple<std::size_t, int, std::size_t>> order;
  for (std::size_t i = 0; i < m.substitutions.size(); ++i) {
    order.emplace_back(m.substitutions[i].index + 1, 0, i);
  }
  for (std::size_t i = 0; i < m.deletions.size(); ++i) {
    order.emplace_back(m.deletions[i].begin + 1, 1, i);
  }
  for (std::size_t i = 0; i < m.insertions.size(); ++i) {
    order.emplace_back(m.insertions[i].before, 2, i);
  }
  std::sort(order.begin(), order.end());
  std::string out;
  for (const auto& [pos, kind, idx] : order) {
    if (!out.empty()) out += ':';
    if (kind == 0) {
      const auto& s = m.substitutions[idx];
      out += s.from;
      out += std::to_string(pos);
      out += s.to;
    } else if (kind == 1) {
      const auto& d = m.deletions[idx];
      out += "del" + std::to_string(d.begin + 1) + "-" + std::to_string(d.end);
    } else {
      out += "ins" + std::to_string(pos) + ":" + m.insertions[idx].residues;
    }
  }
  return out;
}

}  // namespace protfit::seq
