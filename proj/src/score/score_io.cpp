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

#include <map>
#include <set>

#include "protfit/score/scorer.hpp"
#include "protfit/util/csv.hpp"
#include "protfit/util/error.hpp"
#include "protfit/util/io.hpp"

namespace protfit::score {

namespace {

constexpr int kDecimals = 8;

std::vector<std::string> score_fields(const FitnessRecord& r) {
  return {r.mutant,
          format_fixed(r.F, kDecimals),
          format_fixed(r.F_forward, kDecimals),
          r.F_reverse ? format_fixed(*r.F_reverse, kDecimals) : "",
          r.window.end ? std::to_string(r.window.start) : "",
          r.window.end ? std::to_string(r.window.end) : ""};
}

const char* kHeader = "mutant,F,F_forward,F_reverse,window_start,window_end";

}  // namespace

std::string format_scores(const std::vector<FitnessRecord>& records) {
  std::string out = std::string(kHeader) + "\n";
  for (const auto& r : records) out += csv_row(score_fields(r));
  return out;
}

ScoreTable parse_scores(std::string_view text, const std::string& source) {
  const CsvTable csv = parse_csv(text, source);
  const std::size_t c_mut = csv.require_column("mutant");
  const std::size_t c_f = csv.require_column("F");
  const auto c_ff = csv.column("F_forward");
  const auto c_fr = csv.column("F_reverse");
  const auto c_ws = csv.column("window_start");
  const auto c_we = csv.column("window_end");
  const auto c_src = csv.column("sources");
  ScoreTable table;
  table.source = source;
  std::set<std::string> seen, sources;
  for (std::size_t i = 0; i < csv.rows.size(); ++i) {
    const auto& row = csv.rows[i];
    const std::string where = source + ":" + std::to_string(csv.line_numbers[i]);
    FitnessRecord r;
    r.mutant = row[c_mut];
    if (!seen.insert(r.mutant).second) {
      throw ValidationError(where + ": duplicate mutant '" + r.mutant + "'");
    }
    r.F = parse_real(row[c_f], where + ": F");
    r.F_forward = c_ff && !row[*c_ff].empty() ? parse_real(row[*c_ff], where + ": F_forward") : r.F;
    if (c_fr && !row[*c_fr].empty()) r.F_reverse = parse_real(row[*c_fr], where + ": F_reverse");
    if (c_ws && c_we && !row[*c_ws].empty() && !row[*c_we].empty()) {
      r.window = {static_cast<std::size_t>(parse_integer(row[*c_ws], where + ": window_start")),
                  static_cast<std::size_t>(parse_integer(row[*c_we], where + ": window_end"))};
    }
    if (c_src && table.sources.empty()) {
      std::string_view s = row[*c_src];
      while (!s.empty()) {
        const auto semi = s.find(';');
        table.sources.emplace_back(s.substr(0, semi));
        s = semi == std::string_view::npos ? std::string_view{} : s.substr(semi + 1);
      }
    }
    table.records.push_back(std::move(r));
  }
  if (table.sources.empty()) table.sources.push_back(source);
  return table;
}

ScoreTable ensemble_scores(const std::vector<ScoreTable>& tables) {
  if (tables.empty()) throw ValidationError("ensemble needs at least one score table");
  const ScoreTable& first = tables.front();
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < first.records.size(); ++i) index[first.records[i].mutant] = i;

  ScoreTable out;
  out.source = "ensemble";
  out.records = first.records;
  std::vector<double> f(first.records.size(), 0.0), ff(f), fr(f);
  std::vector<std::size_t> n_reverse(f.size(), 0);
  std::vector<bool> same_window(f.size(), true);
  for (const auto& t : tables) {
    if (t.records.size() != first.records.size()) {
      throw ValidationError(t.source + ": has " + std::to_string(t.records.size()) +
                            " mutants, " + first.source + " has " +
                            std::to_string(first.records.size()));
    }
    for (const auto& r : t.records) {
      const auto it = index.find(r.mutant);
      if (it == index.end()) {
        throw ValidationError(t.source + ": mutant '" + r.mutant + "' is absent from " +
                              first.source);
      }
      const std::size_t k = it->second;
      f[k] += r.F;
      ff[k] += r.F_forward;
      if (r.F_reverse) {
        fr[k] += *r.F_reverse;
        ++n_reverse[k];
      }
      if (!(r.window == first.records[k].window)) same_window[k] = false;
    }
    out.sources.insert(out.sources.end(), t.sources.begin(), t.sources.end());
  }
  const double n = static_cast<double>(tables.size());
  for (std::size_t k = 0; k < out.records.size(); ++k) {
    auto& r = out.records[k];
    r.F = f[k] / n;
    r.F_forward = ff[k] / n;
    r.F_reverse = n_reverse[k] == tables.size() ? std::optional<double>(fr[k] / n) : std::nullopt;
    if (!same_window[k]) r.window = {};
  }
  return out;
}

std::string format_ensemble(const ScoreTable& table) {
  std::string joined;
  for (const auto& s : table.sources) joined += (joined.empty() ? "" : ";") + s;
  std::string out = std::string(kHeader) + ",n_models,sources\n";
  for (const auto& r : table.records) {
    auto fields = score_fields(r);
    fields.push_back(std::to_string(table.sources.size()));
    fields.push_back(joined);
    out += csv_row(fields);
  }
  return out;
}

}  // namespace protfit::score
