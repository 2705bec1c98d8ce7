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
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace protfit {

// Minimal RFC-4180 style table: comma separated, optional double quotes,
// first line is the header.
struct CsvTable {
  std::string source;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> line_numbers;  // 1-based line of each row

  std::optional<std::size_t> column(std::string_view name) const;
  /// Throws ParseError naming the source when the column is missing.
  std::size_t require_column(std::string_view name) const;
};

CsvTable parse_csv(std::string_view text, const std::string& source);

std::string csv_field(std::string_view value);
std::string csv_row(const std::vector<std::string>& fields);

}  // namespace protfit
