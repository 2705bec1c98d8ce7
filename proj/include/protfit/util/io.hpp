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

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace protfit {

std::string read_file(const std::filesystem::path& path);

/// Shortest round-trip representation ("%.17g").
std::string format_exact(double value);
/// Fixed number of decimals, used by report files.
std::string format_fixed(double value, int decimals);

/// Strict real parse of a whole field; throws ParseError on trailing junk.
double parse_real(std::string_view text, const std::string& context);
long long parse_integer(std::string_view text, const std::string& context);

std::string_view trim(std::string_view s);

// Collects output files and publishes them only on commit(). Files are
// written to temporary siblings first; if the transaction is destroyed
// without commit every temporary is removed, so a failed command never
// leaves a partial output behind.
class OutputTransaction {
 public:
  OutputTransaction() = default;
  OutputTransaction(const OutputTransaction&) = delete;
  OutputTransaction& operator=(const OutputTransaction&) = delete;
  ~OutputTransaction();

  void write(const std::filesystem::path& path, std::string_view contents);
  void commit();
  const std::vector<std::filesystem::path>& targets() const { return targets_; }

 private:
  std::vector<std::filesystem::path> targets_;
  std::vector<std::filesystem::path> temps_;
  bool committed_ = false;
};

}  // namespace protfit
