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

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace protfit::cli {

inline constexpr const char* kToolVersion = "0.1.0";

std::string sha256_hex(std::string_view bytes);

// Provenance record written next to every command's outputs.
class RunManifest {
 public:
  explicit RunManifest(std::string command);

  void set_config(const std::string& key, const std::string& value);
  void set_seed(std::uint64_t seed) { seed_ = seed; }
  /// Records the path and SHA-256 of an input whose bytes were read.
  void add_input(const std::filesystem::path& path, std::string_view contents);
  void add_output(const std::filesystem::path& path);
  void add_note(const std::string& key, const std::string& value);

  std::string to_json() const;

 private:
  std::string command_;
  std::map<std::string, std::string> config_;
  std::map<std::string, std::string> notes_;
  std::vector<std::pair<std::string, std::string>> inputs_;
  std::vector<std::string> outputs_;
  std::uint64_t seed_ = 0;
  std::chrono::steady_clock::time_point start_;
};

}  // namespace protfit::cli
