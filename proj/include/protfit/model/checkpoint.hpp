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

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "protfit/model/lm.hpp"

namespace protfit::model {

inline constexpr std::uint32_t kCheckpointVersion = 1;

struct LoadedCheckpoint {
  ProteinLM model;
  std::uint64_t step = 0;
  /// Free-form key=value text (optimizer settings and the like).
  std::string metadata;
};

// Binary container, little-endian:
//   magic "PFCKPT\0\1" | u32 version | u32 scalar bytes | u64 step
//   | u64 len + config text | u64 len + metadata text | u32 n_params
//   | per parameter: u32 len + name, u32 rank, u64 dims..., raw scalars
//   | u32 CRC-32 of everything before it
std::string serialize_checkpoint(const ProteinLM& model, std::uint64_t step,
                                 std::string_view metadata);
LoadedCheckpoint deserialize_checkpoint(std::string_view bytes, const std::string& source);

void save_checkpoint(const std::filesystem::path& path, const ProteinLM& model,
                     std::uint64_t step, std::string_view metadata);
LoadedCheckpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace protfit::model
