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

#include <array>
#include <string_view>

namespace protfit::seq {

// Token ids: the 20 standard residues in alphabetical one-letter order,
// followed by the three special tokens. Checkpoints depend on this order.
inline constexpr std::string_view kStandardResidues = "ACDEFGHIKLMNPQRSTVWY";
inline constexpr int kNumStandard = 20;
inline constexpr int kBos = 20;
inline constexpr int kEos = 21;
inline constexpr int kPad = 22;
inline constexpr int kVocabSize = 23;

/// Token id of a standard residue, or -1.
constexpr int residue_index(char c) {
  for (int i = 0; i < kNumStandard; ++i) {
    if (kStandardResidues[static_cast<std::size_t>(i)] == c) return i;
  }
  return -1;
}

constexpr bool is_standard(char c) { return residue_index(c) >= 0; }
constexpr bool is_indeterminate(char c) {
  return c == 'X' || c == 'B' || c == 'J' || c == 'Z';
}
constexpr bool is_excluded(char c) { return c == 'O' || c == 'U'; }

constexpr char residue_char(int id) {
  return kStandardResidues[static_cast<std::size_t>(id)];
}

std::string_view token_name(int id);

}  // namespace protfit::seq
