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
#include <cstdint>
#include <string>
#include <vector>

#include "protfit/retrieval/msa.hpp"
#include "protfit/seq/sequence.hpp"

namespace protfit::testing {

/// Distinct sequences whose first two residues are random and whose rest
/// follows a fixed 20-cycle successor rule, so the corpus entropy is
/// exactly ln(count) nats.
std::vector<seq::ProteinSequence> memorization_corpus(std::size_t count, std::size_t length,
                                                      std::uint64_t seed);

/// Site-independent fitness landscape: logits[i][a] over the 20 residues.
struct Landscape {
  std::string wild_type;                 // argmax residue per site
  std::vector<std::vector<double>> logits;

  static Landscape random(std::size_t sites, double sigma, std::uint64_t seed);
  /// True log-ratio of a single substitution at 0-based `site`.
  double effect(std::size_t site, char to) const;
  /// Alignment rows drawn from the per-site distributions with stratified
  /// per-column sampling; row 0 is the wild type (seed).
  retrieval::Msa sample_msa(std::size_t rows, std::uint64_t seed) const;
  /// Unaligned training sequences drawn independently per site.
  std::vector<seq::ProteinSequence> sample_sequences(std::size_t count,
                                                     std::uint64_t seed) const;
};

}  // namespace protfit::testing
