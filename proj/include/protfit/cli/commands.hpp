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

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace protfit::cli {

namespace fs = std::filesystem;

struct CommonOptions {
  std::size_t jobs = 1;
  bool deterministic = false;
  std::size_t effective_jobs() const { return deterministic ? 1 : std::max<std::size_t>(jobs, 1); }
};

struct TrainArgs {
  fs::path config;  // key=value lines, model and training keys together
  fs::path corpus;  // FASTA
  fs::path out_dir;
  std::optional<fs::path> cluster_map;  // CSV with id,cluster
};

struct BuildProfileArgs {
  fs::path msa;
  double theta = 0.2;
  double lambda = 1e-5;
  fs::path out;
};

struct ScoreArgs {
  fs::path checkpoint;
  fs::path wild_type;  // FASTA with one record
  fs::path mutants;    // CSV with a mutant column
  std::optional<fs::path> profile;
  double alpha = 0.6;
  bool unidirectional = false;
  bool include_eos = true;
  bool uncovered_scaled = false;
  std::uint64_t seed = 0;
  fs::path out;
};

struct BenchmarkArgs {
  fs::path scores_dir;
  fs::path assays_dir;
  fs::path reference;
  fs::path out_dir;
};

struct FilterMsaArgs {
  fs::path msa;
  double min_identity = 0.0;
  fs::path out;
};

struct EnsembleArgs {
  std::vector<fs::path> inputs;
  fs::path out;
};

// Each command validates its inputs, writes outputs plus a manifest
// atomically, and throws protfit::Error subclasses on failure. Progress
// lines go to `log`.
void cmd_train(const TrainArgs& args, const CommonOptions& common, std::ostream& log);
void cmd_build_profile(const BuildProfileArgs& args, const CommonOptions& common,
                       std::ostream& log);
void cmd_score(const ScoreArgs& args, const CommonOptions& common, std::ostream& log);
void cmd_benchmark(const BenchmarkArgs& args, const CommonOptions& common, std::ostream& log);
void cmd_filter_msa(const FilterMsaArgs& args, const CommonOptions& common, std::ostream& log);
void cmd_ensemble(const EnsembleArgs& args, const CommonOptions& common, std::ostream& log);

/// Parses `args` (without the program name) and runs the selected command.
/// Returns the process exit code: 0 success, 1 validation error, 2 runtime
/// error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace protfit::cli
