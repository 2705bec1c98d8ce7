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

#include "protfit/cli/commands.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <ostream>
#include <set>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "protfit/bench/report.hpp"
#include "protfit/cli/manifest.hpp"
#include "protfit/model/checkpoint.hpp"
#include "protfit/retrieval/msa.hpp"
#include "protfit/retrieval/profile.hpp"
#include "protfit/score/scorer.hpp"
#include "protfit/seq/mutation.hpp"
#include "protfit/train/trainer.hpp"
#include "protfit/util/csv.hpp"
#include "protfit/util/error.hpp"
#include "protfit/util/io.hpp"
#include "protfit/util/keyvalue.hpp"

namespace protfit::cli {

namespace {

std::string read_input(RunManifest& manifest, const fs::path& path) {
  std::string bytes = read_file(path);
  manifest.add_input(path, bytes);
  return bytes;
}

void publish(OutputTransaction& tx, RunManifest& manifest, const fs::path& path,
             std::string_view contents) {
  tx.write(path, contents);
  manifest.add_output(path);
}

fs::path sidecar_manifest(const fs::path& out) {
  fs::path p = out;
  p += ".manifest.json";
  return p;
}

seq::ProteinSequence single_record(const fs::path& path, std::string_view text) {
  auto seqs = seq::parse_fasta(text, path.string());
  if (seqs.size() != 1) {
    throw ValidationError(path.string() + ": expected exactly one FASTA record, found " +
                          std::to_string(seqs.size()));
  }
  return seqs.front();
}

}  // namespace

void cmd_train(const TrainArgs& args, const CommonOptions& common, std::ostream& log) {
  RunManifest manifest("train");
  OutputTransaction tx;

  const std::string config_text = read_input(manifest, args.config);
  model::ModelConfig mcfg;
  train::TrainConfig tcfg;
  for (const auto& [key, value] : parse_key_values(config_text, args.config.string())) {
    const std::string where = args.config.string() + ": " + key;
    bool known = false;
    if (key.rfind("model.", 0) == 0) known = mcfg.set(key.substr(6), value, where);
    else if (key.rfind("train.", 0) == 0) known = tcfg.set(key.substr(6), value, where);
    if (!known) {
      throw ConfigError(args.config.string() + ": unknown key '" + key +
                        "' (keys are model.<name> or train.<name>)");
    }
  }
  if (mcfg.precision.empty()) mcfg.precision = nn::kPrecisionName;
  mcfg.validate();
  tcfg.validate();

  const auto corpus = seq::parse_fasta(read_input(manifest, args.corpus), args.corpus.string());
  train::TrainOptions options;
  if (args.cluster_map) {
    const CsvTable table =
        parse_csv(read_input(manifest, *args.cluster_map), args.cluster_map->string());
    const std::size_t c_id = table.require_column("id");
    const std::size_t c_cluster = table.require_column("cluster");
    std::map<std::string, std::string> clusters;
    for (const auto& row : table.rows) clusters[row[c_id]] = row[c_cluster];
    options.cluster_map = std::move(clusters);
  }
  const std::string train_text = tcfg.to_text();
  options.on_checkpoint = [&](std::size_t step, const model::ProteinLM& m,
                              const std::string& optimizer) {
    const std::string meta = optimizer + train_text;
    if (step == tcfg.steps) {
      publish(tx, manifest, args.out_dir / "model.ckpt",
              model::serialize_checkpoint(m, step, meta));
    } else {
      publish(tx, manifest, args.out_dir / ("checkpoint-" + std::to_string(step) + ".ckpt"),
              model::serialize_checkpoint(m, step, meta));
    }
    log << "step " << step << ": checkpoint written\n";
  };

  model::ProteinLM lm(mcfg);
  const auto result = train::train(corpus, lm, tcfg, options);

  std::string split = "id,split\n";
  for (const auto& id : result.train_ids) split += csv_row({id, "train"});
  for (const auto& id : result.validation_ids) split += csv_row({id, "validation"});
  std::string resolved;
  for (const auto& [k, v] : parse_key_values(mcfg.to_text(), "model")) {
    resolved += "model." + k + "=" + v + "\n";
  }
  for (const auto& [k, v] : parse_key_values(train_text, "train")) {
    resolved += "train." + k + "=" + v + "\n";
    manifest.set_config("train." + k, v);
  }
  for (const auto& [k, v] : parse_key_values(mcfg.to_text(), "model")) {
    manifest.set_config("model." + k, v);
  }
  publish(tx, manifest, args.out_dir / "loss.csv", result.trace.to_csv());
  publish(tx, manifest, args.out_dir / "rejected.csv",
          seq::rejection_report_csv(result.filtered));
  publish(tx, manifest, args.out_dir / "split.csv", split);
  publish(tx, manifest, args.out_dir / "config.txt", resolved);
  manifest.set_seed(tcfg.seed);
  manifest.set_config("deterministic", common.deterministic ? "true" : "false");
  manifest.add_note("kept_sequences", std::to_string(result.filtered.kept.size()));
  manifest.add_note("rejected_sequences", std::to_string(result.filtered.rejected.size()));
  manifest.add_note("final_loss", format_exact(result.trace.records.back().loss));
  if (result.validation_loss) {
    manifest.add_note("validation_loss", format_exact(*result.validation_loss));
  }
  tx.write(args.out_dir / "manifest.json", manifest.to_json());
  tx.commit();
  log << "trained " << tcfg.steps << " steps, final loss "
      << format_fixed(result.trace.records.back().loss, 4) << " nats/token\n";
}

void cmd_build_profile(const BuildProfileArgs& args, const CommonOptions&, std::ostream& log) {
  RunManifest manifest("build-profile");
  OutputTransaction tx;
  const auto msa = retrieval::parse_a2m(read_input(manifest, args.msa), args.msa.string());
  const auto weights = retrieval::sequence_weights(msa, args.theta);
  const auto profile = retrieval::build_profile(msa, weights, args.lambda);
  manifest.set_config("theta", format_exact(args.theta));
  manifest.set_config("lambda", format_exact(args.lambda));
  manifest.add_note("rows", std::to_string(msa.n_rows()));
  manifest.add_note("n_eff", format_exact(weights.n_eff));
  publish(tx, manifest, args.out, profile.to_text());
  tx.write(sidecar_manifest(args.out), manifest.to_json());
  tx.commit();
  log << "profile over " << profile.length() << " positions from " << msa.n_rows()
      << " rows (n_eff " << format_fixed(weights.n_eff, 2) << ")\n";
}

void cmd_score(const ScoreArgs& args, const CommonOptions& common, std::ostream& log) {
  RunManifest manifest("score");
  OutputTransaction tx;
  const std::string ckpt_bytes = read_input(manifest, args.checkpoint);
  const auto loaded = model::deserialize_checkpoint(ckpt_bytes, args.checkpoint.string());
  const auto wt = single_record(args.wild_type, read_input(manifest, args.wild_type));

  std::optional<retrieval::RetrievalProfile> profile;
  if (args.profile) {
    profile = retrieval::RetrievalProfile::from_text(read_input(manifest, *args.profile),
                                                     args.profile->string());
    if (profile->length() != wt.residues.size() ||
        (!profile->seed_residues.empty() && profile->seed_residues != wt.residues)) {
      throw ValidationError(args.profile->string() + ": profile seed (" +
                            std::to_string(profile->length()) +
                            " positions) does not match the wild type in " +
                            args.wild_type.string() + " (" +
                            std::to_string(wt.residues.size()) + " residues)");
    }
  }

  const CsvTable table = parse_csv(read_input(manifest, args.mutants), args.mutants.string());
  const std::size_t c_mut = table.require_column("mutant");
  score::ScoreRequest request;
  request.wild_type = wt;
  request.profile = profile ? &*profile : nullptr;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    try {
      request.mutants.push_back(seq::parse_mutation(table.rows[i][c_mut], wt));
    } catch (const ValidationError& e) {
      throw ValidationError(args.mutants.string() + ":" + std::to_string(table.line_numbers[i]) +
                            ": " + e.what());
    }
  }

  score::ScoreOptions options;
  options.fusion.alpha = profile ? args.alpha : 0.0;
  options.fusion.include_eos = args.include_eos;
  options.fusion.uncovered_full_weight = !args.uncovered_scaled;
  options.bidirectional = !args.unidirectional;
  options.jobs = common.effective_jobs();
  options.imputation_seed = args.seed;
  const score::LanguageModelScorer scorer(loaded.model);
  const auto records = score::score_bidirectional(request, scorer, options);

  manifest.set_seed(args.seed);
  manifest.set_config("alpha", format_exact(args.alpha));
  manifest.set_config("profile", args.profile ? args.profile->string() : "");
  manifest.set_config("bidirectional", options.bidirectional ? "true" : "false");
  manifest.set_config("include_eos", args.include_eos ? "true" : "false");
  manifest.set_config("uncovered_weight", args.uncovered_scaled ? "1-alpha" : "1");
  manifest.set_config("jobs", std::to_string(options.jobs));
  publish(tx, manifest, args.out, score::format_scores(records));
  tx.write(sidecar_manifest(args.out), manifest.to_json());
  tx.commit();
  log << "scored " << records.size() << " mutants\n";
}

void cmd_benchmark(const BenchmarkArgs& args, const CommonOptions&, std::ostream& log) {
  RunManifest manifest("benchmark");
  OutputTransaction tx;
  const auto reference = bench::parse_reference(
      parse_csv(read_input(manifest, args.reference), args.reference.string()));
  std::map<std::string, bench::AssayMetadata> metadata;
  std::vector<bench::AssayMetrics> metrics;
  for (const auto& meta : reference) {
    metadata[meta.assay_id] = meta;
    const fs::path assay_path = args.assays_dir / (meta.assay_id + ".csv");
    const CsvTable raw = parse_csv(read_input(manifest, assay_path), assay_path.string());

    seq::ProteinSequence wt;
    if (const auto c = raw.column("target_seq"); c && !raw.rows.empty()) {
      wt = {meta.assay_id, raw.rows.front()[*c], assay_path.string()};
      for (char& ch : wt.residues) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
    } else {
      const fs::path fasta = args.assays_dir / (meta.assay_id + ".fasta");
      wt = single_record(fasta, read_input(manifest, fasta));
    }

    bench::PreprocessSummary summary;
    bench::AssayTable table = bench::preprocess_assay(raw, wt, &summary);
    table.assay_id = meta.assay_id;
    table.metadata = meta;
    manifest.add_note(meta.assay_id,
                      "rows=" + std::to_string(summary.input_rows) +
                          " silent=" + std::to_string(summary.silent_removed) +
                          " duplicates=" + std::to_string(summary.duplicates_merged) +
                          " missing=" + std::to_string(summary.missing_dropped) +
                          " invalid=" + std::to_string(summary.errors.size()));
    for (const auto& e : summary.errors) log << "warning: " << e << "\n";

    const fs::path score_path = args.scores_dir / (meta.assay_id + ".csv");
    const auto scores = score::parse_scores(read_input(manifest, score_path), score_path.string());
    std::map<std::string, double> by_code;
    for (const auto& r : scores.records) {
      std::string key;
      try {
        key = seq::format_mutation(seq::parse_mutation(r.mutant, wt));
      } catch (const ValidationError& e) {
        throw ValidationError(score_path.string() + ": " + e.what());
      }
      if (!by_code.emplace(key, r.F).second) {
        throw ValidationError(score_path.string() + ": mutant '" + r.mutant +
                              "' appears twice after normalisation");
      }
    }
    std::vector<double> predictions;
    std::size_t missing = 0;
    for (const auto& row : table.rows) {
      const auto it = by_code.find(row.mutant);
      if (it == by_code.end()) {
        ++missing;
      } else {
        predictions.push_back(it->second);
      }
    }
    if (missing) {
      throw ValidationError(score_path.string() + ": no score for " + std::to_string(missing) +
                            " of " + std::to_string(table.rows.size()) + " mutants of assay " +
                            meta.assay_id);
    }
    metrics.push_back(bench::evaluate_assay(table, predictions));
  }
  const auto report = bench::aggregate(metrics, metadata);
  publish(tx, manifest, args.out_dir / "per_assay.csv", bench::format_assay_metrics(metrics));
  publish(tx, manifest, args.out_dir / "summary.csv", bench::format_summary(report));
  publish(tx, manifest, args.out_dir / "report.txt", bench::format_text_report(report));
  tx.write(args.out_dir / "manifest.json", manifest.to_json());
  tx.commit();
  log << "benchmarked " << metrics.size() << " assays\n";
}

void cmd_filter_msa(const FilterMsaArgs& args, const CommonOptions&, std::ostream& log) {
  RunManifest manifest("filter-msa");
  OutputTransaction tx;
  const auto msa = retrieval::parse_a2m(read_input(manifest, args.msa), args.msa.string());
  const auto filtered = retrieval::filter_by_similarity(msa, args.min_identity);
  manifest.set_config("min_identity", format_exact(args.min_identity));
  manifest.add_note("rows_in", std::to_string(msa.n_rows()));
  manifest.add_note("rows_out", std::to_string(filtered.n_rows()));
  publish(tx, manifest, args.out, retrieval::format_a2m(filtered));
  tx.write(sidecar_manifest(args.out), manifest.to_json());
  tx.commit();
  log << "kept " << filtered.n_rows() << " of " << msa.n_rows() << " rows\n";
}

void cmd_ensemble(const EnsembleArgs& args, const CommonOptions&, std::ostream& log) {
  RunManifest manifest("ensemble");
  OutputTransaction tx;
  std::vector<score::ScoreTable> tables;
  for (const auto& path : args.inputs) {
    tables.push_back(score::parse_scores(read_input(manifest, path), path.string()));
  }
  const auto merged = score::ensemble_scores(tables);
  publish(tx, manifest, args.out, score::format_ensemble(merged));
  tx.write(sidecar_manifest(args.out), manifest.to_json());
  tx.commit();
  log << "averaged " << tables.size() << " score files\n";
}

namespace {

int exit_code_for(const Error& e) {
  if (dynamic_cast<const ParseError*>(&e) || dynamic_cast<const ValidationError*>(&e) ||
      dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const ChecksumError*>(&e)) {
    return 1;
  }
  return 2;
}

std::string error_kind(const std::exception& e) {
  if (dynamic_cast<const ParseError*>(&e)) return "parse";
  if (dynamic_cast<const ValidationError*>(&e)) return "validation";
  if (dynamic_cast<const ConfigError*>(&e)) return "config";
  if (dynamic_cast<const ChecksumError*>(&e)) return "checksum";
  if (dynamic_cast<const ShapeError*>(&e)) return "shape";
  if (dynamic_cast<const NumericError*>(&e)) return "numeric";
  if (dynamic_cast<const CLI::ParseError*>(&e)) return "usage";
  return "runtime";
}

void report_error(std::ostream& err, bool json, const std::exception& e, int code) {
  if (json) {
    nlohmann::ordered_json j;
    j["error"]["kind"] = error_kind(e);
    j["error"]["message"] = e.what();
    j["error"]["exit_code"] = code;
    err << j.dump() << "\n";
  } else {
    err << "protfit: " << error_kind(e) << " error: " << e.what() << "\n";
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"protfit: protein language model training, fitness scoring and benchmarking",
               "protfit"};
  app.set_version_flag("--version", std::string(kToolVersion));
  app.require_subcommand(1);
  app.fallthrough();

  CommonOptions common;
  std::string error_format = "text";
  app.add_option("--jobs", common.jobs, "Worker threads for scoring")->check(CLI::PositiveNumber);
  app.add_flag("--deterministic", common.deterministic, "Force a single worker thread");
  app.add_option("--error-format", error_format, "Error output format")
      ->check(CLI::IsMember({"text", "json"}));

  TrainArgs train;
  auto* c_train = app.add_subcommand("train", "Train a language model from FASTA");
  c_train->add_option("--config", train.config, "key=value config file")->required();
  c_train->add_option("--corpus", train.corpus, "Training FASTA")->required();
  c_train->add_option("--out", train.out_dir, "Output directory")->required();
  c_train->add_option("--cluster-map", train.cluster_map, "CSV with id,cluster");

  BuildProfileArgs profile;
  auto* c_profile = app.add_subcommand("build-profile", "Build a retrieval profile from an A2M MSA");
  c_profile->add_option("--msa", profile.msa, "A2M alignment, seed first")->required();
  c_profile->add_option("--theta", profile.theta, "Sequence weighting threshold")
      ->check(CLI::Range(0.0, 1.0));
  c_profile->add_option("--lambda", profile.lambda, "Pseudocount")->check(CLI::Range(0.0, 1e9));
  c_profile->add_option("--out", profile.out, "Profile output")->required();

  ScoreArgs score;
  auto* c_score = app.add_subcommand("score", "Score mutants against a wild type");
  c_score->add_option("--checkpoint", score.checkpoint, "Model checkpoint")->required();
  c_score->add_option("--wild-type", score.wild_type, "FASTA with one record")->required();
  c_score->add_option("--mutants", score.mutants, "CSV with a mutant column")->required();
  c_score->add_option("--profile", score.profile, "Retrieval profile");
  c_score->add_option("--alpha", score.alpha, "Retrieval weight")->check(CLI::Range(0.0, 1.0));
  c_score->add_flag("--unidirectional", score.unidirectional, "Forward direction only");
  c_score->add_flag("--include-eos,!--no-eos", score.include_eos, "Add the end token term");
  c_score->add_flag("--uncovered-scaled", score.uncovered_scaled,
                    "Weight uncovered positions by 1-alpha");
  c_score->add_option("--seed", score.seed, "Imputation seed");
  c_score->add_option("--out", score.out, "Score CSV")->required();

  BenchmarkArgs bench;
  auto* c_bench = app.add_subcommand("benchmark", "Compare scores with assay measurements");
  c_bench->add_option("--scores", bench.scores_dir, "Directory of <assay_id>.csv scores")
      ->required();
  c_bench->add_option("--assays", bench.assays_dir, "Directory of <assay_id>.csv assays")
      ->required();
  c_bench->add_option("--reference", bench.reference, "Reference CSV")->required();
  c_bench->add_option("--out", bench.out_dir, "Output directory")->required();

  FilterMsaArgs filter;
  auto* c_filter = app.add_subcommand("filter-msa", "Keep MSA rows by identity to the seed");
  c_filter->add_option("--msa", filter.msa, "A2M alignment")->required();
  c_filter->add_option("--min-identity", filter.min_identity, "Identity threshold")
      ->required()
      ->check(CLI::Range(0.0, 1.0));
  c_filter->add_option("--out", filter.out, "Filtered A2M")->required();

  EnsembleArgs ensemble;
  auto* c_ens = app.add_subcommand("ensemble", "Average score files over models");
  c_ens->add_option("--out", ensemble.out, "Ensembled CSV")->required();
  c_ens->add_option("inputs", ensemble.inputs, "Score CSVs")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    report_error(err, error_format == "json", e, 1);
    return 1;
  }

  try {
    if (c_train->parsed()) cmd_train(train, common, err);
    else if (c_profile->parsed()) cmd_build_profile(profile, common, err);
    else if (c_score->parsed()) cmd_score(score, common, err);
    else if (c_bench->parsed()) cmd_benchmark(bench, common, err);
    else if (c_filter->parsed()) cmd_filter_msa(filter, common, err);
    else if (c_ens->parsed()) cmd_ensemble(ensemble, common, err);
  } catch (const Error& e) {
    const int code = exit_code_for(e);
    report_error(err, error_format == "json", e, code);
    return code;
  } catch (const std::exception& e) {
    report_error(err, error_format == "json", e, 2);
    return 2;
  }
  return 0;
}

}  // namespace protfit::cli
