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

#include "protfit/bench/report.hpp"

#include <cstdio>

#include "protfit/bench/metrics.hpp"
#include "protfit/util/error.hpp"
#include "protfit/util/io.hpp"

namespace protfit::bench {

AssayMetrics evaluate_assay(const AssayTable& table, const std::vector<double>& predictions) {
  if (predictions.size() != table.rows.size()) {
    throw ValidationError(table.assay_id + ": " + std::to_string(predictions.size()) +
                          " predictions for " + std::to_string(table.rows.size()) + " rows");
  }
  AssayMetrics m;
  m.assay_id = table.assay_id;
  m.n = table.rows.size();
  std::vector<double> dms;
  for (const auto& r : table.rows) dms.push_back(r.dms_score);
  m.spearman = spearman(predictions, dms);
  const Labels labels = binarize_labels(table);
  m.auc = auc(predictions, labels.values);
  const MccResult c = mcc(predictions, labels.values);
  m.mcc = c.value;
  m.mcc_degenerate = c.degenerate;
  return m;
}

namespace {

struct Mean {
  double sum = 0.0;
  std::size_t n = 0;
  void add(const std::optional<double>& v) {
    if (v) {
      sum += *v;
      ++n;
    }
  }
  std::optional<double> value() const {
    return n ? std::optional<double>(sum / static_cast<double>(n)) : std::nullopt;
  }
};

MetricSummary summarise(const std::vector<const AssayMetrics*>& assays,
                        const std::map<std::string, AssayMetadata>& metadata,
                        std::map<std::string, MetricSummary>* per_uniprot_out) {
  struct Group {
    Mean spearman, auc, mcc;
    std::size_t n = 0;
  };
  std::map<std::string, Group> groups;  // sorted: order-independent reduction
  for (const AssayMetrics* a : assays) {
    Group& g = groups[metadata.at(a->assay_id).uniprot_id];
    g.spearman.add(a->spearman);
    g.auc.add(a->auc);
    g.mcc.add(a->mcc);
    ++g.n;
  }
  MetricSummary out;
  out.n_assays = assays.size();
  out.n_uniprots = groups.size();
  Mean spearman, auc_mean, mcc_mean;
  for (const auto& [uniprot, g] : groups) {
    MetricSummary u{g.spearman.value(), g.auc.value(), g.mcc.value(), g.n, 1};
    spearman.add(u.spearman);
    auc_mean.add(u.auc);
    mcc_mean.add(u.mcc);
    if (per_uniprot_out) (*per_uniprot_out)[uniprot] = u;
  }
  out.spearman = spearman.value();
  out.auc = auc_mean.value();
  out.mcc = mcc_mean.value();
  return out;
}

std::string metric_field(const std::optional<double>& v) {
  return v ? format_fixed(*v, 6) : "";
}

}  // namespace

AggregateReport aggregate(const std::vector<AssayMetrics>& assays,
                          const std::map<std::string, AssayMetadata>& metadata) {
  std::vector<const AssayMetrics*> all;
  for (const auto& a : assays) {
    if (!metadata.count(a.assay_id)) {
      throw ValidationError("assay '" + a.assay_id + "' has no uniprot mapping");
    }
    all.push_back(&a);
  }
  AggregateReport report;
  report.overall = summarise(all, metadata, &report.per_uniprot);

  const std::pair<const char*, std::string AssayMetadata::*> dims[] = {
      {"msa_depth", &AssayMetadata::msa_depth_bucket},
      {"mutation_depth", &AssayMetadata::mutation_depth_bucket},
      {"taxon", &AssayMetadata::taxon}};
  for (const auto& [name, field] : dims) {
    std::map<std::string, std::vector<const AssayMetrics*>> members;
    for (const AssayMetrics* a : all) {
      const std::string& bucket = metadata.at(a->assay_id).*field;
      if (!bucket.empty()) members[bucket].push_back(a);
    }
    for (const auto& [bucket, list] : members) {
      report.buckets[name][bucket] = summarise(list, metadata, nullptr);
    }
  }
  return report;
}

std::string format_assay_metrics(const std::vector<AssayMetrics>& assays) {
  std::string out = "assay_id,n,spearman,auc,mcc,mcc_degenerate\n";
  for (const auto& a : assays) {
    out += csv_row({a.assay_id, std::to_string(a.n), metric_field(a.spearman),
                    metric_field(a.auc), metric_field(a.mcc), a.mcc_degenerate ? "1" : "0"});
  }
  return out;
}

std::string format_summary(const AggregateReport& report) {
  std::string out = "group,bucket,n_assays,n_uniprots,spearman,auc,mcc\n";
  auto row = [&](const std::string& group, const std::string& bucket, const MetricSummary& s) {
    out += csv_row({group, bucket, std::to_string(s.n_assays), std::to_string(s.n_uniprots),
                    metric_field(s.spearman), metric_field(s.auc), metric_field(s.mcc)});
  };
  row("overall", "all", report.overall);
  for (const auto& [uniprot, s] : report.per_uniprot) row("uniprot", uniprot, s);
  for (const auto& [dim, buckets] : report.buckets) {
    for (const auto& [bucket, s] : buckets) row(dim, bucket, s);
  }
  return out;
}

std::string format_text_report(const AggregateReport& report) {
  auto cell = [](const std::optional<double>& v) {
    char buf[32];
    if (v) {
      std::snprintf(buf, sizeof buf, "%9.3f", *v);
    } else {
      std::snprintf(buf, sizeof buf, "%9s", "-");
    }
    return std::string(buf);
  };
  auto block = [&](const std::string& title, const std::map<std::string, MetricSummary>& rows) {
    char line[160];
    std::string out = title + "\n";
    std::snprintf(line, sizeof line, "  %-24s %7s %9s %9s %9s\n", "bucket", "assays", "spearman",
                  "auc", "mcc");
    out += line;
    for (const auto& [name, s] : rows) {
      std::snprintf(line, sizeof line, "  %-24s %7zu", name.c_str(), s.n_assays);
      out += line + cell(s.spearman) + " " + cell(s.auc) + " " + cell(s.mcc) + "\n";
    }
    return out + "\n";
  };
  std::string out = block("Overall", {{"all", report.overall}});
  const std::pair<const char*, const char*> titles[] = {
      {"taxon", "By taxon"}, {"msa_depth", "By MSA depth"}, {"mutation_depth", "By mutation depth"}};
  for (const auto& [key, title] : titles) {
    const auto it = report.buckets.find(key);
    if (it != report.buckets.end()) out += block(title, it->second);
  }
  return out;
}

}  // namespace protfit::bench
