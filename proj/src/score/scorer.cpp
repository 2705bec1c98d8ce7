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

#include "protfit/score/scorer.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <map>
#include <thread>
#include <tuple>

#include "protfit/seq/vocab.hpp"
#include "protfit/util/error.hpp"

namespace protfit::score {

using retrieval::RetrievalProfile;

Window select_window(std::span<const std::size_t> positions, std::size_t seq_len,
                     std::size_t window_len) {
  if (window_len == 0) throw ValidationError("scoring window length must be >= 1");
  if (seq_len == 0) throw ValidationError("cannot window an empty sequence");
  for (std::size_t p : positions) {
    if (p < 1 || p > seq_len) {
      throw ValidationError("mutated position " + std::to_string(p) + " outside 1.." +
                            std::to_string(seq_len));
    }
  }
  if (seq_len <= window_len) return {1, seq_len};
  std::size_t centre = (seq_len + 1) / 2;
  if (!positions.empty()) {
    std::size_t sum = 0;
    for (std::size_t p : positions) sum += p;
    centre = sum / positions.size();
  }
  const std::size_t half = (window_len + 1) / 2;
  std::size_t start = centre >= half ? centre - half + 1 : 1;
  start = std::clamp<std::size_t>(start, 1, seq_len - window_len + 1);
  const Window w{start, start + window_len - 1};
  for (std::size_t p : positions) {
    if (p < w.start || p > w.end) {
      throw ValidationError("mutated positions span more than the " +
                            std::to_string(window_len) + "-residue scoring window");
    }
  }
  return w;
}

double fused_log_likelihood(const SequenceModel& model, std::string_view residues,
                            const RetrievalProfile* profile, const FusionOptions& fusion) {
  const double alpha = fusion.alpha;
  if (!(alpha >= 0 && alpha <= 1)) throw ValidationError("alpha must lie in [0, 1]");
  const auto lp = model.log_prob(residues, fusion.include_eos);
  std::vector<std::optional<double>> r;
  if (profile) r = retrieval::retrieval_log_probs(residues, *profile);
  double total = 0.0;
  for (std::size_t i = 0; i < lp.per_position.size(); ++i) {
    const double a = lp.per_position[i];
    if (!profile) {
      total += a;
    } else if (i < r.size() && r[i]) {
      total += (1.0 - alpha) * a + alpha * *r[i];
    } else {
      total += fusion.uncovered_full_weight ? a : (1.0 - alpha) * a;
    }
  }
  return total;
}

double fitness_ratio(const SequenceModel& model, std::string_view mutant,
                     const RetrievalProfile* mutant_profile, std::string_view wild_type,
                     const RetrievalProfile* wild_type_profile, const FusionOptions& fusion) {
  return fused_log_likelihood(model, mutant, mutant_profile, fusion) -
         fused_log_likelihood(model, wild_type, wild_type_profile, fusion);
}

namespace {

RetrievalProfile slice(const RetrievalProfile& p, Window w) {
  RetrievalProfile out = p;
  out.columns.assign(p.columns.begin() + static_cast<std::ptrdiff_t>(w.start - 1),
                     p.columns.begin() + static_cast<std::ptrdiff_t>(w.end));
  out.seed_residues.clear();
  return out;
}

std::vector<std::size_t> mirrored(std::vector<std::size_t> positions, std::size_t len) {
  for (auto& p : positions) p = len + 1 - p;
  std::sort(positions.begin(), positions.end());
  return positions;
}

std::string reversed(std::string s) {
  std::reverse(s.begin(), s.end());
  return s;
}

// One direction's view of a sequence: residues, optional aligned profile.
struct View {
  std::string residues;
  std::optional<RetrievalProfile> profile;
};

View view_of(const std::string& residues, const std::optional<RetrievalProfile>& profile,
             bool reverse, Window w) {
  View v;
  const std::string oriented = reverse ? reversed(residues) : residues;
  v.residues = oriented.substr(w.start - 1, w.length());
  if (profile) v.profile = slice(reverse ? retrieval::mirror(*profile) : *profile, w);
  return v;
}

char impute_one(char c, Rng& rng) {
  return seq::impute_indeterminates({"", std::string(1, c), ""}, rng).residues[0];
}

template <class Fn>
void parallel_for(std::size_t n, std::size_t jobs, Fn fn) {
  jobs = std::max<std::size_t>(1, std::min(jobs, n));
  std::vector<std::exception_ptr> errors(n);
  if (jobs == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> workers;
  for (std::size_t w = 0; w < jobs; ++w) {
    workers.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  }
  for (auto& t : workers) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

struct Job {
  std::string residues;                       // imputed mutant
  std::optional<RetrievalProfile> profile;    // aligned to the mutant
  Window mut_window[2];
  Window wt_window[2];
};

}  // namespace

std::vector<FitnessRecord> score_bidirectional(const ScoreRequest& request,
                                               const SequenceModel& model,
                                               const ScoreOptions& options) {
  const auto& wt = request.wild_type;
  const std::size_t wt_len = wt.residues.size();
  const std::size_t window_len = model.max_residues();
  const int directions = options.bidirectional ? 2 : 1;
  if (request.profile && request.profile->length() != wt_len) {
    throw ValidationError("profile covers " + std::to_string(request.profile->length()) +
                          " positions but the wild type has " + std::to_string(wt_len) +
                          " residues");
  }

  Rng rng(options.imputation_seed);
  const std::string wt_residues = seq::impute_indeterminates(wt, rng).residues;
  std::optional<RetrievalProfile> wt_profile;
  if (request.profile) wt_profile = *request.profile;

  std::vector<Job> jobs(request.mutants.size());
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    const auto& m = request.mutants[i];
    if (m.wild_type.residues != wt.residues) {
      throw ValidationError("mutant '" + m.code + "' was parsed against a different wild type");
    }
    Rng child = rng.split();
    const retrieval::ColumnMap map = m.has_indels()
                                         ? retrieval::surgery_for_indels(wt_len, m)
                                         : retrieval::ColumnMap::identity(wt_len);
    Job& job = jobs[i];
    job.residues = m.mutant.residues;
    for (std::size_t p = 0; p < job.residues.size(); ++p) {
      const char c = job.residues[p];
      if (!seq::is_indeterminate(c)) continue;
      const auto src = map.source[p];
      job.residues[p] = src && wt.residues[*src] == c ? wt_residues[*src] : impute_one(c, child);
    }
    if (request.profile) job.profile = retrieval::remap_profile(*request.profile, map);

    const std::size_t mut_len = job.residues.size();
    const auto wt_pos = m.wild_type_positions();
    const auto mut_pos = m.has_indels() ? m.mutant_positions() : wt_pos;
    job.mut_window[0] = select_window(mut_pos, mut_len, window_len);
    job.wt_window[0] =
        m.has_indels() ? select_window(wt_pos, wt_len, window_len) : job.mut_window[0];
    if (directions == 2) {
      job.mut_window[1] = select_window(mirrored(mut_pos, mut_len), mut_len, window_len);
      job.wt_window[1] = m.has_indels()
                             ? select_window(mirrored(wt_pos, wt_len), wt_len, window_len)
                             : job.mut_window[1];
    }
  }

  // Wild-type terms are shared by every mutant using the same window.
  using Key = std::tuple<int, std::size_t, std::size_t>;
  std::map<Key, double> wt_cache;
  for (const auto& job : jobs) {
    for (int d = 0; d < directions; ++d) {
      wt_cache.emplace(Key{d, job.wt_window[d].start, job.wt_window[d].end}, 0.0);
    }
  }
  std::vector<std::pair<const Key, double>*> wt_entries;
  for (auto& e : wt_cache) wt_entries.push_back(&e);
  parallel_for(wt_entries.size(), options.jobs, [&](std::size_t i) {
    const auto& [d, start, end] = wt_entries[i]->first;
    const View v = view_of(wt_residues, wt_profile, d == 1, {start, end});
    wt_entries[i]->second = fused_log_likelihood(model, v.residues,
                                                 v.profile ? &*v.profile : nullptr, options.fusion);
  });

  std::vector<FitnessRecord> out(jobs.size());
  parallel_for(jobs.size(), options.jobs, [&](std::size_t i) {
    const Job& job = jobs[i];
    double f[2] = {0.0, 0.0};
    for (int d = 0; d < directions; ++d) {
      const View v = view_of(job.residues, job.profile, d == 1, job.mut_window[d]);
      const double mut_ll = fused_log_likelihood(model, v.residues,
                                                 v.profile ? &*v.profile : nullptr, options.fusion);
      f[d] = mut_ll - wt_cache.at(Key{d, job.wt_window[d].start, job.wt_window[d].end});
    }
    FitnessRecord& r = out[i];
    r.mutant = request.mutants[i].code;
    r.F_forward = f[0];
    r.window = job.mut_window[0];
    if (directions == 2) {
      r.F_reverse = f[1];
      r.reverse_window = job.mut_window[1];
      r.F = (f[0] + f[1]) / 2.0;
    } else {
      r.F = f[0];
    }
  });
  return out;
}

}  // namespace protfit::score
