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

#include "protfit/train/config.hpp"

#include <cmath>

#include "protfit/util/error.hpp"
#include "protfit/util/io.hpp"
#include "protfit/util/keyvalue.hpp"

namespace protfit::train {

namespace {

std::size_t as_size(std::string_view v, const std::string& context) {
  const long long x = parse_integer(v, context);
  if (x < 0) throw ConfigError(context + ": must be non-negative");
  return static_cast<std::size_t>(x);
}

}  // namespace

void TrainConfig::validate() const {
  auto fail = [](const std::string& m) { throw ConfigError("train config: " + m); };
  if (steps == 0) fail("steps must be >= 1");
  if (batch_size == 0) fail("batch_size must be >= 1");
  if (!(peak_lr >= 0) || !std::isfinite(peak_lr)) fail("peak_lr must be finite and >= 0");
  if (warmup_steps >= steps) fail("warmup_steps must be < steps");
  if (!(weight_decay >= 0)) fail("weight_decay must be >= 0");
  if (!(mirror_prob >= 0 && mirror_prob <= 1)) fail("mirror_prob must lie in [0, 1]");
  if (!(validation_fraction >= 0 && validation_fraction < 1)) {
    fail("validation_fraction must lie in [0, 1)");
  }
  if (!(max_grad_norm >= 0)) fail("max_grad_norm must be >= 0");
  if (!(beta1 >= 0 && beta1 < 1) || !(beta2 >= 0 && beta2 < 1)) fail("betas must lie in [0, 1)");
  if (!(adam_eps > 0)) fail("adam_eps must be > 0");
}

std::string TrainConfig::to_text() const {
  std::string out;
  auto line = [&](const char* key, const std::string& value) {
    out += key;
    out += '=';
    out += value;
    out += '\n';
  };
  line("steps", std::to_string(steps));
  line("batch_size", std::to_string(batch_size));
  line("peak_lr", format_exact(peak_lr));
  line("warmup_steps", std::to_string(warmup_steps));
  line("weight_decay", format_exact(weight_decay));
  line("mirror_prob", format_exact(mirror_prob));
  line("seed", std::to_string(seed));
  line("checkpoint_every", std::to_string(checkpoint_every));
  line("validation_fraction", format_exact(validation_fraction));
  line("max_grad_norm", format_exact(max_grad_norm));
  line("beta1", format_exact(beta1));
  line("beta2", format_exact(beta2));
  line("adam_eps", format_exact(adam_eps));
  return out;
}

bool TrainConfig::set(std::string_view key, std::string_view value, const std::string& context) {
  if (key == "steps") steps = as_size(value, context);
  else if (key == "batch_size") batch_size = as_size(value, context);
  else if (key == "peak_lr") peak_lr = parse_real(value, context);
  else if (key == "warmup_steps") warmup_steps = as_size(value, context);
  else if (key == "weight_decay") weight_decay = parse_real(value, context);
  else if (key == "mirror_prob") mirror_prob = parse_real(value, context);
  else if (key == "seed") seed = static_cast<std::uint64_t>(as_size(value, context));
  else if (key == "checkpoint_every") checkpoint_every = as_size(value, context);
  else if (key == "validation_fraction") validation_fraction = parse_real(value, context);
  else if (key == "max_grad_norm") max_grad_norm = parse_real(value, context);
  else if (key == "beta1") beta1 = parse_real(value, context);
  else if (key == "beta2") beta2 = parse_real(value, context);
  else if (key == "adam_eps") adam_eps = parse_real(value, context);
  else return false;
  return true;
}

TrainConfig TrainConfig::from_text(std::string_view text, const std::string& source) {
  TrainConfig cfg;
  for (const auto& [key, value] : parse_key_values(text, source)) {
    if (!cfg.set(key, value, source + ": " + key)) {
      throw ConfigError(source + ": unknown train config key '" + key + "'");
    }
  }
  cfg.validate();
  return cfg;
}

double lr_schedule(std::size_t step, const TrainConfig& cfg) {
  if (step >= cfg.steps) return 0.0;
  if (step < cfg.warmup_steps) {
    return cfg.peak_lr * static_cast<double>(step) / static_cast<double>(cfg.warmup_steps);
  }
  return cfg.peak_lr * static_cast<double>(cfg.steps - step) /
         static_cast<double>(cfg.steps - cfg.warmup_steps);
}

}  // namespace protfit::train
