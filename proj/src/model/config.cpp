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

#include "protfit/model/config.hpp"

#include "protfit/nn/tensor.hpp"
#include "protfit/util/error.hpp"
#include "protfit/util/io.hpp"
#include "protfit/util/keyvalue.hpp"

namespace protfit::model {

namespace {

std::size_t as_size(std::string_view v, const std::string& context) {
  const long long x = parse_integer(v, context);
  if (x < 0) throw ConfigError(context + ": must be non-negative");
  return static_cast<std::size_t>(x);
}

}  // namespace

void ModelConfig::validate() const {
  auto fail = [](const std::string& m) { throw ConfigError("model config: " + m); };
  if (n_layers < 1) fail("n_layers must be >= 1");
  if (n_heads == 0 || n_heads % kHeadGroups != 0) {
    fail("n_heads (" + std::to_string(n_heads) + ") must be a positive multiple of 4");
  }
  if (d_model == 0 || d_model % n_heads != 0) {
    fail("d_model (" + std::to_string(d_model) + ") must be divisible by n_heads");
  }
  if (d_ff == 0) fail("d_ff must be >= 1");
  if (vocab_size < 1) fail("vocab_size must be >= 1");
  if (max_context < 4) fail("max_context must be >= 4");
  if (!precision.empty() && precision != nn::kPrecisionName) {
    fail("precision '" + precision + "' does not match this build (" +
         nn::kPrecisionName + ")");
  }
}

std::string ModelConfig::to_text() const {
  std::string out;
  auto line = [&](const char* key, const std::string& value) {
    out += key;
    out += '=';
    out += value;
    out += '\n';
  };
  line("n_layers", std::to_string(n_layers));
  line("n_heads", std::to_string(n_heads));
  line("d_model", std::to_string(d_model));
  line("d_ff", std::to_string(d_ff));
  line("vocab_size", std::to_string(vocab_size));
  line("max_context", std::to_string(max_context));
  line("kernel_sizes", "1,3,5,7");
  line("use_conv", use_conv ? "true" : "false");
  line("position_encoding",
       position_encoding == PositionEncoding::kGroupedAlibi ? "grouped_alibi" : "learned");
  line("alibi_slopes", slope_layout == SlopeLayout::kRepeated ? "repeated" : "distinct");
  line("precision", precision.empty() ? nn::kPrecisionName : precision);
  line("seed", std::to_string(seed));
  return out;
}

bool ModelConfig::set(std::string_view key, std::string_view value,
                      const std::string& context) {
  if (key == "n_layers") n_layers = as_size(value, context);
  else if (key == "n_heads") n_heads = as_size(value, context);
  else if (key == "d_model") d_model = as_size(value, context);
  else if (key == "d_ff") d_ff = as_size(value, context);
  else if (key == "vocab_size") vocab_size = as_size(value, context);
  else if (key == "max_context") max_context = as_size(value, context);
  else if (key == "kernel_sizes") {
    if (value != "1,3,5,7") throw ConfigError(context + ": kernel sizes are fixed at 1,3,5,7");
  } else if (key == "use_conv") use_conv = parse_bool(value, context);
  else if (key == "position_encoding") {
    if (value == "grouped_alibi") position_encoding = PositionEncoding::kGroupedAlibi;
    else if (value == "learned") position_encoding = PositionEncoding::kLearned;
    else throw ConfigError(context + ": unknown position_encoding '" + std::string(value) + "'");
  } else if (key == "alibi_slopes") {
    if (value == "repeated") slope_layout = SlopeLayout::kRepeated;
    else if (value == "distinct") slope_layout = SlopeLayout::kDistinct;
    else throw ConfigError(context + ": unknown alibi_slopes '" + std::string(value) + "'");
  } else if (key == "precision") precision = std::string(value);
  else if (key == "seed") seed = static_cast<std::uint64_t>(as_size(value, context));
  else return false;
  return true;
}

ModelConfig ModelConfig::from_text(std::string_view text, const std::string& source) {
  ModelConfig cfg;
  for (const auto& [key, value] : parse_key_values(text, source)) {
    if (!cfg.set(key, value, source + ": " + key)) {
      throw ConfigError(source + ": unknown model config key '" + key + "'");
    }
  }
  if (cfg.precision.empty()) cfg.precision = nn::kPrecisionName;
  cfg.validate();
  return cfg;
}

}  // namespace protfit::model
