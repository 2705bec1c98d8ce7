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

#include "protfit/train/adamw.hpp"

#include <cmath>

#include "protfit/util/error.hpp"
#include "protfit/util/io.hpp"

namespace protfit::train {

double AdamW::step(nn::ParameterSet& params, double lr) {
  if (m_.empty()) {
    for (const auto& p : params) {
      m_.emplace_back(p.value.size(), 0.0);
      v_.emplace_back(p.value.size(), 0.0);
    }
  }
  if (m_.size() != params.count()) throw ConfigError("AdamW: parameter set changed size");

  double sq = 0.0;
  for (const auto& p : params) {
    if (p.grad.size() != p.value.size()) {
      throw ShapeError("AdamW: gradient of '" + p.name + "' has wrong size");
    }
    for (auto g : p.grad.values()) {
      if (!std::isfinite(g)) {
        throw NumericError("non-finite gradient in parameter '" + p.name + "'");
      }
      sq += static_cast<double>(g) * static_cast<double>(g);
    }
  }
  const double norm = std::sqrt(sq);
  const double clip = options_.max_grad_norm > 0 && norm > options_.max_grad_norm
                          ? options_.max_grad_norm / norm
                          : 1.0;

  ++t_;
  const double b1 = options_.beta1, b2 = options_.beta2;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(t_));
  const double shrink = 1.0 - lr * options_.weight_decay;
  for (std::size_t i = 0; i < params.count(); ++i) {
    auto& p = params[i];
    auto& m = m_[i];
    auto& v = v_[i];
    for (std::size_t j = 0; j < p.value.size(); ++j) {
      const double g = clip * static_cast<double>(p.grad[j]);
      m[j] = b1 * m[j] + (1.0 - b1) * g;
      v[j] = b2 * v[j] + (1.0 - b2) * g * g;
      const double update = (m[j] / c1) / (std::sqrt(v[j] / c2) + options_.eps);
      p.value[j] = static_cast<nn::Scalar>(static_cast<double>(p.value[j]) * shrink - lr * update);
    }
  }
  return norm;
}

std::string AdamW::describe() const {
  return "optimizer=adamw\nbeta1=" + format_exact(options_.beta1) +
         "\nbeta2=" + format_exact(options_.beta2) + "\neps=" + format_exact(options_.eps) +
         "\nweight_decay=" + format_exact(options_.weight_decay) +
         "\nmax_grad_norm=" + format_exact(options_.max_grad_norm) +
         "\nsteps_taken=" + std::to_string(t_) + "\n";
}

}  // namespace protfit::train
