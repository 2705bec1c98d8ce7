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

#include "protfit/nn/grad_check.hpp"

#include <algorithm>
#include <cmath>

namespace protfit::nn {

namespace {

double evaluate(const std::function<Var(Graph&)>& loss) {
  Graph g(false);
  return static_cast<double>(g.value(loss(g))[0]);
}

}  // namespace

GradCheckResult grad_check(const std::function<Var(Graph&)>& loss,
                           std::span<Parameter* const> params,
                           const GradCheckOptions& options) {
  for (Parameter* p : params) p->grad = Tensor(p->value.shape());
  {
    Graph g(true);
    g.backward(loss(g));
  }
  GradCheckResult result;
  for (std::size_t pi = 0; pi < params.size(); ++pi) {
    Parameter& p = *params[pi];
    for (std::size_t i = 0; i < p.value.size(); ++i) {
      const Scalar original = p.value[i];
      p.value[i] = original + static_cast<Scalar>(options.eps);
      const double plus = evaluate(loss);
      p.value[i] = original - static_cast<Scalar>(options.eps);
      const double minus = evaluate(loss);
      p.value[i] = original;
      const double numeric = (plus - minus) / (2.0 * options.eps);
      const double analytic = static_cast<double>(p.grad[i]);
      const double denom =
          std::max({std::abs(analytic), std::abs(numeric), options.floor});
      const double rel = std::abs(analytic - numeric) / denom;
      ++result.checked;
      if (rel > result.max_rel_error || std::isnan(rel)) {
        result.max_rel_error = rel;
        result.worst_input = pi;
        result.worst_index = i;
        result.analytic = analytic;
        result.numeric = numeric;
      }
    }
  }
  return result;
}

GradCheckResult grad_check(
    const std::function<Var(Graph&, const std::vector<Var>&)>& f,
    std::vector<Tensor> inputs, const GradCheckOptions& options) {
  std::vector<Parameter> storage;
  storage.reserve(inputs.size());
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    storage.push_back({"input" + std::to_string(i), std::move(inputs[i]), {}});
  }
  std::vector<Parameter*> ptrs;
  for (auto& p : storage) ptrs.push_back(&p);
  auto loss = [&](Graph& g) {
    std::vector<Var> vars;
    for (auto& p : storage) vars.push_back(g.parameter(p));
    return f(g, vars);
  };
  return grad_check(loss, ptrs, options);
}

}  // namespace protfit::nn
