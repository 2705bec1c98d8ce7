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

#include "protfit/nn/ops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "protfit/util/error.hpp"

namespace protfit::nn {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw ShapeError(what);
}

constexpr Scalar kNegInf = -std::numeric_limits<Scalar>::infinity();

}  // namespace

Var linear(Graph& g, Var x, Var weight, Var bias) {
  const Tensor& X = g.value(x);
  const Tensor& W = g.value(weight);
  const Tensor& B = g.value(bias);
  require(W.rank() == 2, "linear: weight must be 2-D, got " + shape_string(W.shape()));
  require(X.rank() >= 1 && X.last_dim() == W.dim(0),
          "linear: input " + shape_string(X.shape()) + " vs weight " +
              shape_string(W.shape()));
  require(B.size() == W.dim(1), "linear: bias " + shape_string(B.shape()) +
                                    " vs weight " + shape_string(W.shape()));
  const std::size_t n_rows = X.rows(), din = W.dim(0), dout = W.dim(1);
  Shape out_shape = X.shape();
  out_shape.back() = dout;
  Tensor Y(out_shape);
  for (std::size_t n = 0; n < n_rows; ++n) {
    Scalar* y = Y.data() + n * dout;
    const Scalar* xr = X.data() + n * din;
    std::copy(B.data(), B.data() + dout, y);
    for (std::size_t k = 0; k < din; ++k) {
      const Scalar xv = xr[k];
      const Scalar* wr = W.data() + k * dout;
      for (std::size_t j = 0; j < dout; ++j) y[j] += xv * wr[j];
    }
  }
  return g.record(std::move(Y), {x, weight, bias},
                  [x, weight, bias, n_rows, din, dout](Graph& g, const Tensor& gy) {
    const Tensor& X = g.value(x);
    const Tensor& W = g.value(weight);
    if (Tensor* gx = g.grad_if_needed(x)) {
      for (std::size_t n = 0; n < n_rows; ++n) {
        const Scalar* gyr = gy.data() + n * dout;
        Scalar* gxr = gx->data() + n * din;
        for (std::size_t k = 0; k < din; ++k) {
          const Scalar* wr = W.data() + k * dout;
          Scalar s = 0;
          for (std::size_t j = 0; j < dout; ++j) s += gyr[j] * wr[j];
          gxr[k] += s;
        }
      }
    }
    if (Tensor* gw = g.grad_if_needed(weight)) {
      for (std::size_t n = 0; n < n_rows; ++n) {
        const Scalar* gyr = gy.data() + n * dout;
        const Scalar* xr = X.data() + n * din;
        for (std::size_t k = 0; k < din; ++k) {
          const Scalar xv = xr[k];
          Scalar* gwr = gw->data() + k * dout;
          for (std::size_t j = 0; j < dout; ++j) gwr[j] += xv * gyr[j];
        }
      }
    }
    if (Tensor* gb = g.grad_if_needed(bias)) {
      for (std::size_t n = 0; n < n_rows; ++n) {
        const Scalar* gyr = gy.data() + n * dout;
        for (std::size_t j = 0; j < dout; ++j) (*gb)[j] += gyr[j];
      }
    }
  });
}

Var add(Graph& g, Var a, Var b) {
  const Tensor& A = g.value(a);
  const Tensor& B = g.value(b);
  require(A.shape() == B.shape(), "add: " + shape_string(A.shape()) + " vs " +
                                      shape_string(B.shape()));
  Tensor Y(A.shape());
  for (std::size_t i = 0; i < Y.size(); ++i) Y[i] = A[i] + B[i];
  return g.record(std::move(Y), {a, b}, [a, b](Graph& g, const Tensor& gy) {
    for (Var v : {a, b}) {
      if (Tensor* gv = g.grad_if_needed(v)) {
        for (std::size_t i = 0; i < gy.size(); ++i) (*gv)[i] += gy[i];
      }
    }
  });
}

Var squared_relu(Graph& g, Var x) {
  const Tensor& X = g.value(x);
  Tensor Y(X.shape());
  for (std::size_t i = 0; i < X.size(); ++i) {
    const Scalar r = X[i] > 0 ? X[i] : Scalar(0);
    Y[i] = r * r;
  }
  return g.record(std::move(Y), {x}, [x](Graph& g, const Tensor& gy) {
    const Tensor& X = g.value(x);
    if (Tensor* gx = g.grad_if_needed(x)) {
      for (std::size_t i = 0; i < X.size(); ++i) {
        if (X[i] > 0) (*gx)[i] += Scalar(2) * X[i] * gy[i];
      }
    }
  });
}

Var layer_norm(Graph& g, Var x, Var gain, Var bias, double eps) {
  const Tensor& X = g.value(x);
  const Tensor& G = g.value(gain);
  const Tensor& B = g.value(bias);
  const std::size_t d = X.last_dim(), n_rows = X.rows();
  require(G.size() == d && B.size() == d,
          "layer_norm: gain/bias must have " + std::to_string(d) + " entries");
  Tensor Y(X.shape());
  std::vector<Scalar> xhat(X.size());
  std::vector<Scalar> inv_std(n_rows);
  for (std::size_t n = 0; n < n_rows; ++n) {
    const Scalar* xr = X.data() + n * d;
    Scalar mean = 0;
    for (std::size_t j = 0; j < d; ++j) mean += xr[j];
    mean /= static_cast<Scalar>(d);
    Scalar var = 0;
    for (std::size_t j = 0; j < d; ++j) var += (xr[j] - mean) * (xr[j] - mean);
    var /= static_cast<Scalar>(d);
    const Scalar inv = Scalar(1) / std::sqrt(var + static_cast<Scalar>(eps));
    inv_std[n] = inv;
    for (std::size_t j = 0; j < d; ++j) {
      const Scalar h = (xr[j] - mean) * inv;
      xhat[n * d + j] = h;
      Y[n * d + j] = h * G[j] + B[j];
    }
  }
  return g.record(std::move(Y), {x, gain, bias},
                  [x, gain, bias, d, n_rows, xhat = std::move(xhat),
                   inv_std = std::move(inv_std)](Graph& g, const Tensor& gy) {
    const Tensor& G = g.value(gain);
    if (Tensor* gg = g.grad_if_needed(gain)) {
      for (std::size_t n = 0; n < n_rows; ++n)
        for (std::size_t j = 0; j < d; ++j) (*gg)[j] += gy[n * d + j] * xhat[n * d + j];
    }
    if (Tensor* gb = g.grad_if_needed(bias)) {
      for (std::size_t n = 0; n < n_rows; ++n)
        for (std::size_t j = 0; j < d; ++j) (*gb)[j] += gy[n * d + j];
    }
    if (Tensor* gx = g.grad_if_needed(x)) {
      const Scalar inv_d = Scalar(1) / static_cast<Scalar>(d);
      for (std::size_t n = 0; n < n_rows; ++n) {
        Scalar sum_dh = 0, sum_dh_h = 0;
        for (std::size_t j = 0; j < d; ++j) {
          const Scalar dh = gy[n * d + j] * G[j];
          sum_dh += dh;
          sum_dh_h += dh * xhat[n * d + j];
        }
        for (std::size_t j = 0; j < d; ++j) {
          const Scalar dh = gy[n * d + j] * G[j];
          (*gx)[n * d + j] += inv_std[n] * (dh - inv_d * sum_dh -
                                            xhat[n * d + j] * inv_d * sum_dh_h);
        }
      }
    }
  });
}

Var embedding(Graph& g, Var table, std::span<const int> ids, const Shape& outer) {
  const Tensor& E = g.value(table);
  require(E.rank() == 2, "embedding: table must be 2-D");
  require(shape_size(outer) == ids.size(), "embedding: ids do not match outer shape");
  const std::size_t vocab = E.dim(0), d = E.dim(1);
  Shape out_shape = outer;
  out_shape.push_back(d);
  Tensor Y(out_shape);
  for (std::size_t r = 0; r < ids.size(); ++r) {
    const int id = ids[r];
    if (id < 0 || static_cast<std::size_t>(id) >= vocab) {
      throw ShapeError("embedding: token id " + std::to_string(id) +
                       " outside vocabulary of " + std::to_string(vocab));
    }
    std::copy_n(E.data() + static_cast<std::size_t>(id) * d, d, Y.data() + r * d);
  }
  std::vector<int> saved(ids.begin(), ids.end());
  return g.record(std::move(Y), {table},
                  [table, d, saved = std::move(saved)](Graph& g, const Tensor& gy) {
    if (Tensor* ge = g.grad_if_needed(table)) {
      for (std::size_t r = 0; r < saved.size(); ++r) {
        Scalar* row = ge->data() + static_cast<std::size_t>(saved[r]) * d;
        for (std::size_t j = 0; j < d; ++j) row[j] += gy[r * d + j];
      }
    }
  });
}

Var add_positions(Graph& g, Var x, Var table) {
  const Tensor& X = g.value(x);
  const Tensor& P = g.value(table);
  require(X.rank() == 3 && P.rank() == 2 && P.dim(1) == X.dim(2),
          "add_positions: expected x[B,T,D] and table[P,D]");
  const std::size_t batch = X.dim(0), steps = X.dim(1), d = X.dim(2);
  if (steps > P.dim(0)) {
    throw ShapeError("add_positions: sequence of " + std::to_string(steps) +
                     " tokens exceeds " + std::to_string(P.dim(0)) +
                     " learned positions");
  }
  Tensor Y = X;
  for (std::size_t b = 0; b < batch; ++b)
    for (std::size_t t = 0; t < steps; ++t)
      for (std::size_t j = 0; j < d; ++j) Y[(b * steps + t) * d + j] += P[t * d + j];
  return g.record(std::move(Y), {x, table},
                  [x, table, batch, steps, d](Graph& g, const Tensor& gy) {
    if (Tensor* gx = g.grad_if_needed(x)) {
      for (std::size_t i = 0; i < gy.size(); ++i) (*gx)[i] += gy[i];
    }
    if (Tensor* gp = g.grad_if_needed(table)) {
      for (std::size_t b = 0; b < batch; ++b)
        for (std::size_t t = 0; t < steps; ++t)
          for (std::size_t j = 0; j < d; ++j)
            (*gp)[t * d + j] += gy[(b * steps + t) * d + j];
    }
  });
}

Var causal_depthwise_conv1d(Graph& g, Var x, Var kernel) {
  const Tensor& X = g.value(x);
  const Tensor& K = g.value(kernel);
  require(X.rank() == 3, "conv1d: input must be [B,T,C], got " + shape_string(X.shape()));
  require(K.rank() == 2 && K.dim(0) >= 1 && K.dim(1) == X.dim(2),
          "conv1d: kernel " + shape_string(K.shape()) + " vs input " +
              shape_string(X.shape()));
  const std::size_t batch = X.dim(0), steps = X.dim(1), ch = X.dim(2), k = K.dim(0);
  Tensor Y(X.shape());
  for (std::size_t b = 0; b < batch; ++b) {
    for (std::size_t t = 0; t < steps; ++t) {
      Scalar* y = Y.data() + (b * steps + t) * ch;
      for (std::size_t j = 0; j < k; ++j) {
        if (t + j + 1 < k) continue;  // left padding
        const std::size_t s = t + j + 1 - k;
        const Scalar* xr = X.data() + (b * steps + s) * ch;
        const Scalar* kr = K.data() + j * ch;
        for (std::size_t c = 0; c < ch; ++c) y[c] += kr[c] * xr[c];
      }
    }
  }
  return g.record(std::move(Y), {x, kernel},
                  [x, kernel, batch, steps, ch, k](Graph& g, const Tensor& gy) {
    const Tensor& X = g.value(x);
    const Tensor& K = g.value(kernel);
    Tensor* gx = g.grad_if_needed(x);
    Tensor* gk = g.grad_if_needed(kernel);
    for (std::size_t b = 0; b < batch; ++b) {
      for (std::size_t t = 0; t < steps; ++t) {
        const Scalar* gyr = gy.data() + (b * steps + t) * ch;
        for (std::size_t j = 0; j < k; ++j) {
          if (t + j + 1 < k) continue;
          const std::size_t s = t + j + 1 - k;
          if (gx) {
            Scalar* gxr = gx->data() + (b * steps + s) * ch;
            const Scalar* kr = K.data() + j * ch;
            for (std::size_t c = 0; c < ch; ++c) gxr[c] += kr[c] * gyr[c];
          }
          if (gk) {
            Scalar* gkr = gk->data() + j * ch;
            const Scalar* xr = X.data() + (b * steps + s) * ch;
            for (std::size_t c = 0; c < ch; ++c) gkr[c] += xr[c] * gyr[c];
          }
        }
      }
    }
  });
}

Var slice_last(Graph& g, Var x, std::size_t begin, std::size_t end) {
  const Tensor& X = g.value(x);
  const std::size_t d = X.last_dim(), n_rows = X.rows();
  require(begin < end && end <= d, "slice_last: bad range");
  const std::size_t w = end - begin;
  Shape out_shape = X.shape();
  out_shape.back() = w;
  Tensor Y(out_shape);
  for (std::size_t n = 0; n < n_rows; ++n)
    std::copy_n(X.data() + n * d + begin, w, Y.data() + n * w);
  return g.record(std::move(Y), {x}, [x, begin, w, d, n_rows](Graph& g, const Tensor& gy) {
    if (Tensor* gx = g.grad_if_needed(x)) {
      for (std::size_t n = 0; n < n_rows; ++n)
        for (std::size_t j = 0; j < w; ++j) (*gx)[n * d + begin + j] += gy[n * w + j];
    }
  });
}

Var concat_last(Graph& g, const std::vector<Var>& parts) {
  require(!parts.empty(), "concat_last: no inputs");
  const Shape lead(g.value(parts[0]).shape().begin(),
                   g.value(parts[0]).shape().end() - 1);
  std::vector<std::size_t> widths;
  std::size_t total = 0;
  for (Var p : parts) {
    const Tensor& P = g.value(p);
    require(Shape(P.shape().begin(), P.shape().end() - 1) == lead,
            "concat_last: leading axes disagree");
    widths.push_back(P.last_dim());
    total += P.last_dim();
  }
  Shape out_shape = lead;
  out_shape.push_back(total);
  Tensor Y(out_shape);
  const std::size_t n_rows = Y.rows();
  std::size_t offset = 0;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    const Tensor& P = g.value(parts[i]);
    for (std::size_t n = 0; n < n_rows; ++n)
      std::copy_n(P.data() + n * widths[i], widths[i], Y.data() + n * total + offset);
    offset += widths[i];
  }
  return g.record(std::move(Y), parts,
                  [parts, widths, total, n_rows](Graph& g, const Tensor& gy) {
    std::size_t offset = 0;
    for (std::size_t i = 0; i < parts.size(); ++i) {
      if (Tensor* gp = g.grad_if_needed(parts[i])) {
        for (std::size_t n = 0; n < n_rows; ++n)
          for (std::size_t j = 0; j < widths[i]; ++j)
            (*gp)[n * widths[i] + j] += gy[n * total + offset + j];
      }
      offset += widths[i];
    }
  });
}

Var attention_scores(Graph& g, Var q, Var k, std::size_t n_heads, bool causal) {
  const Tensor& Q = g.value(q);
  const Tensor& K = g.value(k);
  require(Q.rank() == 3 && Q.shape() == K.shape(),
          "attention_scores: q/k must be equal [B,T,D]");
  const std::size_t batch = Q.dim(0), steps = Q.dim(1), d = Q.dim(2);
  require(n_heads > 0 && d % n_heads == 0, "attention_scores: D not divisible by heads");
  const std::size_t dh = d / n_heads;
  const Scalar scale = Scalar(1) / std::sqrt(static_cast<Scalar>(dh));
  Tensor S({batch, n_heads, steps, steps});
  for (std::size_t b = 0; b < batch; ++b)
    for (std::size_t h = 0; h < n_heads; ++h)
      for (std::size_t i = 0; i < steps; ++i) {
        const Scalar* qr = Q.data() + (b * steps + i) * d + h * dh;
        Scalar* sr = S.data() + ((b * n_heads + h) * steps + i) * steps;
        const std::size_t jmax = causal ? i + 1 : steps;
        for (std::size_t j = 0; j < jmax; ++j) {
          const Scalar* kr = K.data() + (b * steps + j) * d + h * dh;
          Scalar s = 0;
          for (std::size_t c = 0; c < dh; ++c) s += qr[c] * kr[c];
          sr[j] = s * scale;
        }
      }
  return g.record(std::move(S), {q, k},
                  [q, k, batch, steps, d, n_heads, dh, scale, causal](Graph& g,
                                                                    const Tensor& gs) {
    const Tensor& Q = g.value(q);
    const Tensor& K = g.value(k);
    Tensor* gq = g.grad_if_needed(q);
    Tensor* gk = g.grad_if_needed(k);
    for (std::size_t b = 0; b < batch; ++b)
      for (std::size_t h = 0; h < n_heads; ++h)
        for (std::size_t i = 0; i < steps; ++i) {
          const Scalar* gsr = gs.data() + ((b * n_heads + h) * steps + i) * steps;
          const std::size_t qoff = (b * steps + i) * d + h * dh;
          const std::size_t jmax = causal ? i + 1 : steps;
          for (std::size_t j = 0; j < jmax; ++j) {
            const Scalar gv = gsr[j] * scale;
            if (gv == Scalar(0)) continue;
            const std::size_t koff = (b * steps + j) * d + h * dh;
            if (gq) {
              for (std::size_t c = 0; c < dh; ++c) (*gq)[qoff + c] += gv * K[koff + c];
            }
            if (gk) {
              for (std::size_t c = 0; c < dh; ++c) (*gk)[koff + c] += gv * Q[qoff + c];
            }
          }
        }
  });
}

Var attention_mix(Graph& g, Var probs, Var v, bool causal) {
  const Tensor& P = g.value(probs);
  const Tensor& V = g.value(v);
  require(V.rank() == 3 && P.rank() == 4 && P.dim(0) == V.dim(0) &&
              P.dim(2) == V.dim(1) && P.dim(3) == V.dim(1),
          "attention_mix: probs " + shape_string(P.shape()) + " vs values " +
              shape_string(V.shape()));
  const std::size_t batch = V.dim(0), steps = V.dim(1), d = V.dim(2), n_heads = P.dim(1);
  require(d % n_heads == 0, "attention_mix: D not divisible by heads");
  const std::size_t dh = d / n_heads;
  Tensor Y(V.shape());
  for (std::size_t b = 0; b < batch; ++b)
    for (std::size_t h = 0; h < n_heads; ++h)
      for (std::size_t i = 0; i < steps; ++i) {
        const Scalar* pr = P.data() + ((b * n_heads + h) * steps + i) * steps;
        Scalar* y = Y.data() + (b * steps + i) * d + h * dh;
        const std::size_t jmax = causal ? i + 1 : steps;
        for (std::size_t j = 0; j < jmax; ++j) {
          const Scalar p = pr[j];
          const Scalar* vr = V.data() + (b * steps + j) * d + h * dh;
          for (std::size_t c = 0; c < dh; ++c) y[c] += p * vr[c];
        }
      }
  return g.record(std::move(Y), {probs, v},
                  [probs, v, batch, steps, d, n_heads, dh, causal](Graph& g,
                                                                 const Tensor& gy) {
    const Tensor& P = g.value(probs);
    const Tensor& V = g.value(v);
    Tensor* gp = g.grad_if_needed(probs);
    Tensor* gv = g.grad_if_needed(v);
    for (std::size_t b = 0; b < batch; ++b)
      for (std::size_t h = 0; h < n_heads; ++h)
        for (std::size_t i = 0; i < steps; ++i) {
          const std::size_t prow = ((b * n_heads + h) * steps + i) * steps;
          const Scalar* gyr = gy.data() + (b * steps + i) * d + h * dh;
          const std::size_t jmax = causal ? i + 1 : steps;
          for (std::size_t j = 0; j < jmax; ++j) {
            const std::size_t voff = (b * steps + j) * d + h * dh;
            if (gp) {
              Scalar s = 0;
              for (std::size_t c = 0; c < dh; ++c) s += gyr[c] * V[voff + c];
              (*gp)[prow + j] += s;
            }
            if (gv) {
              const Scalar p = P[prow + j];
              for (std::size_t c = 0; c < dh; ++c) (*gv)[voff + c] += p * gyr[c];
            }
          }
        }
  });
}

Var softmax_lastaxis(Graph& g, Var x, const Tensor* mask) {
  const Tensor& X = g.value(x);
  const std::size_t cols = X.last_dim(), n_rows = X.rows();
  std::size_t mask_size = 0;
  if (mask) {
    const Shape& ms = mask->shape();
    const Shape& xs = X.shape();
    require(ms.size() <= xs.size() &&
                std::equal(ms.begin(), ms.end(), xs.end() - static_cast<std::ptrdiff_t>(ms.size())),
            "softmax: mask " + shape_string(ms) + " not broadcastable to " +
                shape_string(xs));
    mask_size = mask->size();
  }
  Tensor Y(X.shape());
  std::vector<Scalar> row(cols);
  for (std::size_t n = 0; n < n_rows; ++n) {
    const Scalar* xr = X.data() + n * cols;
    const Scalar* mr = mask ? mask->data() + (n * cols) % mask_size : nullptr;
    Scalar m = kNegInf;
    for (std::size_t j = 0; j < cols; ++j) {
      row[j] = mr ? xr[j] + mr[j] : xr[j];
      m = std::max(m, row[j]);
    }
    if (m == kNegInf) {
      throw NumericError("softmax: row " + std::to_string(n) + " is fully masked");
    }
    Scalar total = 0;
    Scalar* y = Y.data() + n * cols;
    for (std::size_t j = 0; j < cols; ++j) {
      y[j] = std::exp(row[j] - m);
      total += y[j];
    }
    const Scalar inv = Scalar(1) / total;
    for (std::size_t j = 0; j < cols; ++j) y[j] *= inv;
  }
  // The backward pass reads this node's own output; its id is the next slot.
  const Var self{g.size()};
  return g.record(std::move(Y), {x}, [x, self, cols, n_rows](Graph& g, const Tensor& gy) {
    const Tensor& Y = g.value(self);
    Tensor* gx = g.grad_if_needed(x);
    if (!gx) return;
    for (std::size_t n = 0; n < n_rows; ++n) {
      const Scalar* y = Y.data() + n * cols;
      const Scalar* gyr = gy.data() + n * cols;
      Scalar dot = 0;
      for (std::size_t j = 0; j < cols; ++j) dot += y[j] * gyr[j];
      Scalar* gxr = gx->data() + n * cols;
      for (std::size_t j = 0; j < cols; ++j) gxr[j] += y[j] * (gyr[j] - dot);
    }
  });
}

Var cross_entropy(Graph& g, Var logits, std::span<const int> targets, int ignore_id) {
  const Tensor& L = g.value(logits);
  const std::size_t vocab = L.last_dim(), n_rows = L.rows();
  require(targets.size() == n_rows, "cross_entropy: " + std::to_string(targets.size()) +
                                        " targets for " + std::to_string(n_rows) + " rows");
  std::size_t count = 0;
  Scalar total = 0;
  for (std::size_t n = 0; n < n_rows; ++n) {
    const int t = targets[n];
    if (t == ignore_id) continue;
    if (t < 0 || static_cast<std::size_t>(t) >= vocab) {
      throw ShapeError("cross_entropy: target " + std::to_string(t) + " out of range");
    }
    const Scalar* lr = L.data() + n * vocab;
    const Scalar m = *std::max_element(lr, lr + vocab);
    Scalar s = 0;
    for (std::size_t j = 0; j < vocab; ++j) s += std::exp(lr[j] - m);
    total += m + std::log(s) - lr[t];
    ++count;
  }
  if (count == 0) throw ValidationError("cross_entropy: every target is ignored");
  Tensor out(Shape{}, total / static_cast<Scalar>(count));
  std::vector<int> saved(targets.begin(), targets.end());
  return g.record(std::move(out), {logits},
                  [logits, vocab, n_rows, count, ignore_id,
                   saved = std::move(saved)](Graph& g, const Tensor& gy) {
    Tensor* gl = g.grad_if_needed(logits);
    if (!gl) return;
    const Tensor& L = g.value(logits);
    const Scalar scale = gy[0] / static_cast<Scalar>(count);
    for (std::size_t n = 0; n < n_rows; ++n) {
      const int t = saved[n];
      if (t == ignore_id) continue;
      const Scalar* lr = L.data() + n * vocab;
      const Scalar m = *std::max_element(lr, lr + vocab);
      Scalar s = 0;
      for (std::size_t j = 0; j < vocab; ++j) s += std::exp(lr[j] - m);
      Scalar* glr = gl->data() + n * vocab;
      for (std::size_t j = 0; j < vocab; ++j) glr[j] += scale * std::exp(lr[j] - m) / s;
      glr[t] -= scale;
    }
  });
}

Var weighted_sum(Graph& g, Var x, const Tensor& weights) {
  const Tensor& X = g.value(x);
  require(X.size() == weights.size(), "weighted_sum: size mismatch");
  Scalar s = 0;
  for (std::size_t i = 0; i < X.size(); ++i) s += X[i] * weights[i];
  return g.record(Tensor(Shape{}, s), {x}, [x, weights](Graph& g, const Tensor& gy) {
    if (Tensor* gx = g.grad_if_needed(x)) {
      for (std::size_t i = 0; i < weights.size(); ++i) (*gx)[i] += gy[0] * weights[i];
    }
  });
}

Var sum(Graph& g, Var x) {
  const Tensor& X = g.value(x);
  Scalar s = 0;
  for (std::size_t i = 0; i < X.size(); ++i) s += X[i];
  return g.record(Tensor(Shape{}, s), {x}, [x](Graph& g, const Tensor& gy) {
    if (Tensor* gx = g.grad_if_needed(x)) {
      for (std::size_t i = 0; i < gx->size(); ++i) (*gx)[i] += gy[0];
    }
  });
}

Tensor log_softmax(const Tensor& logits) {
  const std::size_t cols = logits.last_dim(), n_rows = logits.rows();
  Tensor out(logits.shape());
  for (std::size_t n = 0; n < n_rows; ++n) {
    const Scalar* lr = logits.data() + n * cols;
    const Scalar m = *std::max_element(lr, lr + cols);
    Scalar s = 0;
    for (std::size_t j = 0; j < cols; ++j) s += std::exp(lr[j] - m);
    const Scalar lse = m + std::log(s);
    for (std::size_t j = 0; j < cols; ++j) out[n * cols + j] = lr[j] - lse;
  }
  return out;
}

}  // namespace protfit::nn
