/*
 * Copyright 2026 The cfdsim Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef CFD_NN_OPS_HPP
#define CFD_NN_OPS_HPP

#include <algorithm>
#include <cmath>
#include <vector>

#include "cfd/nn/weights.hpp"

namespace cfd {

template <typename T>
struct Batch {
  int n = 0;
  Shape3 shape;
  std::vector<T> x;    // n * shape.volume(), values in [0, 1]
  std::vector<int> y;  // n labels
};

template <typename T>
struct ForwardCache {
  // Post-activation output of every layer, n * out_volume each.
  std::vector<std::vector<T>> acts;
  // Argmax input offsets for every pool layer (empty elsewhere).
  std::vector<std::vector<int>> pool_arg;
};

namespace detail {

template <typename T>
void conv2d_forward(const LayerSpec& l, const Shape3& in_shape,
                    const LayerParams<T>& p, int n, const std::vector<T>& in,
                    std::vector<T>& out) {
  const int ci = in_shape.c, h = in_shape.h, w = in_shape.w;
  const int f = l.filters, k = l.kernel, pad = (l.kernel - 1) / 2;
  const int in_vol = in_shape.volume(), out_vol = f * h * w;
  const bool relu = l.activation == Activation::Relu;
#pragma omp parallel for schedule(static)
  for (int item = 0; item < n; ++item) {
    const T* xi = in.data() + static_cast<size_t>(item) * in_vol;
    T* yo = out.data() + static_cast<size_t>(item) * out_vol;
    for (int oc = 0; oc < f; ++oc) {
      for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
          T acc = p.b[static_cast<size_t>(oc)];
          for (int ic = 0; ic < ci; ++ic) {
            const T* plane = xi + static_cast<size_t>(ic) * h * w;
            const T* kern =
                p.w.data() + (static_cast<size_t>(oc) * ci + ic) * k * k;
            for (int ky = 0; ky < k; ++ky) {
              const int iy = y + ky - pad;
              if (iy < 0 || iy >= h) continue;
              for (int kx = 0; kx < k; ++kx) {
                const int ix = x + kx - pad;
                if (ix < 0 || ix >= w) continue;
                acc += kern[ky * k + kx] * plane[iy * w + ix];
              }
            }
          }
          yo[(oc * h + y) * w + x] = relu ? std::max(acc, T(0)) : acc;
        }
      }
    }
  }
}

template <typename T>
void maxpool_forward(const LayerSpec& l, const Shape3& in_shape, int n,
                     const std::vector<T>& in, std::vector<T>& out,
                     std::vector<int>& argmax) {
  const int c = in_shape.c, h = in_shape.h, w = in_shape.w, ps = l.pool;
  const int oh = h / ps, ow = w / ps;
  const int in_vol = in_shape.volume(), out_vol = c * oh * ow;
#pragma omp parallel for schedule(static)
  for (int item = 0; item < n; ++item) {
    const T* xi = in.data() + static_cast<size_t>(item) * in_vol;
    T* yo = out.data() + static_cast<size_t>(item) * out_vol;
    int* arg = argmax.data() + static_cast<size_t>(item) * out_vol;
    for (int ch = 0; ch < c; ++ch) {
      for (int y = 0; y < oh; ++y) {
        for (int x = 0; x < ow; ++x) {
          int best_off = (ch * h + y * ps) * w + x * ps;
          T best = xi[best_off];
          for (int dy = 0; dy < ps; ++dy) {
            for (int dx = 0; dx < ps; ++dx) {
              const int off = (ch * h + y * ps + dy) * w + (x * ps + dx);
              if (xi[off] > best) {
                best = xi[off];
                best_off = off;
              }
            }
          }
          yo[(ch * oh + y) * ow + x] = best;
          arg[(ch * oh + y) * ow + x] = best_off;
        }
      }
    }
  }
}

template <typename T>
void dense_forward(const LayerSpec& l, const Shape3& in_shape,
                   const LayerParams<T>& p, int n, const std::vector<T>& in,
                   std::vector<T>& out) {
  const int d = in_shape.volume(), u = l.units;
  const bool relu = l.activation == Activation::Relu;
#pragma omp parallel for schedule(static)
  for (int item = 0; item < n; ++item) {
    const T* xi = in.data() + static_cast<size_t>(item) * d;
    T* yo = out.data() + static_cast<size_t>(item) * u;
    for (int j = 0; j < u; ++j) yo[j] = p.b[static_cast<size_t>(j)];
    for (int i = 0; i < d; ++i) {
      const T xv = xi[i];
      if (xv == T(0)) continue;
      const T* row = p.w.data() + static_cast<size_t>(i) * u;
      for (int j = 0; j < u; ++j) yo[j] += xv * row[j];
    }
    if (relu)
      for (int j = 0; j < u; ++j) yo[j] = std::max(yo[j], T(0));
  }
}

}  // namespace detail

// Runs the network over a batch. Returns the logits (n * classes) and
// fills the cache needed by the backward pass.
template <typename T>
std::vector<T> forward(const ModelSpec& spec, const ModelWeights<T>& weights,
                       const Batch<T>& batch, ForwardCache<T>& cache) {
  require(batch.shape == spec.input, ErrorCode::ShapeMismatch,
          "batch shape does not match the model input");
  require(batch.x.size() ==
              static_cast<size_t>(batch.n) * spec.input.volume(),
          ErrorCode::ShapeMismatch, "batch payload size mismatch");

  const size_t L = spec.layers.size();
  cache.acts.assign(L, {});
  cache.pool_arg.assign(L, {});

  const std::vector<T>* cur = &batch.x;
  size_t ord = 0;
  for (size_t li = 0; li < L; ++li) {
    const LayerSpec& l = spec.layers[li];
    const Shape3& in_shape = spec.in_shape(li);
    const Shape3& out_shape = spec.out_shapes[li];
    std::vector<T>& out = cache.acts[li];
    out.assign(static_cast<size_t>(batch.n) * out_shape.volume(), T(0));
    switch (l.kind) {
      case LayerKind::Conv2d:
        detail::conv2d_forward(l, in_shape, weights.layers[ord++], batch.n,
                               *cur, out);
        break;
      case LayerKind::MaxPool2d:
        cache.pool_arg[li].assign(out.size(), 0);
        detail::maxpool_forward(l, in_shape, batch.n, *cur, out,
                                cache.pool_arg[li]);
        break;
      case LayerKind::Flatten:
        out = *cur;  // channel-major storage is already flat
        break;
      case LayerKind::Dense:
        detail::dense_forward(l, in_shape, weights.layers[ord++], batch.n,
                              *cur, out);
        break;
    }
    cur = &out;
  }
  return cache.acts.back();
}

template <typename T>
std::vector<T> forward(const ModelSpec& spec, const ModelWeights<T>& weights,
                       const Batch<T>& batch) {
  ForwardCache<T> cache;
  return forward(spec, weights, batch, cache);
}

// Mean softmax cross-entropy over the batch; optionally emits
// d(loss)/d(logits), already divided by the batch size.
template <typename T>
double softmax_cross_entropy(const std::vector<T>& logits,
                             const std::vector<int>& labels, int classes,
                             std::vector<T>* grad_logits = nullptr) {
  const int n = static_cast<int>(labels.size());
  require(logits.size() == static_cast<size_t>(n) * classes,
          ErrorCode::ShapeMismatch, "logits size mismatch");
  if (grad_logits) grad_logits->assign(logits.size(), T(0));
  double loss = 0;
  for (int item = 0; item < n; ++item) {
    const T* z = logits.data() + static_cast<size_t>(item) * classes;
    require(labels[static_cast<size_t>(item)] >= 0 &&
                labels[static_cast<size_t>(item)] < classes,
            ErrorCode::ShapeMismatch, "label out of range");
    T zmax = z[0];
    for (int j = 1; j < classes; ++j) zmax = std::max(zmax, z[j]);
    double sum = 0;
    for (int j = 0; j < classes; ++j)
      sum += std::exp(static_cast<double>(z[j] - zmax));
    const double log_sum = std::log(sum) + static_cast<double>(zmax);
    loss += log_sum - static_cast<double>(z[labels[static_cast<size_t>(item)]]);
    if (grad_logits) {
      T* g = grad_logits->data() + static_cast<size_t>(item) * classes;
      for (int j = 0; j < classes; ++j) {
        const double p =
            std::exp(static_cast<double>(z[j] - zmax)) / sum;
        g[j] = static_cast<T>(p / n);
      }
      g[labels[static_cast<size_t>(item)]] -= static_cast<T>(1.0 / n);
    }
  }
  return loss / n;
}

namespace detail {

template <typename T>
void apply_relu_backward(const std::vector<T>& act, std::vector<T>& grad) {
  for (size_t j = 0; j < grad.size(); ++j)
    if (act[j] <= T(0)) grad[j] = T(0);
}

template <typename T>
void dense_backward(const LayerSpec& l, const Shape3& in_shape,
                    const LayerParams<T>& p, int n, const std::vector<T>& in,
                    std::vector<T>& grad_out, LayerParams<T>& grad_p,
                    std::vector<T>& grad_in) {
  const int d = in_shape.volume(), u = l.units;
#pragma omp parallel for schedule(static)
  for (int i = 0; i < d; ++i) {
    T* grow = grad_p.w.data() + static_cast<size_t>(i) * u;
    for (int item = 0; item < n; ++item) {
      const T xv = in[static_cast<size_t>(item) * d + i];
      if (xv == T(0)) continue;
      const T* g = grad_out.data() + static_cast<size_t>(item) * u;
      for (int j = 0; j < u; ++j) grow[j] += xv * g[j];
    }
  }
  for (int item = 0; item < n; ++item) {
    const T* g = grad_out.data() + static_cast<size_t>(item) * u;
    for (int j = 0; j < u; ++j) grad_p.b[static_cast<size_t>(j)] += g[j];
  }
#pragma omp parallel for schedule(static)
  for (int item = 0; item < n; ++item) {
    const T* g = grad_out.data() + static_cast<size_t>(item) * u;
    T* gi = grad_in.data() + static_cast<size_t>(item) * d;
    for (int i = 0; i < d; ++i) {
      const T* row = p.w.data() + static_cast<size_t>(i) * u;
      T acc = 0;
      for (int j = 0; j < u; ++j) acc += row[j] * g[j];
      gi[i] = acc;
    }
  }
}

template <typename T>
void conv2d_backward(const LayerSpec& l, const Shape3& in_shape,
                     const LayerParams<T>& p, int n, const std::vector<T>& in,
                     std::vector<T>& grad_out, LayerParams<T>& grad_p,
                     std::vector<T>& grad_in) {
  const int ci = in_shape.c, h = in_shape.h, w = in_shape.w;
  const int f = l.filters, k = l.kernel, pad = (l.kernel - 1) / 2;
  const int in_vol = in_shape.volume(), out_vol = f * h * w;

  // Weight and bias gradients, parallel over output channels so each
  // accumulator has a single writer and a fixed summation order.
#pragma omp parallel for schedule(static)
  for (int oc = 0; oc < f; ++oc) {
    T bacc = 0;
    for (int item = 0; item < n; ++item) {
      const T* g = grad_out.data() + static_cast<size_t>(item) * out_vol +
                   static_cast<size_t>(oc) * h * w;
      const T* xi = in.data() + static_cast<size_t>(item) * in_vol;
      for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
          const T gv = g[y * w + x];
          if (gv == T(0)) continue;
          bacc += gv;
          for (int ic = 0; ic < ci; ++ic) {
            const T* plane = xi + static_cast<size_t>(ic) * h * w;
            T* kern = grad_p.w.data() +
                      (static_cast<size_t>(oc) * ci + ic) * k * k;
            for (int ky = 0; ky < k; ++ky) {
              const int iy = y + ky - pad;
              if (iy < 0 || iy >= h) continue;
              for (int kx = 0; kx < k; ++kx) {
                const int ix = x + kx - pad;
                if (ix < 0 || ix >= w) continue;
                kern[ky * k + kx] += gv * plane[iy * w + ix];
              }
            }
          }
        }
      }
    }
    grad_p.b[static_cast<size_t>(oc)] += bacc;
  }

#pragma omp parallel for schedule(static)
  for (int item = 0; item < n; ++item) {
    const T* g = grad_out.data() + static_cast<size_t>(item) * out_vol;
    T* gi = grad_in.data() + static_cast<size_t>(item) * in_vol;
    for (int ic = 0; ic < ci; ++ic) {
      for (int iy = 0; iy < h; ++iy) {
        for (int ix = 0; ix < w; ++ix) {
          T acc = 0;
          for (int oc = 0; oc < f; ++oc) {
            const T* gpl = g + static_cast<size_t>(oc) * h * w;
            const T* kern =
                p.w.data() + (static_cast<size_t>(oc) * ci + ic) * k * k;
            for (int ky = 0; ky < k; ++ky) {
              const int y = iy - ky + pad;
              if (y < 0 || y >= h) continue;
              for (int kx = 0; kx < k; ++kx) {
                const int x = ix - kx + pad;
                if (x < 0 || x >= w) continue;
                acc += kern[ky * k + kx] * gpl[y * w + x];
              }
            }
          }
          gi[(ic * h + iy) * w + ix] = acc;
        }
      }
    }
  }
}

}  // namespace detail

// Mean loss over the batch plus the full parameter gradient, laid out like
// the weights themselves.
template <typename T>
double loss_and_grad(const ModelSpec& spec, const ModelWeights<T>& weights,
                     const Batch<T>& batch, ModelWeights<T>& grad) {
  ForwardCache<T> cache;
  const std::vector<T> logits = forward(spec, weights, batch, cache);
  std::vector<T> grad_cur;
  const double loss = softmax_cross_entropy(logits, batch.y,
                                            spec.num_classes(), &grad_cur);

  grad = zero_weights<T>(spec);
  size_t ord = weights.layers.size();
  for (size_t li = spec.layers.size(); li-- > 0;) {
    const LayerSpec& l = spec.layers[li];
    const Shape3& in_shape = spec.in_shape(li);
    const std::vector<T>& in =
        li == 0 ? batch.x : cache.acts[li - 1];
    if (l.activation == Activation::Relu)
      detail::apply_relu_backward(cache.acts[li], grad_cur);
    std::vector<T> grad_in(
        static_cast<size_t>(batch.n) * in_shape.volume(), T(0));
    switch (l.kind) {
      case LayerKind::Dense:
        --ord;
        detail::dense_backward(l, in_shape, weights.layers[ord], batch.n, in,
                               grad_cur, grad.layers[ord], grad_in);
        break;
      case LayerKind::Conv2d:
        --ord;
        detail::conv2d_backward(l, in_shape, weights.layers[ord], batch.n, in,
                                grad_cur, grad.layers[ord], grad_in);
        break;
      case LayerKind::Flatten:
        grad_in = grad_cur;
        break;
      case LayerKind::MaxPool2d: {
        const std::vector<int>& arg = cache.pool_arg[li];
        const int out_vol = spec.out_shapes[li].volume();
        const int in_vol = in_shape.volume();
        for (int item = 0; item < batch.n; ++item) {
          const T* g = grad_cur.data() + static_cast<size_t>(item) * out_vol;
          T* gi = grad_in.data() + static_cast<size_t>(item) * in_vol;
          const int* a = arg.data() + static_cast<size_t>(item) * out_vol;
          for (int j = 0; j < out_vol; ++j) gi[a[j]] += g[j];
        }
        break;
      }
    }
    grad_cur = std::move(grad_in);
    if (li == 0) break;
  }
  return loss;
}

}  // namespace cfd

#endif  // CFD_NN_OPS_HPP
