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

#ifndef CFD_NN_WEIGHTS_HPP
#define CFD_NN_WEIGHTS_HPP

#include <cmath>
#include <cstdint>
#include <vector>

#include "cfd/nn/model.hpp"
#include "cfd/rng.hpp"

namespace cfd {

// Parameters of one trainable layer. Conv kernels are laid out
// [out_channel][in_channel][ky][kx], dense matrices [input][output]
// row-major, so a dense column is one output unit.
template <typename T>
struct LayerParams {
  std::vector<T> w;
  std::vector<T> b;

  bool operator==(const LayerParams&) const = default;
};

// One LayerParams per trainable layer, in layer order.
template <typename T>
struct ModelWeights {
  std::vector<LayerParams<T>> layers;

  bool operator==(const ModelWeights&) const = default;
};

template <typename T>
ModelWeights<T> zero_weights(const ModelSpec& spec) {
  ModelWeights<T> weights;
  for (int li : spec.trainable_idx) {
    LayerParams<T> p;
    p.w.assign(spec.weight_count(static_cast<size_t>(li)), T(0));
    p.b.assign(spec.bias_count(static_cast<size_t>(li)), T(0));
    weights.layers.push_back(std::move(p));
  }
  return weights;
}

// Glorot-uniform initialization; biases start at zero.
template <typename T>
ModelWeights<T> glorot_init(const ModelSpec& spec, uint64_t seed) {
  ModelWeights<T> weights = zero_weights<T>(spec);
  Rng rng(derive_seed(seed, "glorot"));
  for (size_t ord = 0; ord < weights.layers.size(); ++ord) {
    const size_t li = static_cast<size_t>(spec.trainable_idx[ord]);
    const LayerSpec& l = spec.layers[li];
    const Shape3& in = spec.in_shape(li);
    double fan_in, fan_out;
    if (l.kind == LayerKind::Conv2d) {
      fan_in = static_cast<double>(in.c) * l.kernel * l.kernel;
      fan_out = static_cast<double>(l.filters) * l.kernel * l.kernel;
    } else {
      fan_in = in.volume();
      fan_out = l.units;
    }
    const double limit = std::sqrt(6.0 / (fan_in + fan_out));
    for (T& v : weights.layers[ord].w)
      v = static_cast<T>(rng.next_double(-limit, limit));
  }
  return weights;
}

template <typename T>
size_t total_size(const ModelWeights<T>& weights) {
  size_t n = 0;
  for (const auto& l : weights.layers) n += l.w.size() + l.b.size();
  return n;
}

// y += a * x over every coordinate.
template <typename T>
void axpy(ModelWeights<T>& y, T a, const ModelWeights<T>& x) {
  for (size_t l = 0; l < y.layers.size(); ++l) {
    for (size_t j = 0; j < y.layers[l].w.size(); ++j)
      y.layers[l].w[j] += a * x.layers[l].w[j];
    for (size_t j = 0; j < y.layers[l].b.size(); ++j)
      y.layers[l].b[j] += a * x.layers[l].b[j];
  }
}

// x - y, elementwise.
template <typename T>
ModelWeights<T> subtract(const ModelWeights<T>& x, const ModelWeights<T>& y) {
  ModelWeights<T> d = x;
  for (size_t l = 0; l < d.layers.size(); ++l) {
    for (size_t j = 0; j < d.layers[l].w.size(); ++j)
      d.layers[l].w[j] -= y.layers[l].w[j];
    for (size_t j = 0; j < d.layers[l].b.size(); ++j)
      d.layers[l].b[j] -= y.layers[l].b[j];
  }
  return d;
}

template <typename T>
double max_abs_difference(const ModelWeights<T>& x, const ModelWeights<T>& y) {
  double m = 0;
  for (size_t l = 0; l < x.layers.size(); ++l) {
    for (size_t j = 0; j < x.layers[l].w.size(); ++j)
      m = std::max(m, std::abs(static_cast<double>(x.layers[l].w[j]) -
                               static_cast<double>(y.layers[l].w[j])));
    for (size_t j = 0; j < x.layers[l].b.size(); ++j)
      m = std::max(m, std::abs(static_cast<double>(x.layers[l].b[j]) -
                               static_cast<double>(y.layers[l].b[j])));
  }
  return m;
}

// Binary blob interchange: text header with the architecture, then raw
// little-endian scalars per trainable layer (weights then biases) in
// declaration order.
template <typename T>
void save_weights(const std::string& path, const ModelSpec& spec,
                  const ModelWeights<T>& weights);

template <typename T>
std::pair<ModelSpec, ModelWeights<T>> load_weights(const std::string& path);

}  // namespace cfd

#endif  // CFD_NN_WEIGHTS_HPP
