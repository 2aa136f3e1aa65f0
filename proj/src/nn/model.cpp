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

#include "cfd/nn/model.hpp"

#include <sstream>

namespace cfd {

void ModelSpec::finalize() {
  require(input.c >= 1 && input.h >= 1 && input.w >= 1,
          ErrorCode::ShapeMismatch, "input shape must be positive");
  require(!layers.empty(), ErrorCode::ShapeMismatch, "model has no layers");

  out_shapes.clear();
  trainable_idx.clear();
  Shape3 cur = input;
  for (size_t li = 0; li < layers.size(); ++li) {
    const LayerSpec& l = layers[li];
    switch (l.kind) {
      case LayerKind::Conv2d:
        require(l.filters >= 1 && l.kernel >= 1 && l.kernel % 2 == 1,
                ErrorCode::ShapeMismatch,
                "conv layer needs filters and an odd kernel");
        require(cur.h >= 1 && cur.w >= 1, ErrorCode::ShapeMismatch,
                "conv layer on empty spatial input");
        cur = {l.filters, cur.h, cur.w};
        break;
      case LayerKind::MaxPool2d:
        require(l.pool >= 1, ErrorCode::ShapeMismatch, "pool size missing");
        require(cur.h >= l.pool && cur.w >= l.pool, ErrorCode::ShapeMismatch,
                "pool window larger than input");
        cur = {cur.c, cur.h / l.pool, cur.w / l.pool};
        break;
      case LayerKind::Flatten:
        cur = {cur.volume(), 1, 1};
        break;
      case LayerKind::Dense:
        require(l.units >= 1, ErrorCode::ShapeMismatch, "dense units missing");
        require(cur.h == 1 && cur.w == 1, ErrorCode::ShapeMismatch,
                "dense layer needs a flat input (insert flatten)");
        cur = {l.units, 1, 1};
        break;
    }
    out_shapes.push_back(cur);
    if (l.trainable()) trainable_idx.push_back(static_cast<int>(li));
  }
  require(layers.back().kind == LayerKind::Dense, ErrorCode::ShapeMismatch,
          "model must end with a dense classifier");
}

size_t ModelSpec::weight_count(size_t layer) const {
  const LayerSpec& l = layers[layer];
  const Shape3& in = in_shape(layer);
  if (l.kind == LayerKind::Conv2d)
    return static_cast<size_t>(l.filters) * in.c * l.kernel * l.kernel;
  if (l.kind == LayerKind::Dense)
    return static_cast<size_t>(in.volume()) * l.units;
  return 0;
}

size_t ModelSpec::bias_count(size_t layer) const {
  const LayerSpec& l = layers[layer];
  if (l.kind == LayerKind::Conv2d) return static_cast<size_t>(l.filters);
  if (l.kind == LayerKind::Dense) return static_cast<size_t>(l.units);
  return 0;
}

size_t ModelSpec::param_count() const {
  size_t n = 0;
  for (size_t li = 0; li < layers.size(); ++li)
    n += weight_count(li) + bias_count(li);
  return n;
}

int ModelSpec::trainable_width(size_t ordinal) const {
  const LayerSpec& l = layers[static_cast<size_t>(trainable_idx[ordinal])];
  return l.kind == LayerKind::Conv2d ? l.filters : l.units;
}

std::string ModelSpec::arch_string() const {
  std::ostringstream out;
  for (size_t li = 0; li < layers.size(); ++li) {
    if (li) out << ',';
    const LayerSpec& l = layers[li];
    switch (l.kind) {
      case LayerKind::Conv2d: out << "conv" << l.filters << 'k' << l.kernel; break;
      case LayerKind::MaxPool2d: out << "pool" << l.pool; break;
      case LayerKind::Flatten: out << "flatten"; break;
      case LayerKind::Dense: out << "dense" << l.units; break;
    }
  }
  return out.str();
}

ModelSpec parse_arch(const std::string& arch, Shape3 input) {
  ModelSpec spec;
  spec.input = input;

  std::stringstream ss(arch);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    LayerSpec l;
    try {
      if (tok.rfind("conv", 0) == 0) {
        const size_t k = tok.find('k');
        require(k != std::string::npos, ErrorCode::ParseError,
                "conv token needs a kernel, e.g. conv32k5");
        l.kind = LayerKind::Conv2d;
        l.filters = std::stoi(tok.substr(4, k - 4));
        l.kernel = std::stoi(tok.substr(k + 1));
        l.activation = Activation::Relu;
      } else if (tok.rfind("pool", 0) == 0) {
        l.kind = LayerKind::MaxPool2d;
        l.pool = std::stoi(tok.substr(4));
      } else if (tok == "flatten") {
        l.kind = LayerKind::Flatten;
      } else if (tok.rfind("dense", 0) == 0) {
        l.kind = LayerKind::Dense;
        l.units = std::stoi(tok.substr(5));
        l.activation = Activation::Relu;
      } else {
        fail(ErrorCode::ParseError, "unknown layer token '" + tok + "'");
      }
    } catch (const std::invalid_argument&) {
      fail(ErrorCode::ParseError, "bad layer token '" + tok + "'");
    } catch (const std::out_of_range&) {
      fail(ErrorCode::ParseError, "bad layer token '" + tok + "'");
    }
    spec.layers.push_back(l);
  }
  require(!spec.layers.empty(), ErrorCode::ParseError, "empty architecture");
  // The classifier head stays linear; loss applies softmax itself.
  spec.layers.back().activation = Activation::None;
  spec.finalize();
  return spec;
}

ModelSpec emnist62_spec() {
  return parse_arch("conv32k5,pool2,conv64k5,pool2,flatten,dense2048,dense62",
                    {1, 28, 28});
}

}  // namespace cfd
