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

#ifndef CFD_NN_MODEL_HPP
#define CFD_NN_MODEL_HPP

#include <cstddef>
#include <string>
#include <vector>

#include "cfd/error.hpp"

namespace cfd {

enum class LayerKind { Conv2d, MaxPool2d, Flatten, Dense };
enum class Activation { None, Relu };

struct LayerSpec {
  LayerKind kind = LayerKind::Dense;
  int units = 0;    // Dense output width
  int filters = 0;  // Conv2d output channels
  int kernel = 0;   // Conv2d square kernel, stride 1, same padding
  int pool = 0;     // MaxPool2d square window, stride = window, valid padding
  Activation activation = Activation::None;

  bool trainable() const {
    return kind == LayerKind::Conv2d || kind == LayerKind::Dense;
  }
};

struct Shape3 {
  int c = 0, h = 0, w = 0;
  int volume() const { return c * h * w; }
  bool operator==(const Shape3&) const = default;
};

// Layer chain with shapes resolved once at finalize(). Dense layers expect a
// flat (d, 1, 1) input; Flatten collapses (c, h, w) channel-major.
struct ModelSpec {
  Shape3 input;
  std::vector<LayerSpec> layers;

  std::vector<Shape3> out_shapes;   // filled by finalize()
  std::vector<int> trainable_idx;   // layer indices carrying parameters

  void finalize();

  const Shape3& in_shape(size_t layer) const {
    return layer == 0 ? input : out_shapes[layer - 1];
  }
  int num_classes() const { return out_shapes.back().volume(); }

  size_t weight_count(size_t layer) const;
  size_t bias_count(size_t layer) const;
  size_t param_count() const;

  // Output width of a trainable layer: units for dense, filters for conv.
  int trainable_width(size_t ordinal) const;

  std::string arch_string() const;
};

// Parses a compact architecture description, e.g.
// "conv32k5,pool2,flatten,dense2048,dense62". Conv and dense layers are
// relu-activated except the final layer, which stays linear.
ModelSpec parse_arch(const std::string& arch, Shape3 input);

// The 28x28 grayscale 62-class reference model (6,603,710 parameters).
ModelSpec emnist62_spec();

}  // namespace cfd

#endif  // CFD_NN_MODEL_HPP
