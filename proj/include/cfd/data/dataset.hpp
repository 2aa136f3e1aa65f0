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

#ifndef CFD_DATA_DATASET_HPP
#define CFD_DATA_DATASET_HPP

#include <vector>

#include "cfd/nn/model.hpp"
#include "cfd/nn/ops.hpp"

namespace cfd {

// Immutable sample store; inputs are normalized to [0, 1]. Clients hold
// index lists into one shared dataset.
struct Dataset {
  Shape3 shape;
  int num_classes = 0;
  std::vector<float> inputs;  // size() * shape.volume()
  std::vector<int> labels;

  size_t size() const { return labels.size(); }
};

struct ClientDataset {
  int client_id = 0;
  std::vector<int> indices;
};

template <typename T>
Batch<T> make_batch(const Dataset& data, const std::vector<int>& indices,
                    size_t begin, size_t end) {
  Batch<T> batch;
  batch.n = static_cast<int>(end - begin);
  batch.shape = data.shape;
  const size_t vol = static_cast<size_t>(data.shape.volume());
  batch.x.resize(static_cast<size_t>(batch.n) * vol);
  batch.y.resize(static_cast<size_t>(batch.n));
  for (size_t i = begin; i < end; ++i) {
    const size_t sample = static_cast<size_t>(indices[i]);
    const float* src = data.inputs.data() + sample * vol;
    T* dst = batch.x.data() + (i - begin) * vol;
    for (size_t j = 0; j < vol; ++j) dst[j] = static_cast<T>(src[j]);
    batch.y[i - begin] = data.labels[sample];
  }
  return batch;
}

}  // namespace cfd

#endif  // CFD_DATA_DATASET_HPP
