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

#ifndef CFD_NN_TRAIN_HPP
#define CFD_NN_TRAIN_HPP

#include "cfd/data/dataset.hpp"
#include "cfd/nn/ops.hpp"

namespace cfd {

// Plain minibatch SGD over the client samples: per epoch the sample order
// is reshuffled from the given seed, then one gradient step is taken per
// minibatch (the final short batch included). Returns the trained weights.
template <typename T>
ModelWeights<T> sgd_local_train(const ModelSpec& spec,
                                const ModelWeights<T>& start,
                                const Dataset& data,
                                const std::vector<int>& indices, double lr,
                                int epochs, int batch_size, uint64_t seed) {
  require(!indices.empty(), ErrorCode::EmptyDataset,
          "local training on an empty client dataset");
  require(epochs >= 1, ErrorCode::ConfigError, "epochs must be >= 1");
  require(batch_size >= 1, ErrorCode::ConfigError, "batch size must be >= 1");

  ModelWeights<T> weights = start;
  std::vector<int> order = indices;
  Rng rng(derive_seed(seed, "batch_order"));
  ModelWeights<T> grad;
  for (int epoch = 0; epoch < epochs; ++epoch) {
    rng.shuffle(order);
    for (size_t begin = 0; begin < order.size();
         begin += static_cast<size_t>(batch_size)) {
      const size_t end =
          std::min(order.size(), begin + static_cast<size_t>(batch_size));
      const Batch<T> batch = make_batch<T>(data, order, begin, end);
      loss_and_grad(spec, weights, batch, grad);
      axpy(weights, static_cast<T>(-lr), grad);
    }
  }
  return weights;
}

// Fraction of argmax-correct predictions; ties resolve to the lowest
// class index.
template <typename T>
double training_accuracy(const ModelSpec& spec, const ModelWeights<T>& weights,
                         const Dataset& data, const std::vector<int>& indices,
                         int eval_batch = 64) {
  require(!indices.empty(), ErrorCode::EmptyDataset,
          "accuracy over an empty dataset");
  const int classes = spec.num_classes();
  size_t correct = 0;
  for (size_t begin = 0; begin < indices.size();
       begin += static_cast<size_t>(eval_batch)) {
    const size_t end =
        std::min(indices.size(), begin + static_cast<size_t>(eval_batch));
    const Batch<T> batch = make_batch<T>(data, indices, begin, end);
    const std::vector<T> logits = forward(spec, weights, batch);
    for (int item = 0; item < batch.n; ++item) {
      const T* z = logits.data() + static_cast<size_t>(item) * classes;
      int best = 0;
      for (int j = 1; j < classes; ++j)
        if (z[j] > z[best]) best = j;
      if (best == batch.y[static_cast<size_t>(item)]) ++correct;
    }
  }
  return static_cast<double>(correct) / static_cast<double>(indices.size());
}

}  // namespace cfd

#endif  // CFD_NN_TRAIN_HPP
