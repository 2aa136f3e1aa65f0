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

#ifndef CFD_FED_REFERENCE_HPP
#define CFD_FED_REFERENCE_HPP

#include "cfd/fed/round.hpp"

namespace cfd {

// Serial no-dropout baseline: every selected client trains the full model,
// the server adds the size-weighted average of the deltas scaled by eta.
// Kept deliberately free of the mask/extract/merge machinery so it can act
// as an independent check of the coded path (which must coincide with it
// at alpha = 0) and as the serial end of the kernel benchmarks.
namespace ref {

template <typename T>
ModelWeights<T> run_rounds(const ModelSpec& spec, ModelWeights<T> weights,
                           const RoundConfig& cfg, double eta, int rounds,
                           const Dataset& data,
                           const std::vector<ClientDataset>& clients) {
  cfg.validate();
  for (int round = 0; round < rounds; ++round) {
    const std::vector<int> cohort = select_clients(
        cfg.seed, round, cfg.total_clients, cfg.clients_per_round);

    std::vector<ModelWeights<T>> deltas;
    std::vector<size_t> sizes;
    for (int id : cohort) {
      const ClientDataset& client = clients[static_cast<size_t>(id)];
      const ModelWeights<T> trained = sgd_local_train(
          spec, weights, data, client.indices, cfg.client_lr, cfg.epochs,
          cfg.batch_size,
          derive_seed(cfg.seed, "client_train", static_cast<uint64_t>(round),
                      static_cast<uint64_t>(client.client_id)));
      deltas.push_back(subtract(trained, weights));
      sizes.push_back(client.indices.size());
    }

    const std::vector<double> p = favg_weights(sizes);
    for (size_t j = 0; j < deltas.size(); ++j)
      axpy(weights, static_cast<T>(eta * p[j]), deltas[j]);
  }
  return weights;
}

}  // namespace ref
}  // namespace cfd

#endif  // CFD_FED_REFERENCE_HPP
