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

#ifndef CFD_FED_ROUND_HPP
#define CFD_FED_ROUND_HPP

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cfd/codes/mask_matrix.hpp"
#include "cfd/dropout/dropout.hpp"
#include "cfd/nn/train.hpp"

namespace cfd {

struct RoundConfig {
  int clients_per_round = 35;  // M
  int total_clients = 3400;    // T
  double alpha = 0.5;
  CodeStrategy strategy;
  int epochs = 1;
  double client_lr = 0.035;
  int batch_size = 10;
  uint64_t seed = 0;
  uint64_t cwc_max_iters = 1'000'000;

  void validate() const {
    require(clients_per_round >= 1 && clients_per_round <= total_clients,
            ErrorCode::ConfigError, "need 1 <= M <= T");
    require(alpha >= 0.0 && alpha < 1.0, ErrorCode::ConfigError,
            "alpha must lie in [0, 1)");
    require(epochs >= 1 && batch_size >= 1, ErrorCode::ConfigError,
            "epochs and batch size must be positive");
  }
};

enum class ServerOptimizer { Favg, FedAdam };

template <typename T>
struct ServerOptimizerState {
  ServerOptimizer mode = ServerOptimizer::Favg;
  double eta = 1.0;
  double beta1 = 0.90;
  double beta2 = 0.99;
  double tau = 0.001;
  ModelWeights<T> momentum;       // Delta^(t-1)
  ModelWeights<T> second_moment;  // v^(t-1), elementwise >= 0
};

template <typename T>
ServerOptimizerState<T> make_server_state(const ModelSpec& spec,
                                          ServerOptimizer mode, double eta) {
  ServerOptimizerState<T> state;
  state.mode = mode;
  state.eta = eta;
  state.momentum = zero_weights<T>(spec);
  state.second_moment = zero_weights<T>(spec);
  return state;
}

// The cohort S(t): clients_per_round ids sampled without replacement,
// deterministic in (seed, round). The j-th sampled client is bound to mask
// row j.
std::vector<int> select_clients(uint64_t seed, int round, int total_clients,
                                int clients_per_round);

// p_j = |D_j| / sum |D_j|.
std::vector<double> favg_weights(const std::vector<size_t>& sizes);

double median_of(std::vector<double> values);

template <typename T>
void favg_step(ServerOptimizerState<T>& state, ModelWeights<T>& global,
               const ModelWeights<T>& merged_delta) {
  require(state.mode == ServerOptimizer::Favg, ErrorCode::ModeMismatch,
          "favg_step on a non-FAVG optimizer state");
  axpy(global, static_cast<T>(state.eta), merged_delta);
}

// Server-side Adam on the merged delta:
//   Delta^t = b1 * Delta^(t-1) + (1 - b1) * merged
//   v^t     = b2 * v^(t-1) + (1 - b2) * (Delta^t)^2
//   w      += eta * Delta^t / (sqrt(v^t) + tau)
template <typename T>
void fedadam_step(ServerOptimizerState<T>& state, ModelWeights<T>& global,
                  const ModelWeights<T>& merged_delta) {
  require(state.mode == ServerOptimizer::FedAdam, ErrorCode::ModeMismatch,
          "fedadam_step on a non-FedAdam optimizer state");
  const T b1 = static_cast<T>(state.beta1);
  const T b2 = static_cast<T>(state.beta2);
  const T tau = static_cast<T>(state.tau);
  const T eta = static_cast<T>(state.eta);
  for (size_t ord = 0; ord < global.layers.size(); ++ord) {
    auto step = [&](std::vector<T>& w, std::vector<T>& m, std::vector<T>& v,
                    const std::vector<T>& d) {
      for (size_t j = 0; j < w.size(); ++j) {
        m[j] = b1 * m[j] + (T(1) - b1) * d[j];
        v[j] = b2 * v[j] + (T(1) - b2) * m[j] * m[j];
        w[j] += eta * m[j] / (std::sqrt(v[j]) + tau);
      }
    };
    step(global.layers[ord].w, state.momentum.layers[ord].w,
         state.second_moment.layers[ord].w, merged_delta.layers[ord].w);
    step(global.layers[ord].b, state.momentum.layers[ord].b,
         state.second_moment.layers[ord].b, merged_delta.layers[ord].b);
  }
}

template <typename T>
void server_step(ServerOptimizerState<T>& state, ModelWeights<T>& global,
                 const ModelWeights<T>& merged_delta) {
  if (state.mode == ServerOptimizer::Favg)
    favg_step(state, global, merged_delta);
  else
    fedadam_step(state, global, merged_delta);
}

struct ClientRoundStats {
  int client_id = 0;
  double train_accuracy = 0.0;
  size_t dataset_size = 0;
  size_t kept_params = 0;
};

struct RoundMetrics {
  int round = 0;
  std::vector<ClientRoundStats> clients;
  double median_train_acc = 0.0;
  double mean_train_acc = 0.0;
  // 4 bytes per kept parameter, download and upload counted separately.
  unsigned long long bytes_down = 0;
  unsigned long long bytes_up = 0;
};

// One federated round: sample the cohort, hand every client its mask rows
// and sub-model, train locally, merge the embedded deltas weighted by
// dataset size, and apply the server optimizer. Client training is
// independent per client and runs in parallel; the merge consumes results
// in cohort order, so the outcome does not depend on thread count.
template <typename T>
RoundMetrics run_round(const ModelSpec& spec, ModelWeights<T>& global,
                       ServerOptimizerState<T>& state, const RoundConfig& cfg,
                       int round, const std::vector<MaskMatrix>& layer_masks,
                       const Dataset& data,
                       const std::vector<ClientDataset>& clients) {
  cfg.validate();
  const std::vector<int> maskable = maskable_ordinals(spec);
  require(layer_masks.size() == maskable.size(), ErrorCode::MaskShapeMismatch,
          "expected one mask matrix per maskable layer");
  for (const MaskMatrix& m : layer_masks) m.validate(cfg.clients_per_round);

  const std::vector<int> cohort = select_clients(
      cfg.seed, round, cfg.total_clients, cfg.clients_per_round);
  const int m_count = static_cast<int>(cohort.size());

  std::vector<MaskAssignment> assignments(static_cast<size_t>(m_count));
  std::vector<ModelWeights<T>> deltas(static_cast<size_t>(m_count));
  std::vector<ClientRoundStats> stats(static_cast<size_t>(m_count));

#pragma omp parallel for schedule(dynamic)
  for (int j = 0; j < m_count; ++j) {
    const ClientDataset& client =
        clients[static_cast<size_t>(cohort[static_cast<size_t>(j)])];
    std::vector<BitSeq> rows;
    rows.reserve(layer_masks.size());
    for (const MaskMatrix& m : layer_masks)
      rows.push_back(m.rows[static_cast<size_t>(j)]);
    MaskAssignment assignment = build_assignment(spec, rows);

    SubModel<T> sub = extract_submodel(spec, global, assignment);
    sub.origin_round = round;
    const ModelWeights<T> trained = sgd_local_train(
        sub.spec, sub.weights, data, client.indices, cfg.client_lr,
        cfg.epochs, cfg.batch_size,
        derive_seed(cfg.seed, "client_train", static_cast<uint64_t>(round),
                    static_cast<uint64_t>(client.client_id)));

    ClientRoundStats s;
    s.client_id = client.client_id;
    s.dataset_size = client.indices.size();
    s.kept_params = total_size(sub.weights);
    s.train_accuracy =
        training_accuracy(sub.spec, trained, data, client.indices);

    deltas[static_cast<size_t>(j)] = subtract(trained, sub.weights);
    assignments[static_cast<size_t>(j)] = std::move(assignment);
    stats[static_cast<size_t>(j)] = s;
  }

  std::vector<size_t> sizes;
  for (const ClientRoundStats& s : stats) sizes.push_back(s.dataset_size);
  const std::vector<double> p = favg_weights(sizes);

  MergeAccumulator<T> acc(spec);
  for (int j = 0; j < m_count; ++j) {
    const EmbeddedDelta<T> embedded = embed_update(
        spec, deltas[static_cast<size_t>(j)], assignments[static_cast<size_t>(j)]);
    acc.add(embedded, p[static_cast<size_t>(j)]);
  }
  const ModelWeights<T> merged = acc.finalize();
  server_step(state, global, merged);

  RoundMetrics metrics;
  metrics.round = round;
  metrics.clients = stats;
  std::vector<double> accs;
  unsigned long long kept_total = 0;
  for (const ClientRoundStats& s : stats) {
    accs.push_back(s.train_accuracy);
    kept_total += s.kept_params;
  }
  metrics.median_train_acc = median_of(accs);
  metrics.mean_train_acc =
      std::accumulate(accs.begin(), accs.end(), 0.0) / accs.size();
  metrics.bytes_down = 4ull * kept_total;
  metrics.bytes_up = 4ull * kept_total;
  return metrics;
}

}  // namespace cfd

#endif  // CFD_FED_ROUND_HPP
