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

#ifndef CFD_FED_SESSION_HPP
#define CFD_FED_SESSION_HPP

#include <optional>

#include "cfd/adapt/adapt.hpp"
#include "cfd/data/io.hpp"
#include "cfd/fed/round.hpp"
#include "cfd/harness/config.hpp"

namespace cfd {

// Shared inputs of one experiment: the model, the partitioned training
// data, an optional test set, and the common initial weights. Candidate
// sessions during adaptation all start from this same state.
template <typename T>
struct FedEnvironment {
  ExperimentConfig cfg;
  ModelSpec spec;
  Dataset train;
  Dataset test;  // empty when no test data is configured
  std::vector<ClientDataset> clients;
  ModelWeights<T> initial_weights;
  std::vector<int> test_indices;
};

template <typename T>
FedEnvironment<T> build_environment(const ExperimentConfig& cfg) {
  FedEnvironment<T> env;
  env.cfg = cfg;

  if (cfg.source == DataSource::Synthetic) {
    // One draw covers train and test; the generator interleaves classes,
    // so a prefix split keeps both sides balanced.
    const Dataset all =
        synthesize(cfg.classes, cfg.samples_per_class + cfg.test_per_class,
                   cfg.side, derive_seed(cfg.seed, "data"), cfg.separation,
                   cfg.noise_sigma);
    const size_t vol = static_cast<size_t>(all.shape.volume());
    const size_t train_n =
        static_cast<size_t>(cfg.samples_per_class) * cfg.classes;
    env.train.shape = env.test.shape = all.shape;
    env.train.num_classes = env.test.num_classes = all.num_classes;
    env.train.inputs.assign(all.inputs.begin(),
                            all.inputs.begin() + train_n * vol);
    env.train.labels.assign(all.labels.begin(), all.labels.begin() + train_n);
    env.test.inputs.assign(all.inputs.begin() + train_n * vol,
                           all.inputs.end());
    env.test.labels.assign(all.labels.begin() + train_n, all.labels.end());
  } else {
    env.train = load_idx(cfg.images_path, cfg.labels_path);
    if (!cfg.test_images_path.empty())
      env.test = load_idx(cfg.test_images_path, cfg.test_labels_path);
    else
      env.test.shape = env.train.shape;
  }

  Shape3 input = env.train.shape;
  env.spec = parse_arch(cfg.arch, input);
  if (env.spec.layers.front().kind == LayerKind::Dense)
    env.spec = parse_arch(cfg.arch, {input.volume(), 1, 1});
  require(env.spec.num_classes() >= env.train.num_classes,
          ErrorCode::ConfigError,
          "model has fewer outputs than the data has classes");

  PartitionSpec part;
  part.scheme = cfg.scheme;
  part.total_clients = cfg.round.total_clients;
  part.shards_per_client = cfg.shards_per_client;
  part.seed = derive_seed(cfg.seed, "partition");
  env.clients = partition(env.train, part);

  env.initial_weights = glorot_init<T>(env.spec, derive_seed(cfg.seed, "init"));
  env.test_indices.resize(env.test.size());
  for (size_t i = 0; i < env.test.size(); ++i)
    env.test_indices[i] = static_cast<int>(i);
  return env;
}

// One federated training session: regenerates or reshuffles mask matrices
// every round, executes rounds, and tracks cumulative traffic. Random
// strategies draw fresh matrices per round; Gold and CWC matrices are
// built once per session and get round-seeded row/column shuffles, which
// also rotates excess codewords into use.
template <typename T>
class FlSession {
 public:
  FlSession(const FedEnvironment<T>* env, ServerOptimizer optimizer,
            double eta, uint64_t session_seed)
      : env_(env), session_seed_(session_seed) {
    weights_ = env->initial_weights;
    state_ = make_server_state<T>(env->spec, optimizer, eta);
    state_.beta1 = env->cfg.beta1;
    state_.beta2 = env->cfg.beta2;
    state_.tau = env->cfg.tau;
    round_cfg_ = env->cfg.round;
    round_cfg_.seed = session_seed;

    const bool reuse_base =
        round_cfg_.strategy.variant == CodeVariant::Gold ||
        round_cfg_.strategy.variant == CodeVariant::Cwc;
    if (reuse_base && round_cfg_.alpha > 0.0) {
      for (size_t i = 0; i < maskable_widths(env->spec).size(); ++i) {
        const int width = maskable_widths(env->spec)[i];
        base_masks_.push_back(build_mask_matrix(
            {round_cfg_.strategy.variant,
             derive_seed(session_seed, "mask_base", i)},
            width, round_cfg_.clients_per_round, round_cfg_.alpha,
            round_cfg_.cwc_max_iters));
      }
    }
  }

  const RoundMetrics& advance_round() {
    const std::vector<MaskMatrix> masks = masks_for_round(round_);
    RoundMetrics m = run_round(env_->spec, weights_, state_, round_cfg_,
                               round_, masks, env_->train, env_->clients);
    cumulative_bytes_ += m.bytes_down + m.bytes_up;
    history_.push_back(std::move(m));
    ++round_;
    return history_.back();
  }

  double test_accuracy() const {
    require(!env_->test_indices.empty(), ErrorCode::EmptyDataset,
            "no test data configured");
    return training_accuracy(env_->spec, weights_, env_->test,
                             env_->test_indices);
  }

  bool has_test_data() const { return !env_->test_indices.empty(); }
  int rounds_run() const { return round_; }
  unsigned long long cumulative_bytes() const { return cumulative_bytes_; }
  const std::vector<RoundMetrics>& history() const { return history_; }
  const ModelWeights<T>& weights() const { return weights_; }
  const ModelSpec& spec() const { return env_->spec; }
  double eta() const { return state_.eta; }

 private:
  std::vector<MaskMatrix> masks_for_round(int round) const {
    std::vector<MaskMatrix> masks;
    const std::vector<int> widths = maskable_widths(env_->spec);
    for (size_t i = 0; i < widths.size(); ++i) {
      if (!base_masks_.empty()) {
        masks.push_back(shuffle_rows_and_columns(
            base_masks_[i], derive_seed(session_seed_, "mask_round",
                                        static_cast<uint64_t>(round), i)));
      } else {
        masks.push_back(build_mask_matrix(
            {round_cfg_.strategy.variant,
             derive_seed(session_seed_, "mask_round",
                         static_cast<uint64_t>(round), i)},
            widths[i], round_cfg_.clients_per_round, round_cfg_.alpha,
            round_cfg_.cwc_max_iters));
      }
    }
    return masks;
  }

  const FedEnvironment<T>* env_;
  uint64_t session_seed_;
  RoundConfig round_cfg_;
  ModelWeights<T> weights_;
  ServerOptimizerState<T> state_;
  std::vector<MaskMatrix> base_masks_;
  std::vector<RoundMetrics> history_;
  unsigned long long cumulative_bytes_ = 0;
  int round_ = 0;
};

// Adapter handing one FlSession to the learning-rate search.
template <typename T>
class FlAdaptSession : public AdaptSession {
 public:
  FlAdaptSession(const FedEnvironment<T>* env, ServerOptimizer optimizer,
                 double eta, uint64_t session_seed)
      : session_(env, optimizer, eta, session_seed) {}

  std::vector<double> advance_round() override {
    const RoundMetrics& m = session_.advance_round();
    std::vector<double> accs;
    accs.reserve(m.clients.size());
    for (const ClientRoundStats& s : m.clients)
      accs.push_back(s.train_accuracy);
    return accs;
  }

 private:
  FlSession<T> session_;
};

// Candidate factory for run_adaptation over real federated sessions: all
// candidates share the environment (same data and initial weights) but
// sample their own cohorts.
template <typename T>
SessionFactory make_fl_session_factory(const FedEnvironment<T>* env,
                                       ServerOptimizer optimizer) {
  return [env, optimizer](double eta_log10, int step, int candidate) {
    const uint64_t session_seed =
        derive_seed(env->cfg.seed, "adapt_session",
                    static_cast<uint64_t>(step),
                    static_cast<uint64_t>(candidate));
    return std::make_unique<FlAdaptSession<T>>(
        env, optimizer, std::pow(10.0, eta_log10), session_seed);
  };
}

}  // namespace cfd

#endif  // CFD_FED_SESSION_HPP
