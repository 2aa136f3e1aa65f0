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

#ifndef CFD_HARNESS_CONFIG_HPP
#define CFD_HARNESS_CONFIG_HPP

#include <map>
#include <string>
#include <vector>

#include "cfd/adapt/adapt.hpp"
#include "cfd/data/io.hpp"
#include "cfd/fed/round.hpp"

namespace cfd {

// Flat "key = value" configuration text. '#' starts a comment; overrides
// are "key=value" strings applied on top. Unknown keys are rejected.
class ConfigMap {
 public:
  static ConfigMap from_file(const std::string& path);
  static ConfigMap from_string(const std::string& text);

  void apply_override(const std::string& key_equals_value);

  bool has(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& def) const;
  double get_double(const std::string& key, double def) const;
  int get_int(const std::string& key, int def) const;
  uint64_t get_u64(const std::string& key, uint64_t def) const;

  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  void set(const std::string& key, const std::string& value);
  std::map<std::string, std::string> values_;
};

enum class DataSource { Synthetic, Idx };

// Everything one experiment needs, with defaults matching the reference
// EMNIST62 setup (M=35, T=3400, alpha=0.5, client lr 0.035, one epoch,
// beta1=0.9, beta2=0.99, tau=0.001, three adaptation steps, initial log10
// spacing 1).
struct ExperimentConfig {
  uint64_t seed = 42;
  int rounds = 150;
  int eval_interval = 5;  // 0 disables test evaluation
  int threads = 0;        // 0 keeps the runtime default
  std::string out_dir = ".";

  DataSource source = DataSource::Synthetic;
  int classes = 10;
  int samples_per_class = 300;
  int test_per_class = 60;
  int side = 12;
  double separation = 1.0;
  double noise_sigma = 0.15;
  std::string images_path, labels_path;
  std::string test_images_path, test_labels_path;

  PartitionScheme scheme = PartitionScheme::Iid;
  int shards_per_client = 2;

  std::string arch = "conv8k3,pool2,flatten,dense64,dense10";

  RoundConfig round;  // M, T, alpha, strategy, epochs, client lr, batch

  ServerOptimizer optimizer = ServerOptimizer::Favg;
  double eta = 1.0;
  double beta1 = 0.90, beta2 = 0.99, tau = 0.001;

  AdaptationConfig adapt;
  bool eta0_explicit = false;

  int codes_width = 0;  // gen-codes only; 0 = use the model's mask widths

  void validate() const;
};

// Builds and validates the experiment from parsed configuration text.
ExperimentConfig make_experiment_config(const ConfigMap& map);

// Parses the model architecture and checks strategy feasibility against
// every maskable layer width (named errors, no partial runs).
ModelSpec validate_model_and_strategy(const ExperimentConfig& cfg);

}  // namespace cfd

#endif  // CFD_HARNESS_CONFIG_HPP
