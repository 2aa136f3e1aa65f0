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

#include "cfd/harness/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "cfd/dropout/dropout.hpp"

namespace cfd {

namespace {

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = {
      "run.seed", "run.rounds", "run.eval_interval", "run.threads", "run.out",
      "data.source", "data.classes", "data.samples_per_class",
      "data.test_per_class", "data.side", "data.separation",
      "data.noise_sigma", "data.images", "data.labels", "data.test_images",
      "data.test_labels",
      "partition.scheme", "partition.shards_per_client",
      "model.arch",
      "fed.total_clients", "fed.clients_per_round", "fed.alpha",
      "fed.strategy", "fed.epochs", "fed.client_lr", "fed.batch_size",
      "fed.cwc_max_iters",
      "server.optimizer", "server.eta", "server.beta1", "server.beta2",
      "server.tau",
      "adapt.gamma_target", "adapt.window", "adapt.steps", "adapt.eta0_log10",
      "adapt.delta_eta0", "adapt.max_rounds",
      "codes.width",
  };
  return keys;
}

std::string trim(const std::string& s) {
  const size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

void ConfigMap::set(const std::string& key, const std::string& value) {
  require(known_keys().count(key) == 1, ErrorCode::ConfigError,
          "unknown configuration key '" + key + "'");
  values_[key] = value;
}

ConfigMap ConfigMap::from_file(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), ErrorCode::ConfigError,
          "cannot open config file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return from_string(buf.str());
}

ConfigMap ConfigMap::from_string(const std::string& text) {
  ConfigMap map;
  std::stringstream ss(text);
  std::string line;
  int line_no = 0;
  while (std::getline(ss, line)) {
    ++line_no;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const size_t eq = line.find('=');
    require(eq != std::string::npos, ErrorCode::ConfigError,
            "config line " + std::to_string(line_no) +
                " is not 'key = value'");
    map.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return map;
}

void ConfigMap::apply_override(const std::string& kv) {
  const size_t eq = kv.find('=');
  require(eq != std::string::npos, ErrorCode::ConfigError,
          "override '" + kv + "' is not key=value");
  set(trim(kv.substr(0, eq)), trim(kv.substr(eq + 1)));
}

bool ConfigMap::has(const std::string& key) const {
  return values_.count(key) == 1;
}

std::string ConfigMap::get_string(const std::string& key,
                                  const std::string& def) const {
  auto it = values_.find(key);
  return it == values_.end() ? def : it->second;
}

double ConfigMap::get_double(const std::string& key, double def) const {
  auto it = values_.find(key);
  if (it == values_.end()) return def;
  try {
    size_t pos = 0;
    const double v = std::stod(it->second, &pos);
    require(pos == it->second.size(), ErrorCode::ConfigError,
            "trailing characters in numeric value for " + key);
    return v;
  } catch (const std::logic_error&) {
    fail(ErrorCode::ConfigError, "bad numeric value for " + key);
  }
}

int ConfigMap::get_int(const std::string& key, int def) const {
  const double v = get_double(key, static_cast<double>(def));
  const int i = static_cast<int>(std::lround(v));
  require(std::abs(v - i) < 1e-9, ErrorCode::ConfigError,
          key + " must be an integer");
  return i;
}

uint64_t ConfigMap::get_u64(const std::string& key, uint64_t def) const {
  auto it = values_.find(key);
  if (it == values_.end()) return def;
  try {
    size_t pos = 0;
    const uint64_t v = std::stoull(it->second, &pos);
    require(pos == it->second.size(), ErrorCode::ConfigError,
            "trailing characters in value for " + key);
    return v;
  } catch (const std::logic_error&) {
    fail(ErrorCode::ConfigError, "bad unsigned value for " + key);
  }
}

void ExperimentConfig::validate() const {
  require(rounds >= 1, ErrorCode::ConfigError, "run.rounds must be >= 1");
  require(eval_interval >= 0, ErrorCode::ConfigError,
          "run.eval_interval must be >= 0");
  round.validate();
  if (source == DataSource::Synthetic) {
    require(classes >= 2, ErrorCode::ConfigError,
            "data.classes must be >= 2");
    require(samples_per_class >= 1 && side >= 1, ErrorCode::ConfigError,
            "synthetic data needs positive sizes");
  } else {
    require(!images_path.empty() && !labels_path.empty(),
            ErrorCode::ConfigError, "idx source needs data.images and data.labels");
  }
  require(shards_per_client >= 1, ErrorCode::ConfigError,
          "partition.shards_per_client must be >= 1");
  adapt.validate();
}

ExperimentConfig make_experiment_config(const ConfigMap& map) {
  ExperimentConfig cfg;
  cfg.seed = map.get_u64("run.seed", cfg.seed);
  cfg.rounds = map.get_int("run.rounds", cfg.rounds);
  cfg.eval_interval = map.get_int("run.eval_interval", cfg.eval_interval);
  cfg.threads = map.get_int("run.threads", cfg.threads);
  cfg.out_dir = map.get_string("run.out", cfg.out_dir);

  const std::string source = map.get_string("data.source", "synthetic");
  if (source == "synthetic")
    cfg.source = DataSource::Synthetic;
  else if (source == "idx")
    cfg.source = DataSource::Idx;
  else
    fail(ErrorCode::ConfigError, "data.source must be synthetic or idx");
  cfg.classes = map.get_int("data.classes", cfg.classes);
  cfg.samples_per_class =
      map.get_int("data.samples_per_class", cfg.samples_per_class);
  cfg.test_per_class = map.get_int("data.test_per_class", cfg.test_per_class);
  cfg.side = map.get_int("data.side", cfg.side);
  cfg.separation = map.get_double("data.separation", cfg.separation);
  cfg.noise_sigma = map.get_double("data.noise_sigma", cfg.noise_sigma);
  cfg.images_path = map.get_string("data.images", "");
  cfg.labels_path = map.get_string("data.labels", "");
  cfg.test_images_path = map.get_string("data.test_images", "");
  cfg.test_labels_path = map.get_string("data.test_labels", "");

  const std::string scheme = map.get_string("partition.scheme", "iid");
  if (scheme == "iid")
    cfg.scheme = PartitionScheme::Iid;
  else if (scheme == "label_skew")
    cfg.scheme = PartitionScheme::LabelSkew;
  else
    fail(ErrorCode::ConfigError, "partition.scheme must be iid or label_skew");
  cfg.shards_per_client =
      map.get_int("partition.shards_per_client", cfg.shards_per_client);

  cfg.arch = map.get_string("model.arch", cfg.arch);

  cfg.round.total_clients = map.get_int("fed.total_clients", 40);
  cfg.round.clients_per_round = map.get_int("fed.clients_per_round", 8);
  cfg.round.alpha = map.get_double("fed.alpha", 0.5);
  cfg.round.strategy.variant =
      code_variant_from_name(map.get_string("fed.strategy", "random_same"));
  cfg.round.epochs = map.get_int("fed.epochs", 1);
  cfg.round.client_lr = map.get_double("fed.client_lr", 0.035);
  cfg.round.batch_size = map.get_int("fed.batch_size", 10);
  cfg.round.cwc_max_iters =
      map.get_u64("fed.cwc_max_iters", cfg.round.cwc_max_iters);
  cfg.round.seed = cfg.seed;
  cfg.round.strategy.seed = cfg.seed;

  const std::string opt = map.get_string("server.optimizer", "favg");
  if (opt == "favg")
    cfg.optimizer = ServerOptimizer::Favg;
  else if (opt == "fedadam")
    cfg.optimizer = ServerOptimizer::FedAdam;
  else
    fail(ErrorCode::ConfigError, "server.optimizer must be favg or fedadam");
  cfg.eta = map.get_double(
      "server.eta", cfg.optimizer == ServerOptimizer::Favg ? 1.0 : 0.01);
  cfg.beta1 = map.get_double("server.beta1", cfg.beta1);
  cfg.beta2 = map.get_double("server.beta2", cfg.beta2);
  cfg.tau = map.get_double("server.tau", cfg.tau);

  cfg.adapt.gamma_target =
      map.get_double("adapt.gamma_target", 20.0 / 62.0);
  cfg.adapt.window = map.get_int("adapt.window", 10);
  cfg.adapt.steps = map.get_int("adapt.steps", 3);
  cfg.eta0_explicit = map.has("adapt.eta0_log10");
  cfg.adapt.eta0_log10 = map.get_double(
      "adapt.eta0_log10",
      cfg.optimizer == ServerOptimizer::Favg ? 0.0 : -2.0);
  cfg.adapt.delta_eta0 = map.get_double("adapt.delta_eta0", 1.0);
  cfg.adapt.max_rounds = map.get_int("adapt.max_rounds", 500);

  cfg.codes_width = map.get_int("codes.width", 0);

  cfg.validate();
  return cfg;
}

ModelSpec validate_model_and_strategy(const ExperimentConfig& cfg) {
  Shape3 input{1, cfg.side, cfg.side};
  if (cfg.source == DataSource::Idx) {
    // Shape comes from the file at run time; side acts as a placeholder
    // until the data is loaded.
    input = {1, cfg.side, cfg.side};
  }
  ModelSpec spec = parse_arch(cfg.arch, input);
  if (!spec.layers.empty() && spec.layers.front().kind == LayerKind::Dense)
    spec = parse_arch(cfg.arch, {input.volume(), 1, 1});

  // Probe strategy feasibility on every maskable width before any
  // training starts.
  for (int width : maskable_widths(spec))
    build_mask_matrix(cfg.round.strategy, width, cfg.round.clients_per_round,
                      cfg.round.alpha, cfg.round.cwc_max_iters);
  return spec;
}

}  // namespace cfd
