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

#include <doctest.h>

#include <cmath>

#include "cfd/nn/train.hpp"

using namespace cfd;

namespace {

Batch<double> random_batch(const ModelSpec& spec, int n, int classes,
                           uint64_t seed) {
  Batch<double> batch;
  batch.n = n;
  batch.shape = spec.input;
  batch.x.resize(static_cast<size_t>(n) * spec.input.volume());
  batch.y.resize(static_cast<size_t>(n));
  Rng rng(seed);
  for (double& v : batch.x) v = rng.next_double();
  for (int& y : batch.y) y = static_cast<int>(rng.next_below(classes));
  return batch;
}

// Central finite differences on randomly chosen coordinates. Coordinates
// with a vanishing analytic gradient are skipped (dead relu units).
void check_gradient(const ModelSpec& spec, const Batch<double>& batch,
                    uint64_t seed, int coords_to_check) {
  ModelWeights<double> weights = glorot_init<double>(spec, seed);
  ModelWeights<double> grad;
  loss_and_grad(spec, weights, batch, grad);

  Rng rng(seed + 1);
  const double eps = 1e-5;
  int checked = 0, attempts = 0;
  while (checked < coords_to_check && attempts < 40 * coords_to_check) {
    ++attempts;
    const size_t ord = rng.next_below(weights.layers.size());
    const bool bias = rng.next_below(4) == 0;
    std::vector<double>& vec =
        bias ? weights.layers[ord].b : weights.layers[ord].w;
    const std::vector<double>& gvec =
        bias ? grad.layers[ord].b : grad.layers[ord].w;
    if (vec.empty()) continue;
    const size_t idx = rng.next_below(vec.size());
    if (std::abs(gvec[idx]) < 1e-6) continue;

    const double saved = vec[idx];
    ModelWeights<double> scratch;
    vec[idx] = saved + eps;
    const double loss_hi = loss_and_grad(spec, weights, batch, scratch);
    vec[idx] = saved - eps;
    const double loss_lo = loss_and_grad(spec, weights, batch, scratch);
    vec[idx] = saved;

    const double fd = (loss_hi - loss_lo) / (2 * eps);
    const double rel =
        std::abs(fd - gvec[idx]) / std::max(std::abs(fd), std::abs(gvec[idx]));
    CHECK(rel < 1e-4);
    ++checked;
  }
  CHECK(checked == coords_to_check);
}

}  // namespace

TEST_CASE("emnist62 spec parameter counts") {
  const ModelSpec spec = emnist62_spec();
  REQUIRE(spec.trainable_idx.size() == 4);
  CHECK(spec.weight_count(0) + spec.bias_count(0) == 832);
  CHECK(spec.weight_count(2) + spec.bias_count(2) == 51264);
  CHECK(spec.weight_count(5) + spec.bias_count(5) == 6424576);
  CHECK(spec.weight_count(6) + spec.bias_count(6) == 127038);
  CHECK(spec.param_count() == 6603710);
  CHECK(total_size(zero_weights<float>(spec)) == 6603710);
  CHECK(spec.num_classes() == 62);
}

TEST_CASE("forward through the emnist62 model produces (10, 62) logits") {
  const ModelSpec spec = emnist62_spec();
  const ModelWeights<float> weights = zero_weights<float>(spec);
  Batch<float> batch;
  batch.n = 10;
  batch.shape = spec.input;
  batch.x.assign(static_cast<size_t>(10) * spec.input.volume(), 0.5f);
  batch.y.assign(10, 0);
  const std::vector<float> logits = forward(spec, weights, batch);
  REQUIRE(logits.size() == 10u * 62u);
  // Zero weights yield uniform (all-zero) logits.
  for (float v : logits) CHECK(v == 0.0f);
}

TEST_CASE("identity dense layer is the identity map") {
  ModelSpec spec = parse_arch("dense4", {4, 1, 1});
  ModelWeights<double> weights = zero_weights<double>(spec);
  for (int i = 0; i < 4; ++i) weights.layers[0].w[static_cast<size_t>(i) * 4 + i] = 1.0;
  Batch<double> batch;
  batch.n = 2;
  batch.shape = spec.input;
  batch.x = {0.1, 0.2, 0.3, 0.4, 0.9, 0.8, 0.7, 0.6};
  batch.y = {0, 1};
  const std::vector<double> logits = forward(spec, weights, batch);
  for (size_t j = 0; j < batch.x.size(); ++j)
    CHECK(logits[j] == doctest::Approx(batch.x[j]));
}

TEST_CASE("uniform logits give ln(C) loss and confident logits near zero") {
  std::vector<double> logits(3 * 5, 0.0);
  const std::vector<int> labels{0, 3, 4};
  CHECK(softmax_cross_entropy(logits, labels, 5) ==
        doctest::Approx(std::log(5.0)));

  for (int item = 0; item < 3; ++item)
    logits[static_cast<size_t>(item) * 5 + labels[static_cast<size_t>(item)]] =
        200.0;
  CHECK(softmax_cross_entropy(logits, labels, 5) ==
        doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("backprop matches finite differences on a dense model") {
  const ModelSpec spec = parse_arch("dense8,dense5", {6, 1, 1});
  const Batch<double> batch = random_batch(spec, 5, 5, 91);
  check_gradient(spec, batch, 17, 20);
}

TEST_CASE("backprop matches finite differences on a conv model") {
  const ModelSpec spec = parse_arch("conv4k3,pool2,flatten,dense5", {1, 6, 6});
  const Batch<double> batch = random_batch(spec, 4, 5, 33);
  check_gradient(spec, batch, 29, 20);
}

TEST_CASE("backprop matches finite differences on a two-conv stack") {
  const ModelSpec spec =
      parse_arch("conv3k3,conv4k3,pool2,flatten,dense4", {2, 6, 6});
  const Batch<double> batch = random_batch(spec, 3, 4, 55);
  check_gradient(spec, batch, 71, 20);
}

TEST_CASE("forward is deterministic") {
  const ModelSpec spec = parse_arch("conv4k3,pool2,flatten,dense6", {1, 8, 8});
  const ModelWeights<double> weights = glorot_init<double>(spec, 3);
  const Batch<double> batch = random_batch(spec, 6, 6, 4);
  const std::vector<double> a = forward(spec, weights, batch);
  const std::vector<double> b = forward(spec, weights, batch);
  CHECK(a == b);
}

TEST_CASE("sgd with zero learning rate leaves weights unchanged") {
  const ModelSpec spec = parse_arch("dense6,dense3", {4, 1, 1});
  Dataset data;
  data.shape = spec.input;
  data.num_classes = 3;
  Rng rng(8);
  for (int i = 0; i < 12; ++i) {
    for (int j = 0; j < 4; ++j)
      data.inputs.push_back(static_cast<float>(rng.next_double()));
    data.labels.push_back(static_cast<int>(rng.next_below(3)));
  }
  std::vector<int> idx(12);
  for (int i = 0; i < 12; ++i) idx[static_cast<size_t>(i)] = i;

  const ModelWeights<double> start = glorot_init<double>(spec, 5);
  const ModelWeights<double> after =
      sgd_local_train(spec, start, data, idx, 0.0, 2, 4, 7);
  CHECK(after == start);
}

TEST_CASE("one epoch over one batch is exactly one sgd step") {
  const ModelSpec spec = parse_arch("dense5,dense3", {4, 1, 1});
  Dataset data;
  data.shape = spec.input;
  data.num_classes = 3;
  Rng rng(10);
  for (int i = 0; i < 6; ++i) {
    for (int j = 0; j < 4; ++j)
      data.inputs.push_back(static_cast<float>(rng.next_double()));
    data.labels.push_back(static_cast<int>(rng.next_below(3)));
  }
  std::vector<int> idx{0, 1, 2, 3, 4, 5};

  const double lr = 0.035;
  const uint64_t seed = 99;
  const ModelWeights<double> start = glorot_init<double>(spec, 6);
  const ModelWeights<double> trained =
      sgd_local_train(spec, start, data, idx, lr, 1, 6, seed);

  // Reproduce the single step by hand with the same shuffled order.
  std::vector<int> order = idx;
  Rng shuffle_rng(derive_seed(seed, "batch_order"));
  shuffle_rng.shuffle(order);
  const Batch<double> batch = make_batch<double>(data, order, 0, 6);
  ModelWeights<double> grad;
  loss_and_grad(spec, start, batch, grad);
  ModelWeights<double> expected = start;
  axpy(expected, -lr, grad);
  CHECK(max_abs_difference(trained, expected) == 0.0);
}

TEST_CASE("loss decreases on a separable toy problem") {
  const ModelSpec spec = parse_arch("dense8,dense2", {3, 1, 1});
  Dataset data;
  data.shape = spec.input;
  data.num_classes = 2;
  Rng rng(12);
  for (int i = 0; i < 40; ++i) {
    const int label = i % 2;
    const double center = label == 0 ? 0.2 : 0.8;
    for (int j = 0; j < 3; ++j)
      data.inputs.push_back(
          static_cast<float>(center + 0.05 * rng.next_gaussian()));
    data.labels.push_back(label);
  }
  std::vector<int> idx(40);
  for (int i = 0; i < 40; ++i) idx[static_cast<size_t>(i)] = i;

  ModelWeights<double> weights = glorot_init<double>(spec, 2);
  const Batch<double> all = make_batch<double>(data, idx, 0, 40);
  ModelWeights<double> grad;
  const double loss_before = loss_and_grad(spec, weights, all, grad);
  for (int step = 0; step < 50; ++step)
    weights = sgd_local_train(spec, weights, data, idx, 0.2, 1, 40, 1);
  const double loss_after = loss_and_grad(spec, weights, all, grad);
  CHECK(loss_after < loss_before);
  CHECK(loss_after >= 0.0);
  CHECK(training_accuracy(spec, weights, data, idx) > 0.95);
}

TEST_CASE("memorizing a single sample gives accuracy 1") {
  const ModelSpec spec = parse_arch("dense6,dense3", {2, 1, 1});
  Dataset data;
  data.shape = spec.input;
  data.num_classes = 3;
  data.inputs = {0.3f, 0.9f};
  data.labels = {2};
  std::vector<int> idx{0};
  ModelWeights<double> weights = glorot_init<double>(spec, 20);
  for (int step = 0; step < 60; ++step)
    weights = sgd_local_train(spec, weights, data, idx, 0.3, 1, 1, 1);
  CHECK(training_accuracy(spec, weights, data, idx) == 1.0);
}

TEST_CASE("random weights on 62 classes sit near chance accuracy") {
  const ModelSpec spec = parse_arch("dense62", {20, 1, 1});
  const ModelWeights<double> weights = glorot_init<double>(spec, 31);
  Dataset data;
  data.shape = spec.input;
  data.num_classes = 62;
  Rng rng(14);
  const int n = 4000;
  std::vector<int> idx;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < 20; ++j)
      data.inputs.push_back(static_cast<float>(rng.next_double()));
    data.labels.push_back(static_cast<int>(rng.next_below(62)));
    idx.push_back(i);
  }
  const double acc = training_accuracy(spec, weights, data, idx);
  CHECK(acc > 0.002);
  CHECK(acc < 0.05);
}

TEST_CASE("empty dataset errors") {
  const ModelSpec spec = parse_arch("dense3", {2, 1, 1});
  const ModelWeights<double> weights = zero_weights<double>(spec);
  Dataset data;
  data.shape = spec.input;
  data.num_classes = 3;
  CHECK_THROWS_AS(training_accuracy(spec, weights, data, {}), Error);
  CHECK_THROWS_AS(
      sgd_local_train(spec, weights, data, {}, 0.1, 1, 4, 1), Error);
}

TEST_CASE("batch shape mismatch is rejected") {
  const ModelSpec spec = parse_arch("dense3", {4, 1, 1});
  const ModelWeights<double> weights = zero_weights<double>(spec);
  Batch<double> batch;
  batch.n = 1;
  batch.shape = {3, 1, 1};
  batch.x = {0.0, 0.0, 0.0};
  batch.y = {0};
  CHECK_THROWS_AS(forward(spec, weights, batch), Error);
}

TEST_CASE("dense layer on unflattened input is rejected at finalize") {
  CHECK_THROWS_AS(parse_arch("conv4k3,dense5", {1, 6, 6}), Error);
}

TEST_CASE("weights blob round trip") {
  const ModelSpec spec = parse_arch("conv3k3,pool2,flatten,dense4", {1, 6, 6});
  const ModelWeights<float> weights = glorot_init<float>(spec, 44);
  save_weights("weights_roundtrip.bin", spec, weights);
  const auto [spec2, loaded] = load_weights<float>("weights_roundtrip.bin");
  CHECK(spec2.arch_string() == spec.arch_string());
  CHECK(spec2.input == spec.input);
  CHECK(loaded == weights);
  // dtype is checked strictly.
  CHECK_THROWS_AS(load_weights<double>("weights_roundtrip.bin"), Error);
  std::remove("weights_roundtrip.bin");
}
