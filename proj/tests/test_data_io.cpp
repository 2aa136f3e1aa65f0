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

#include <cstdio>
#include <fstream>
#include <set>

#include "cfd/data/io.hpp"
#include "cfd/nn/train.hpp"

using namespace cfd;

namespace {

struct TempFiles {
  std::vector<std::string> paths;
  ~TempFiles() {
    for (const std::string& p : paths) std::remove(p.c_str());
  }
  const char* add(std::string p) {
    paths.push_back(std::move(p));
    return paths.back().c_str();
  }
};

}  // namespace

TEST_CASE("idx round trip is byte exact") {
  TempFiles tmp;
  Dataset data;
  data.shape = {1, 5, 7};
  data.num_classes = 4;
  Rng rng(6);
  for (int i = 0; i < 23; ++i) {
    for (int j = 0; j < 35; ++j)
      data.inputs.push_back(static_cast<float>(rng.next_below(256)) / 255.0f);
    data.labels.push_back(static_cast<int>(rng.next_below(4)));
  }
  save_idx(tmp.add("t_images.idx"), tmp.add("t_labels.idx"), data);
  const Dataset loaded = load_idx("t_images.idx", "t_labels.idx");
  CHECK(loaded.shape == data.shape);
  CHECK(loaded.labels == data.labels);
  REQUIRE(loaded.inputs.size() == data.inputs.size());
  for (size_t j = 0; j < data.inputs.size(); ++j)
    CHECK(loaded.inputs[j] == data.inputs[j]);
  for (float v : loaded.inputs) {
    CHECK(v >= 0.0f);
    CHECK(v <= 1.0f);
  }
}

TEST_CASE("idx loader rejects wrong magic, truncation and count mismatch") {
  TempFiles tmp;
  Dataset data;
  data.shape = {1, 3, 3};
  data.num_classes = 2;
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 9; ++j) data.inputs.push_back(0.5f);
    data.labels.push_back(i % 2);
  }
  save_idx(tmp.add("m_images.idx"), tmp.add("m_labels.idx"), data);

  // Labels magic where an image file is expected.
  CHECK_THROWS_AS(load_idx("m_labels.idx", "m_labels.idx"), Error);
  try {
    load_idx("m_labels.idx", "m_labels.idx");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::BadMagic);
  }

  // Truncated payload.
  {
    std::ifstream in("m_images.idx", std::ios::binary);
    std::vector<char> bytes((std::istreambuf_iterator<char>(in)),
                            std::istreambuf_iterator<char>());
    bytes.resize(bytes.size() - 5);
    std::ofstream out(tmp.add("m_trunc.idx"), std::ios::binary);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  }
  try {
    load_idx("m_trunc.idx", "m_labels.idx");
    FAIL("expected TruncatedFile");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::TruncatedFile);
  }

  // Mismatched record counts.
  Dataset shorter = data;
  shorter.inputs.resize(3 * 9);
  shorter.labels.resize(3);
  save_idx(tmp.add("s_images.idx"), tmp.add("s_labels.idx"), shorter);
  try {
    load_idx("m_images.idx", "s_labels.idx");
    FAIL("expected CountMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::CountMismatch);
  }
}

TEST_CASE("synthesis is deterministic and bounded") {
  const Dataset a = synthesize(6, 10, 8, 42);
  const Dataset b = synthesize(6, 10, 8, 42);
  CHECK(a.inputs == b.inputs);
  CHECK(a.labels == b.labels);
  CHECK(a.size() == 60);
  for (float v : a.inputs) {
    CHECK(v >= 0.0f);
    CHECK(v <= 1.0f);
  }
  const Dataset c = synthesize(6, 10, 8, 43);
  CHECK(a.inputs != c.inputs);
}

TEST_CASE("separation 0 collapses class centers") {
  auto class_mean_spread = [](const Dataset& d) {
    const int vol = d.shape.volume();
    std::vector<std::vector<double>> mean(
        static_cast<size_t>(d.num_classes),
        std::vector<double>(static_cast<size_t>(vol), 0.0));
    std::vector<int> count(static_cast<size_t>(d.num_classes), 0);
    for (size_t i = 0; i < d.size(); ++i) {
      const int label = d.labels[i];
      ++count[static_cast<size_t>(label)];
      for (int j = 0; j < vol; ++j)
        mean[static_cast<size_t>(label)][static_cast<size_t>(j)] +=
            d.inputs[i * static_cast<size_t>(vol) + static_cast<size_t>(j)];
    }
    double spread = 0;
    for (int a = 0; a < d.num_classes; ++a)
      for (int b = a + 1; b < d.num_classes; ++b) {
        double dist = 0;
        for (int j = 0; j < vol; ++j) {
          const double va = mean[static_cast<size_t>(a)][static_cast<size_t>(j)] /
                            count[static_cast<size_t>(a)];
          const double vb = mean[static_cast<size_t>(b)][static_cast<size_t>(j)] /
                            count[static_cast<size_t>(b)];
          dist += (va - vb) * (va - vb);
        }
        spread = std::max(spread, std::sqrt(dist));
      }
    return spread;
  };

  const double collapsed = class_mean_spread(synthesize(4, 60, 6, 9, 0.0));
  const double separated = class_mean_spread(synthesize(4, 60, 6, 9, 1.0));
  CHECK(collapsed < 0.2);
  CHECK(separated > 0.8);
}

TEST_CASE("a separable synthetic task is learnable in 50 steps") {
  const Dataset data = synthesize(4, 30, 4, 7, 1.0, 0.08);
  const ModelSpec spec = parse_arch("flatten,dense16,dense4", {1, 4, 4});
  std::vector<int> idx(data.size());
  for (size_t i = 0; i < data.size(); ++i) idx[i] = static_cast<int>(i);
  ModelWeights<double> w = glorot_init<double>(spec, 3);
  for (int step = 0; step < 50; ++step)
    w = sgd_local_train(spec, w, data, idx, 0.25, 1, 120, 1);
  CHECK(training_accuracy(spec, w, data, idx) > 0.95);
}

TEST_CASE("iid partition splits evenly and exhaustively") {
  const Dataset data = synthesize(5, 20, 4, 11);  // 100 samples
  PartitionSpec spec;
  spec.scheme = PartitionScheme::Iid;
  spec.total_clients = 4;
  spec.seed = 1;
  const std::vector<ClientDataset> parts = partition(data, spec);
  REQUIRE(parts.size() == 4);
  std::set<int> seen;
  for (const ClientDataset& c : parts) {
    CHECK(c.indices.size() == 25);
    for (int i : c.indices) CHECK(seen.insert(i).second);
  }
  CHECK(seen.size() == data.size());
}

TEST_CASE("partition is exhaustive and disjoint across schemes and seeds") {
  for (uint64_t seed : {1ull, 2ull, 3ull}) {
    for (PartitionScheme scheme :
         {PartitionScheme::Iid, PartitionScheme::LabelSkew}) {
      Rng rng(seed);
      const int classes = 3 + static_cast<int>(rng.next_below(4));
      const int per_class = 10 + static_cast<int>(rng.next_below(20));
      const Dataset data = synthesize(classes, per_class, 3, seed);
      PartitionSpec spec;
      spec.scheme = scheme;
      spec.total_clients = 2 + static_cast<int>(rng.next_below(5));
      spec.shards_per_client = 1 + static_cast<int>(rng.next_below(3));
      spec.seed = seed * 11;
      const std::vector<ClientDataset> parts = partition(data, spec);
      std::set<int> seen;
      for (const ClientDataset& c : parts) {
        CHECK(!c.indices.empty());
        for (int i : c.indices) CHECK(seen.insert(i).second);
      }
      CHECK(seen.size() == data.size());
    }
  }
}

TEST_CASE("extreme label skew gives single-label clients") {
  const Dataset data = synthesize(4, 25, 3, 17);
  PartitionSpec spec;
  spec.scheme = PartitionScheme::LabelSkew;
  spec.total_clients = 4;
  spec.shards_per_client = 1;
  spec.seed = 5;
  const std::vector<ClientDataset> parts = partition(data, spec);
  for (const ClientDataset& c : parts) {
    std::set<int> labels;
    for (int i : c.indices) labels.insert(data.labels[static_cast<size_t>(i)]);
    CHECK(labels.size() == 1);
  }
}

TEST_CASE("too few samples is rejected") {
  const Dataset data = synthesize(2, 1, 3, 3);  // 2 samples
  PartitionSpec spec;
  spec.total_clients = 5;
  CHECK_THROWS_AS(partition(data, spec), Error);
}
