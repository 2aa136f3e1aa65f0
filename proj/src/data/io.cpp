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

#include "cfd/data/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "cfd/rng.hpp"

namespace cfd {

namespace {

constexpr uint32_t kImagesMagic = 0x00000803;
constexpr uint32_t kLabelsMagic = 0x00000801;

uint32_t read_be32(std::ifstream& in, const std::string& path) {
  unsigned char bytes[4];
  in.read(reinterpret_cast<char*>(bytes), 4);
  require(in.good(), ErrorCode::TruncatedFile, path + " ended inside header");
  return (static_cast<uint32_t>(bytes[0]) << 24) |
         (static_cast<uint32_t>(bytes[1]) << 16) |
         (static_cast<uint32_t>(bytes[2]) << 8) | bytes[3];
}

void write_be32(std::ofstream& out, uint32_t v) {
  const unsigned char bytes[4] = {
      static_cast<unsigned char>(v >> 24), static_cast<unsigned char>(v >> 16),
      static_cast<unsigned char>(v >> 8), static_cast<unsigned char>(v)};
  out.write(reinterpret_cast<const char*>(bytes), 4);
}

}  // namespace

Dataset load_idx(const std::string& images_path,
                 const std::string& labels_path) {
  std::ifstream img(images_path, std::ios::binary);
  require(img.good(), ErrorCode::IoError, "cannot open " + images_path);
  require(read_be32(img, images_path) == kImagesMagic, ErrorCode::BadMagic,
          images_path + " is not an IDX image file");
  const uint32_t count = read_be32(img, images_path);
  const uint32_t rows = read_be32(img, images_path);
  const uint32_t cols = read_be32(img, images_path);

  std::ifstream lab(labels_path, std::ios::binary);
  require(lab.good(), ErrorCode::IoError, "cannot open " + labels_path);
  require(read_be32(lab, labels_path) == kLabelsMagic, ErrorCode::BadMagic,
          labels_path + " is not an IDX label file");
  const uint32_t label_count = read_be32(lab, labels_path);
  require(label_count == count, ErrorCode::CountMismatch,
          "image/label record counts differ");

  Dataset data;
  data.shape = {1, static_cast<int>(rows), static_cast<int>(cols)};
  const size_t vol = static_cast<size_t>(rows) * cols;
  std::vector<unsigned char> pixel_buf(vol);
  data.inputs.reserve(static_cast<size_t>(count) * vol);
  data.labels.reserve(count);
  int max_label = 0;
  for (uint32_t i = 0; i < count; ++i) {
    img.read(reinterpret_cast<char*>(pixel_buf.data()),
             static_cast<std::streamsize>(vol));
    require(img.gcount() == static_cast<std::streamsize>(vol),
            ErrorCode::TruncatedFile, images_path + " payload truncated");
    for (unsigned char px : pixel_buf)
      data.inputs.push_back(static_cast<float>(px) / 255.0f);
    char label;
    lab.read(&label, 1);
    require(lab.gcount() == 1, ErrorCode::TruncatedFile,
            labels_path + " payload truncated");
    data.labels.push_back(static_cast<unsigned char>(label));
    max_label = std::max(max_label, data.labels.back());
  }
  data.num_classes = max_label + 1;
  return data;
}

void save_idx(const std::string& images_path, const std::string& labels_path,
              const Dataset& data) {
  require(data.shape.c == 1, ErrorCode::ConfigError,
          "IDX export supports single-channel images");
  std::ofstream img(images_path, std::ios::binary);
  require(img.good(), ErrorCode::IoError, "cannot open " + images_path);
  write_be32(img, kImagesMagic);
  write_be32(img, static_cast<uint32_t>(data.size()));
  write_be32(img, static_cast<uint32_t>(data.shape.h));
  write_be32(img, static_cast<uint32_t>(data.shape.w));
  for (float v : data.inputs) {
    const int px = static_cast<int>(std::lround(v * 255.0f));
    const unsigned char byte =
        static_cast<unsigned char>(std::clamp(px, 0, 255));
    img.write(reinterpret_cast<const char*>(&byte), 1);
  }
  require(img.good(), ErrorCode::IoError, "failed writing " + images_path);

  std::ofstream lab(labels_path, std::ios::binary);
  require(lab.good(), ErrorCode::IoError, "cannot open " + labels_path);
  write_be32(lab, kLabelsMagic);
  write_be32(lab, static_cast<uint32_t>(data.size()));
  for (int label : data.labels) {
    const unsigned char byte = static_cast<unsigned char>(label);
    lab.write(reinterpret_cast<const char*>(&byte), 1);
  }
  require(lab.good(), ErrorCode::IoError, "failed writing " + labels_path);
}

Dataset synthesize(int classes, int samples_per_class, int side, uint64_t seed,
                   double separation, double noise_sigma) {
  require(classes >= 2, ErrorCode::ConfigError, "need at least two classes");
  require(samples_per_class >= 1 && side >= 1, ErrorCode::ConfigError,
          "samples per class and image side must be positive");

  Dataset data;
  data.shape = {1, side, side};
  data.num_classes = classes;
  const int vol = side * side;

  Rng rng(derive_seed(seed, "synth"));
  std::vector<float> centers(static_cast<size_t>(classes) * vol);
  for (float& c : centers)
    c = static_cast<float>(0.5 + separation * rng.next_double(-0.3, 0.3));

  // Interleave classes so any contiguous slice stays roughly balanced.
  for (int i = 0; i < samples_per_class; ++i) {
    for (int label = 0; label < classes; ++label) {
      const float* center =
          centers.data() + static_cast<size_t>(label) * vol;
      for (int j = 0; j < vol; ++j) {
        const double v = center[j] + noise_sigma * rng.next_gaussian();
        data.inputs.push_back(static_cast<float>(std::clamp(v, 0.0, 1.0)));
      }
      data.labels.push_back(label);
    }
  }
  return data;
}

std::vector<ClientDataset> partition(const Dataset& data,
                                     const PartitionSpec& spec) {
  const int total = spec.total_clients;
  require(total >= 1, ErrorCode::ConfigError, "need at least one client");
  require(data.size() >= static_cast<size_t>(total), ErrorCode::TooFewSamples,
          "fewer samples than clients");

  const int n = static_cast<int>(data.size());
  std::vector<ClientDataset> parts(static_cast<size_t>(total));
  for (int c = 0; c < total; ++c) parts[static_cast<size_t>(c)].client_id = c;

  std::vector<int> order(static_cast<size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  Rng rng(derive_seed(spec.seed, "partition"));

  if (spec.scheme == PartitionScheme::Iid) {
    rng.shuffle(order);
    for (int i = 0; i < n; ++i)
      parts[static_cast<size_t>(i % total)].indices.push_back(
          order[static_cast<size_t>(i)]);
    return parts;
  }

  // LabelSkew: label-sorted shards dealt to clients, shards_per_client
  // shards each (a shuffled shard deal keeps the skew but varies which
  // labels a client sees).
  require(spec.shards_per_client >= 1, ErrorCode::ConfigError,
          "shards per client must be positive");
  const int shards = total * spec.shards_per_client;
  require(shards <= n, ErrorCode::TooFewSamples,
          "more shards than samples");
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return data.labels[static_cast<size_t>(a)] <
           data.labels[static_cast<size_t>(b)];
  });
  std::vector<int> shard_ids(static_cast<size_t>(shards));
  std::iota(shard_ids.begin(), shard_ids.end(), 0);
  rng.shuffle(shard_ids);
  for (int s = 0; s < shards; ++s) {
    const int client = s / spec.shards_per_client;
    const int shard = shard_ids[static_cast<size_t>(s)];
    const int begin = static_cast<int>(
        static_cast<long long>(shard) * n / shards);
    const int end = static_cast<int>(
        static_cast<long long>(shard + 1) * n / shards);
    for (int i = begin; i < end; ++i)
      parts[static_cast<size_t>(client)].indices.push_back(
          order[static_cast<size_t>(i)]);
  }
  for (const ClientDataset& c : parts)
    require(!c.indices.empty(), ErrorCode::TooFewSamples,
            "a client received no samples");
  return parts;
}

}  // namespace cfd
