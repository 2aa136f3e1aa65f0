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

#ifndef CFD_DATA_IO_HPP
#define CFD_DATA_IO_HPP

#include <cstdint>
#include <string>

#include "cfd/data/dataset.hpp"

namespace cfd {

// IDX image/label pair (big-endian magic 0x00000803 / 0x00000801). Pixels
// are bytes and land in [0, 1] after division by 255.
Dataset load_idx(const std::string& images_path, const std::string& labels_path);

// Writes a dataset as an IDX pair; inputs are quantized to round(v * 255).
void save_idx(const std::string& images_path, const std::string& labels_path,
              const Dataset& data);

// Gaussian class clusters on a (1, side, side) grid. Class centers are
// drawn per pixel in 0.5 +/- 0.3 * separation and samples add
// noise_sigma-scaled noise, clamped to [0, 1]. separation 0 collapses all
// classes onto one center.
Dataset synthesize(int classes, int samples_per_class, int side, uint64_t seed,
                   double separation = 1.0, double noise_sigma = 0.15);

enum class PartitionScheme { Iid, LabelSkew };

struct PartitionSpec {
  PartitionScheme scheme = PartitionScheme::Iid;
  int total_clients = 1;
  int shards_per_client = 2;  // LabelSkew only
  uint64_t seed = 0;
};

// Splits every sample to exactly one client; every client gets at least
// one sample. LabelSkew deals label-sorted shards so each client sees few
// classes.
std::vector<ClientDataset> partition(const Dataset& data,
                                     const PartitionSpec& spec);

}  // namespace cfd

#endif  // CFD_DATA_IO_HPP
