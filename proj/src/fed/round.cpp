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

#include "cfd/fed/round.hpp"

namespace cfd {

std::vector<int> select_clients(uint64_t seed, int round, int total_clients,
                                int clients_per_round) {
  std::vector<int> ids(static_cast<size_t>(total_clients));
  std::iota(ids.begin(), ids.end(), 0);
  Rng rng(derive_seed(seed, "select_clients", static_cast<uint64_t>(round)));
  // Partial Fisher-Yates; the first M slots are the cohort in draw order.
  for (int j = 0; j < clients_per_round; ++j) {
    const size_t pick =
        static_cast<size_t>(j) +
        static_cast<size_t>(rng.next_below(
            static_cast<uint64_t>(total_clients - j)));
    std::swap(ids[static_cast<size_t>(j)], ids[pick]);
  }
  ids.resize(static_cast<size_t>(clients_per_round));
  return ids;
}

std::vector<double> favg_weights(const std::vector<size_t>& sizes) {
  require(!sizes.empty(), ErrorCode::EmptyCohort,
          "favg weights over an empty cohort");
  double total = 0;
  for (size_t s : sizes) {
    require(s > 0, ErrorCode::EmptyDataset, "client dataset is empty");
    total += static_cast<double>(s);
  }
  std::vector<double> p;
  p.reserve(sizes.size());
  for (size_t s : sizes) p.push_back(static_cast<double>(s) / total);
  return p;
}

double median_of(std::vector<double> values) {
  require(!values.empty(), ErrorCode::EmptyCohort, "median of nothing");
  std::sort(values.begin(), values.end());
  const size_t n = values.size();
  if (n % 2 == 1) return values[n / 2];
  return 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

}  // namespace cfd
