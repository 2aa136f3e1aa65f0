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

#ifndef CFD_CODES_MASK_MATRIX_HPP
#define CFD_CODES_MASK_MATRIX_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "cfd/codes/bitseq.hpp"

namespace cfd {

enum class CodeVariant { RandomSame, RandomDistinct, Gold, Cwc };

const char* code_variant_name(CodeVariant v);
CodeVariant code_variant_from_name(const std::string& name);

struct CodeStrategy {
  CodeVariant variant = CodeVariant::RandomSame;
  uint64_t seed = 0;
};

// Per-layer codeword matrix: row k is the keep/drop mask of the client
// bound to slot k. Every row has length layer_width and Hamming weight
// keep_weight, and there are at least as many rows as clients per round.
struct MaskMatrix {
  int layer_width = 0;
  int keep_weight = 0;
  double alpha = 0.0;
  CodeVariant variant = CodeVariant::RandomSame;
  uint64_t seed = 0;
  std::vector<BitSeq> rows;

  // CWC only: the distance floor the construction achieved.
  int achieved_min_distance = 0;

  void validate(int min_rows) const;
};

// Builds the matrix for one layer. RandomSame duplicates a single random
// codeword, RandomDistinct draws one per client, Gold selects balanced
// family members padded to the layer width (with column-shuffled copies
// when more rows are needed than balanced members exist), and Cwc runs the
// constant weight construction. alpha = 0 always yields all-ones rows.
MaskMatrix build_mask_matrix(const CodeStrategy& strategy, int layer_width,
                             int clients, double alpha,
                             uint64_t cwc_max_iters = 1'000'000);

// Row-level metrics for generation reports.
long long mask_max_cross_correlation(const MaskMatrix& m);
int mask_min_pairwise_distance(const MaskMatrix& m);
bool mask_rows_identical(const MaskMatrix& m);

// Plain-text interchange: header "N_i M alpha strategy seed", then one row
// of '0'/'1' characters per line.
void save_mask_matrix(const std::string& path, const MaskMatrix& m);
MaskMatrix load_mask_matrix(const std::string& path);

// Applies seeded row and column permutations; weights are preserved. Used
// to reuse expensive matrices across rounds.
MaskMatrix shuffle_rows_and_columns(const MaskMatrix& m, uint64_t seed);

}  // namespace cfd

#endif  // CFD_CODES_MASK_MATRIX_HPP
