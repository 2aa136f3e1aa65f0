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

#ifndef CFD_CODES_CWC_HPP
#define CFD_CODES_CWC_HPP

#include <cstdint>
#include <vector>

#include "cfd/codes/bitseq.hpp"

namespace cfd {

struct CwcResult {
  std::vector<BitSeq> codewords;
  int achieved_min_distance = 0;
};

// Constant weight code construction: M codewords of length width and
// weight (1 - alpha) * width whose pairwise Hamming distance is maximized
// greedily. Starting from the largest distance floor, a seeded random
// codeword is drawn and words meeting the floor are added in lexicographic
// order; when the floor cannot be met the floor drops by 2 and the set is
// rebuilt from a fresh random start. Each floor gets a budget of max_iters
// candidate visits. Throws Infeasible when no floor down to 2 yields M
// codewords.
CwcResult cwc_generate(int width, int count, double alpha, uint64_t seed,
                       uint64_t max_iters = 1'000'000);

// Iterates weight-w words of the given length in ascending lexicographic
// order (index 0 most significant). Used by the generator; exposed for
// exhaustive test oracles at small sizes.
class WeightedWordCursor {
 public:
  WeightedWordCursor(int length, int weight);

  const BitSeq& word() const { return word_; }
  const std::vector<uint64_t>& packed() const { return packed_; }
  bool exhausted() const { return exhausted_; }
  void advance();

 private:
  void set_bit(int significance, bool value);

  int length_;
  int weight_;
  bool exhausted_ = false;
  std::vector<int> ones_;  // significances of the one bits, ascending
  BitSeq word_;
  std::vector<uint64_t> packed_;
};

}  // namespace cfd

#endif  // CFD_CODES_CWC_HPP
