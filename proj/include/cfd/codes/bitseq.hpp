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

#ifndef CFD_CODES_BITSEQ_HPP
#define CFD_CODES_BITSEQ_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "cfd/error.hpp"

namespace cfd {

// A binary sequence; every element is 0 or 1. Index 0 is the first (most
// significant) symbol for lexicographic purposes.
using BitSeq = std::vector<uint8_t>;

int hamming_weight(const BitSeq& u);

// Number of ones in u1 xor u2. Throws LengthMismatch on unequal lengths.
int hamming_distance(const BitSeq& u1, const BitSeq& u2);

BitSeq complement(const BitSeq& u);

// Left-circular rotation: result[j] = u[(j + shift) mod len].
BitSeq rotate(const BitSeq& u, size_t shift);

// Correlation of the +/-1-mapped sequences (0 -> -1, 1 -> +1) at the given
// shift, without the 1/L normalization. Integer-valued.
long long unnormalized_correlation(const BitSeq& u1, const BitSeq& u2,
                                   size_t shift);

// Same correlation divided by the sequence length.
double cross_correlation(const BitSeq& u1, const BitSeq& u2, size_t shift);

// Inserts zeros immediately after the first longest run of zeros (runs are
// scanned left to right, non-circularly) until the sequence reaches
// target_len. A sequence with no zeros is extended at the end. Hamming
// weight is unchanged; a no-op when target_len equals the current length.
BitSeq pad_after_longest_zero_run(const BitSeq& u, size_t target_len);

std::string to_string(const BitSeq& u);
BitSeq bitseq_from_string(const std::string& s);

// Packs bits into 64-bit words (bit j of word j/64), for fast distance
// scans over large codeword sets.
std::vector<uint64_t> pack_bits(const BitSeq& u);
int packed_distance(const std::vector<uint64_t>& a,
                    const std::vector<uint64_t>& b);

}  // namespace cfd

#endif  // CFD_CODES_BITSEQ_HPP
