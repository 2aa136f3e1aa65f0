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

#ifndef CFD_CODES_GOLD_HPP
#define CFD_CODES_GOLD_HPP

#include <optional>
#include <set>
#include <vector>

#include "cfd/codes/bitseq.hpp"

namespace cfd {

// Fibonacci LFSR description. The feedback polynomial is
//   1 + sum_{e in taps} x^e
// with the constant term implied; taps must contain the degree itself.
// initial_state holds (s_0 ... s_{degree-1}) and must not be all zero.
struct LfsrSpec {
  int degree = 0;
  std::set<int> taps;
  BitSeq initial_state;

  static LfsrSpec with_default_state(int degree, std::set<int> taps);
  void validate() const;
};

// One full period of the LFSR output, length 2^degree - 1. Throws
// NonPrimitivePolynomial when the observed period is shorter.
BitSeq lfsr_m_sequence(const LfsrSpec& spec);

// The Gold family built from two m-sequences of equal degree n: the two
// sequences themselves plus u xor rotate(v, l) for every shift l, giving
// 2^n + 1 sequences of length 2^n - 1. Degrees divisible by 4 have no
// preferred pairs and are rejected.
std::vector<BitSeq> gold_family(const LfsrSpec& poly1, const LfsrSpec& poly2);

// Preferred feedback polynomial pair for a supported degree (5, 6, 7, 9,
// 10, 11), with canonical initial states. Empty when unsupported.
std::optional<std::pair<LfsrSpec, LfsrSpec>> preferred_pair(int degree);

// Largest |unnormalized correlation| over all distinct sequence pairs and
// all shifts. Exhaustive scan, parallelized over pairs.
long long max_cross_correlation_scan(const std::vector<BitSeq>& family);

// Classical Gold bound on that maximum: 2^floor((n+2)/2) + 1.
long long gold_correlation_bound(int degree);

}  // namespace cfd

#endif  // CFD_CODES_GOLD_HPP
