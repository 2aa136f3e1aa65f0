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

#include "cfd/codes/bitseq.hpp"
#include "cfd/rng.hpp"

using namespace cfd;

TEST_CASE("hamming weight and distance") {
  CHECK(hamming_weight(bitseq_from_string("10110")) == 3);
  CHECK(hamming_distance(bitseq_from_string("1100"),
                         bitseq_from_string("0011")) == 4);
  const BitSeq u = bitseq_from_string("101101");
  CHECK(hamming_distance(u, u) == 0);
  CHECK_THROWS_AS(hamming_distance(bitseq_from_string("10"),
                                   bitseq_from_string("100")),
                  Error);
  try {
    hamming_distance(bitseq_from_string("10"), bitseq_from_string("100"));
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::LengthMismatch);
  }
}

TEST_CASE("cross correlation at zero shift") {
  const BitSeq u = bitseq_from_string("1001101");
  CHECK(cross_correlation(u, u, 0) == doctest::Approx(1.0));
  CHECK(cross_correlation(u, complement(u), 0) == doctest::Approx(-1.0));
  CHECK(unnormalized_correlation(u, u, 0) == 7);
}

TEST_CASE("cross correlation matches plain +/-1 sum") {
  Rng rng(7);
  for (int iter = 0; iter < 50; ++iter) {
    const size_t len = 3 + rng.next_below(20);
    BitSeq a(len), b(len);
    for (size_t j = 0; j < len; ++j) {
      a[j] = rng.next_below(2);
      b[j] = rng.next_below(2);
    }
    const size_t shift = rng.next_below(len);
    long long expected = 0;
    for (size_t j = 0; j < len; ++j) {
      const int x = a[j] ? 1 : -1;
      const int y = b[(j + shift) % len] ? 1 : -1;
      expected += x * y;
    }
    CHECK(unnormalized_correlation(a, b, shift) == expected);
    CHECK(cross_correlation(a, b, shift) ==
          doctest::Approx(static_cast<double>(expected) /
                          static_cast<double>(len)));
  }
}

TEST_CASE("padding inserts after the first longest zero run") {
  CHECK(pad_after_longest_zero_run(bitseq_from_string("10011"), 6) ==
        bitseq_from_string("100011"));
  CHECK(pad_after_longest_zero_run(bitseq_from_string("111"), 3) ==
        bitseq_from_string("111"));
  // Tie between two runs of length 1: the first one wins.
  CHECK(pad_after_longest_zero_run(bitseq_from_string("10101"), 7) ==
        bitseq_from_string("1000101"));
  // No zeros at all: extend at the end.
  CHECK(pad_after_longest_zero_run(bitseq_from_string("11"), 4) ==
        bitseq_from_string("1100"));
}

TEST_CASE("padding preserves hamming weight") {
  Rng rng(21);
  for (int iter = 0; iter < 100; ++iter) {
    const size_t len = 1 + rng.next_below(40);
    BitSeq u(len);
    for (size_t j = 0; j < len; ++j) u[j] = rng.next_below(2);
    const size_t target = len + rng.next_below(10);
    const BitSeq padded = pad_after_longest_zero_run(u, target);
    CHECK(padded.size() == target);
    CHECK(hamming_weight(padded) == hamming_weight(u));
  }
}

TEST_CASE("packed distance agrees with hamming distance") {
  Rng rng(5);
  for (int iter = 0; iter < 50; ++iter) {
    const size_t len = 1 + rng.next_below(200);
    BitSeq a(len), b(len);
    for (size_t j = 0; j < len; ++j) {
      a[j] = rng.next_below(2);
      b[j] = rng.next_below(2);
    }
    CHECK(packed_distance(pack_bits(a), pack_bits(b)) ==
          hamming_distance(a, b));
  }
}

TEST_CASE("bitseq string round trip") {
  const BitSeq u = bitseq_from_string("0100110");
  CHECK(to_string(u) == "0100110");
  CHECK_THROWS_AS(bitseq_from_string("01x"), Error);
}
