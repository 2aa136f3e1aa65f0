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

#include "cfd/codes/cwc.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "cfd/rng.hpp"

namespace cfd {

WeightedWordCursor::WeightedWordCursor(int length, int weight)
    : length_(length), weight_(weight) {
  require(length >= 1 && weight >= 0 && weight <= length,
          ErrorCode::ConfigError, "invalid cursor length/weight");
  ones_.resize(static_cast<size_t>(weight));
  word_.assign(static_cast<size_t>(length), 0);
  packed_.assign(static_cast<size_t>((length + 63) / 64), 0);
  // Lexicographically smallest word: all ones at the tail.
  for (int i = 0; i < weight; ++i) {
    ones_[static_cast<size_t>(i)] = i;
    set_bit(i, true);
  }
}

void WeightedWordCursor::set_bit(int significance, bool value) {
  const int idx = length_ - 1 - significance;
  word_[static_cast<size_t>(idx)] = value ? 1 : 0;
  const uint64_t bit = 1ull << (idx % 64);
  if (value)
    packed_[static_cast<size_t>(idx / 64)] |= bit;
  else
    packed_[static_cast<size_t>(idx / 64)] &= ~bit;
}

void WeightedWordCursor::advance() {
  if (exhausted_) return;
  const int w = weight_;
  // Smallest j whose one bit can move one significance up.
  int j = -1;
  for (int i = 0; i < w; ++i) {
    const int next = ones_[static_cast<size_t>(i)] + 1;
    const bool blocked =
        (i + 1 < w) ? (ones_[static_cast<size_t>(i + 1)] == next)
                    : (next >= length_);
    if (!blocked) {
      j = i;
      break;
    }
  }
  if (j < 0 || (weight_ == 0)) {
    exhausted_ = true;
    return;
  }
  set_bit(ones_[static_cast<size_t>(j)], false);
  ones_[static_cast<size_t>(j)] += 1;
  set_bit(ones_[static_cast<size_t>(j)], true);
  // Bits below j collapse back to the lowest significances.
  for (int i = 0; i < j; ++i) {
    if (ones_[static_cast<size_t>(i)] != i) {
      set_bit(ones_[static_cast<size_t>(i)], false);
      ones_[static_cast<size_t>(i)] = i;
      set_bit(i, true);
    }
  }
}

namespace {

// C(n, k), saturating well above any practical client count.
double binomial_approx(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) {
    r *= static_cast<double>(n - k + i) / static_cast<double>(i);
    if (r > 1e18) return 1e18;
  }
  return r;
}

BitSeq random_weighted_word(int length, int weight, Rng& rng) {
  BitSeq w(static_cast<size_t>(length), 0);
  std::fill(w.begin(), w.begin() + weight, 1);
  rng.shuffle(w);
  return w;
}

bool meets_floor(const std::vector<uint64_t>& candidate,
                 const std::vector<std::vector<uint64_t>>& chosen,
                 int d_floor) {
  for (const auto& c : chosen) {
    int d = 0;
    for (size_t k = 0; k < c.size(); ++k) {
      d += std::popcount(candidate[k] ^ c[k]);
      if (d >= d_floor) break;
    }
    if (d < d_floor) return false;
  }
  return true;
}

}  // namespace

CwcResult cwc_generate(int width, int count, double alpha, uint64_t seed,
                       uint64_t max_iters) {
  const double keep = (1.0 - alpha) * width;
  const int weight = static_cast<int>(std::lround(keep));
  require(std::abs(keep - weight) < 1e-9, ErrorCode::ConfigError,
          "(1 - alpha) * width must be an integer");
  require(weight >= 1 && weight <= width, ErrorCode::ConfigError,
          "codeword weight out of range");
  require(count >= 1, ErrorCode::ConfigError, "need at least one codeword");
  require(static_cast<double>(count) <= binomial_approx(width, weight),
          ErrorCode::Infeasible,
          "more codewords requested than weight-w words exist");

  Rng rng(seed);
  for (int d_floor = width; d_floor >= 2; d_floor -= 2) {
    std::vector<BitSeq> chosen;
    std::vector<std::vector<uint64_t>> chosen_packed;
    chosen.push_back(random_weighted_word(width, weight, rng));
    chosen_packed.push_back(pack_bits(chosen.back()));
    if (static_cast<int>(chosen.size()) == count)
      return {std::move(chosen), d_floor};

    WeightedWordCursor cursor(width, weight);
    uint64_t visits = 0;
    while (!cursor.exhausted() && visits < max_iters) {
      ++visits;
      if (meets_floor(cursor.packed(), chosen_packed, d_floor)) {
        chosen.push_back(cursor.word());
        chosen_packed.push_back(cursor.packed());
        if (static_cast<int>(chosen.size()) == count)
          return {std::move(chosen), d_floor};
      }
      cursor.advance();
    }
  }
  fail(ErrorCode::Infeasible,
       "no codeword set of size " + std::to_string(count) +
           " found down to distance 2");
}

}  // namespace cfd
