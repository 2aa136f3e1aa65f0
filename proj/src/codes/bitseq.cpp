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

#include "cfd/codes/bitseq.hpp"

#include <bit>

namespace cfd {

int hamming_weight(const BitSeq& u) {
  int w = 0;
  for (uint8_t b : u) w += b;
  return w;
}

int hamming_distance(const BitSeq& u1, const BitSeq& u2) {
  require(u1.size() == u2.size(), ErrorCode::LengthMismatch,
          "hamming_distance over sequences of length " +
              std::to_string(u1.size()) + " and " + std::to_string(u2.size()));
  int d = 0;
  for (size_t j = 0; j < u1.size(); ++j) d += u1[j] ^ u2[j];
  return d;
}

BitSeq complement(const BitSeq& u) {
  BitSeq r(u.size());
  for (size_t j = 0; j < u.size(); ++j) r[j] = u[j] ^ 1;
  return r;
}

BitSeq rotate(const BitSeq& u, size_t shift) {
  const size_t n = u.size();
  if (n == 0) return u;
  shift %= n;
  BitSeq r(n);
  for (size_t j = 0; j < n; ++j) r[j] = u[(j + shift) % n];
  return r;
}

long long unnormalized_correlation(const BitSeq& u1, const BitSeq& u2,
                                   size_t shift) {
  require(u1.size() == u2.size(), ErrorCode::LengthMismatch,
          "cross_correlation over sequences of length " +
              std::to_string(u1.size()) + " and " + std::to_string(u2.size()));
  const size_t n = u1.size();
  // agreements minus disagreements: L - 2 * d_h(u1, rot(u2))
  int d = 0;
  for (size_t j = 0; j < n; ++j) d += u1[j] ^ u2[(j + shift) % n];
  return static_cast<long long>(n) - 2ll * d;
}

double cross_correlation(const BitSeq& u1, const BitSeq& u2, size_t shift) {
  return static_cast<double>(unnormalized_correlation(u1, u2, shift)) /
         static_cast<double>(u1.size());
}

BitSeq pad_after_longest_zero_run(const BitSeq& u, size_t target_len) {
  require(target_len >= u.size(), ErrorCode::LengthMismatch,
          "pad target shorter than sequence");
  if (target_len == u.size()) return u;

  size_t best_start = u.size(), best_len = 0;
  size_t j = 0;
  while (j < u.size()) {
    if (u[j] == 0) {
      size_t start = j;
      while (j < u.size() && u[j] == 0) ++j;
      if (j - start > best_len) {
        best_len = j - start;
        best_start = start;
      }
    } else {
      ++j;
    }
  }

  // All-ones sequences have no zero run; extend at the end.
  const size_t insert_at = best_len == 0 ? u.size() : best_start + best_len;

  BitSeq r;
  r.reserve(target_len);
  r.insert(r.end(), u.begin(), u.begin() + insert_at);
  r.insert(r.end(), target_len - u.size(), 0);
  r.insert(r.end(), u.begin() + insert_at, u.end());
  return r;
}

std::string to_string(const BitSeq& u) {
  std::string s(u.size(), '0');
  for (size_t j = 0; j < u.size(); ++j)
    if (u[j]) s[j] = '1';
  return s;
}

BitSeq bitseq_from_string(const std::string& s) {
  BitSeq u(s.size());
  for (size_t j = 0; j < s.size(); ++j) {
    require(s[j] == '0' || s[j] == '1', ErrorCode::ParseError,
            "bit sequence may contain only '0'/'1'");
    u[j] = s[j] == '1';
  }
  return u;
}

std::vector<uint64_t> pack_bits(const BitSeq& u) {
  std::vector<uint64_t> w((u.size() + 63) / 64, 0);
  for (size_t j = 0; j < u.size(); ++j)
    if (u[j]) w[j / 64] |= 1ull << (j % 64);
  return w;
}

int packed_distance(const std::vector<uint64_t>& a,
                    const std::vector<uint64_t>& b) {
  int d = 0;
  for (size_t j = 0; j < a.size(); ++j) d += std::popcount(a[j] ^ b[j]);
  return d;
}

}  // namespace cfd
