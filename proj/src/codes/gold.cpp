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

#include "cfd/codes/gold.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

namespace cfd {

LfsrSpec LfsrSpec::with_default_state(int degree, std::set<int> taps) {
  LfsrSpec spec;
  spec.degree = degree;
  spec.taps = std::move(taps);
  spec.initial_state.assign(static_cast<size_t>(degree), 0);
  spec.initial_state.back() = 1;
  return spec;
}

void LfsrSpec::validate() const {
  require(degree >= 2, ErrorCode::ConfigError, "LFSR degree must be >= 2");
  require(!taps.empty() && *taps.rbegin() == degree, ErrorCode::ConfigError,
          "feedback polynomial must have degree equal to the LFSR degree");
  require(*taps.begin() >= 1, ErrorCode::ConfigError,
          "tap exponents must be >= 1");
  require(initial_state.size() == static_cast<size_t>(degree),
          ErrorCode::ConfigError, "initial state length must equal degree");
  require(hamming_weight(initial_state) > 0, ErrorCode::ConfigError,
          "all-zero LFSR state is a fixed point");
}

BitSeq lfsr_m_sequence(const LfsrSpec& spec) {
  spec.validate();
  const int n = spec.degree;
  const size_t period = (1ull << n) - 1;

  // s_{t+n} = s_t xor sum of s_{t+e} over non-degree taps.
  std::vector<int> lower_taps;
  for (int e : spec.taps)
    if (e != n) lower_taps.push_back(e);

  BitSeq state = spec.initial_state;
  BitSeq out;
  out.reserve(period);
  for (size_t t = 0; t < period; ++t) {
    out.push_back(state[0]);
    uint8_t fb = state[0];
    for (int e : lower_taps) fb ^= state[static_cast<size_t>(e)];
    state.erase(state.begin());
    state.push_back(fb);
    // An early return to the initial state means a shorter period.
    if (t + 1 < period && state == spec.initial_state)
      fail(ErrorCode::NonPrimitivePolynomial,
           "LFSR period " + std::to_string(t + 1) + " != " +
               std::to_string(period));
  }
  require(state == spec.initial_state, ErrorCode::NonPrimitivePolynomial,
          "LFSR state did not return after 2^n - 1 steps");
  return out;
}

std::vector<BitSeq> gold_family(const LfsrSpec& poly1, const LfsrSpec& poly2) {
  require(poly1.degree == poly2.degree, ErrorCode::DegreeMismatch,
          "Gold pair degrees differ");
  require(poly1.degree % 4 != 0, ErrorCode::UnsupportedDegree,
          "no preferred pairs exist for degrees divisible by 4");

  const BitSeq u = lfsr_m_sequence(poly1);
  const BitSeq v = lfsr_m_sequence(poly2);
  const size_t len = u.size();

  std::vector<BitSeq> family;
  family.reserve(len + 2);
  family.push_back(u);
  family.push_back(v);
  for (size_t shift = 0; shift < len; ++shift) {
    BitSeq w(len);
    for (size_t j = 0; j < len; ++j) w[j] = u[j] ^ v[(j + shift) % len];
    family.push_back(std::move(w));
  }
  return family;
}

std::optional<std::pair<LfsrSpec, LfsrSpec>> preferred_pair(int degree) {
  // Preferred pairs per degree. The degree-6 partner of
  // 1 + x + x^2 + x^5 + x^6 is 1 + x + x^6 (x^6 + 1 alone is not primitive:
  // its LFSR has period 6).
  switch (degree) {
    case 5:
      return std::make_pair(LfsrSpec::with_default_state(5, {2, 5}),
                            LfsrSpec::with_default_state(5, {2, 3, 4, 5}));
    case 6:
      return std::make_pair(LfsrSpec::with_default_state(6, {1, 6}),
                            LfsrSpec::with_default_state(6, {1, 2, 5, 6}));
    case 7:
      return std::make_pair(LfsrSpec::with_default_state(7, {3, 7}),
                            LfsrSpec::with_default_state(7, {1, 2, 3, 7}));
    case 9:
      return std::make_pair(LfsrSpec::with_default_state(9, {4, 9}),
                            LfsrSpec::with_default_state(9, {3, 4, 6, 9}));
    case 10:
      return std::make_pair(LfsrSpec::with_default_state(10, {3, 10}),
                            LfsrSpec::with_default_state(10, {2, 3, 8, 10}));
    case 11:
      return std::make_pair(LfsrSpec::with_default_state(11, {2, 5, 8, 11}),
                            LfsrSpec::with_default_state(11, {2, 11}));
    default:
      return std::nullopt;
  }
}

long long max_cross_correlation_scan(const std::vector<BitSeq>& family) {
  if (family.size() < 2) return 0;
  const long long count = static_cast<long long>(family.size());
  const size_t len = family.front().size();

  // +/-1 mapping, doubled to drop the modulo in the inner loop.
  std::vector<std::vector<int16_t>> pm(family.size());
  for (size_t i = 0; i < family.size(); ++i) {
    require(family[i].size() == len, ErrorCode::LengthMismatch,
            "family members of unequal length");
    pm[i].resize(2 * len);
    for (size_t j = 0; j < len; ++j) {
      int16_t s = family[i][j] ? 1 : -1;
      pm[i][j] = s;
      pm[i][j + len] = s;
    }
  }

  long long best = 0;
#pragma omp parallel for schedule(dynamic) reduction(max : best)
  for (long long a = 0; a < count - 1; ++a) {
    for (long long b = a + 1; b < count; ++b) {
      const int16_t* ua = pm[static_cast<size_t>(a)].data();
      const int16_t* ub = pm[static_cast<size_t>(b)].data();
      for (size_t shift = 0; shift < len; ++shift) {
        long long sum = 0;
        const int16_t* ubs = ub + shift;
        for (size_t j = 0; j < len; ++j) sum += ua[j] * ubs[j];
        best = std::max(best, std::llabs(sum));
      }
    }
  }
  return best;
}

long long gold_correlation_bound(int degree) {
  return (1ll << ((degree + 2) / 2)) + 1;
}

}  // namespace cfd
