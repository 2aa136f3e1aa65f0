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

#include "cfd/codes/mask_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "cfd/codes/cwc.hpp"
#include "cfd/codes/gold.hpp"
#include "cfd/rng.hpp"

namespace cfd {

const char* code_variant_name(CodeVariant v) {
  switch (v) {
    case CodeVariant::RandomSame: return "random_same";
    case CodeVariant::RandomDistinct: return "random_distinct";
    case CodeVariant::Gold: return "gold";
    case CodeVariant::Cwc: return "cwc";
  }
  return "unknown";
}

CodeVariant code_variant_from_name(const std::string& name) {
  if (name == "random_same") return CodeVariant::RandomSame;
  if (name == "random_distinct") return CodeVariant::RandomDistinct;
  if (name == "gold") return CodeVariant::Gold;
  if (name == "cwc") return CodeVariant::Cwc;
  fail(ErrorCode::ParseError, "unknown code strategy '" + name + "'");
}

void MaskMatrix::validate(int min_rows) const {
  require(static_cast<int>(rows.size()) >= min_rows,
          ErrorCode::StrategyInfeasible,
          "mask matrix has fewer rows than clients per round");
  for (const BitSeq& r : rows) {
    require(static_cast<int>(r.size()) == layer_width,
            ErrorCode::MaskShapeMismatch, "mask row length != layer width");
    require(hamming_weight(r) == keep_weight, ErrorCode::MaskShapeMismatch,
            "mask row weight != keep weight");
  }
}

namespace {

int keep_weight_for(int layer_width, double alpha) {
  const double keep = (1.0 - alpha) * layer_width;
  const int w = static_cast<int>(std::lround(keep));
  require(std::abs(keep - w) < 1e-9, ErrorCode::StrategyInfeasible,
          "(1 - alpha) * layer width is not an integer");
  require(w >= 1 && w <= layer_width, ErrorCode::StrategyInfeasible,
          "keep weight out of range");
  return w;
}

BitSeq random_weighted_word(int length, int weight, Rng& rng) {
  BitSeq w(static_cast<size_t>(length), 0);
  std::fill(w.begin(), w.begin() + weight, 1);
  rng.shuffle(w);
  return w;
}

std::vector<BitSeq> gold_rows(int layer_width, int clients, uint64_t seed) {
  int degree = 0;
  for (int n = 2; n <= 30; ++n) {
    if ((1 << n) == layer_width) {
      degree = n;
      break;
    }
  }
  require(degree > 0, ErrorCode::StrategyInfeasible,
          "Gold masks need a power-of-two layer width");
  auto pair = preferred_pair(degree);
  require(pair.has_value(), ErrorCode::StrategyInfeasible,
          "no preferred polynomial pair for degree " + std::to_string(degree));

  const auto family = gold_family(pair->first, pair->second);
  const int balanced_weight = 1 << (degree - 1);

  std::vector<BitSeq> base;
  for (const BitSeq& s : family) {
    if (hamming_weight(s) == balanced_weight)
      base.push_back(
          pad_after_longest_zero_run(s, static_cast<size_t>(layer_width)));
  }
  require(!base.empty(), ErrorCode::StrategyInfeasible,
          "Gold family has no balanced members");

  std::vector<BitSeq> rows = base;
  std::set<std::string> seen;
  for (const BitSeq& r : rows) seen.insert(to_string(r));

  // More clients than balanced members: column-shuffled copies of the base
  // matrix supply additional distinct rows.
  uint64_t attempt = 0;
  while (static_cast<int>(rows.size()) < clients) {
    Rng rng(derive_seed(seed, "gold_columns", attempt++));
    require(attempt < 10'000, ErrorCode::StrategyInfeasible,
            "could not produce enough distinct Gold rows");
    std::vector<int> perm(static_cast<size_t>(layer_width));
    std::iota(perm.begin(), perm.end(), 0);
    rng.shuffle(perm);
    for (const BitSeq& r : base) {
      BitSeq s(r.size());
      for (size_t j = 0; j < r.size(); ++j)
        s[j] = r[static_cast<size_t>(perm[j])];
      if (seen.insert(to_string(s)).second) {
        rows.push_back(std::move(s));
        if (static_cast<int>(rows.size()) == clients) break;
      }
    }
  }
  // Excess balanced members stay in the matrix; per-round row shuffles
  // rotate them into use.
  return rows;
}

}  // namespace

MaskMatrix build_mask_matrix(const CodeStrategy& strategy, int layer_width,
                             int clients, double alpha,
                             uint64_t cwc_max_iters) {
  require(layer_width >= 1, ErrorCode::StrategyInfeasible,
          "layer width must be positive");
  require(clients >= 1, ErrorCode::StrategyInfeasible,
          "need at least one client");
  require(alpha >= 0.0 && alpha < 1.0, ErrorCode::StrategyInfeasible,
          "alpha must lie in [0, 1)");

  MaskMatrix m;
  m.layer_width = layer_width;
  m.alpha = alpha;
  m.variant = strategy.variant;
  m.seed = strategy.seed;

  // No dropout: every client keeps every unit, codes are irrelevant.
  if (alpha == 0.0) {
    m.keep_weight = layer_width;
    m.rows.assign(static_cast<size_t>(clients),
                  BitSeq(static_cast<size_t>(layer_width), 1));
    m.validate(clients);
    return m;
  }

  m.keep_weight = keep_weight_for(layer_width, alpha);

  switch (strategy.variant) {
    case CodeVariant::RandomSame: {
      Rng rng(derive_seed(strategy.seed, "random_same"));
      BitSeq row = random_weighted_word(layer_width, m.keep_weight, rng);
      m.rows.assign(static_cast<size_t>(clients), row);
      break;
    }
    case CodeVariant::RandomDistinct: {
      Rng rng(derive_seed(strategy.seed, "random_distinct"));
      for (int k = 0; k < clients; ++k)
        m.rows.push_back(random_weighted_word(layer_width, m.keep_weight, rng));
      break;
    }
    case CodeVariant::Gold: {
      require(std::abs(alpha - 0.5) < 1e-12, ErrorCode::StrategyInfeasible,
              "Gold masks support only alpha = 0.5");
      m.rows = gold_rows(layer_width, clients, strategy.seed);
      break;
    }
    case CodeVariant::Cwc: {
      CwcResult r = cwc_generate(layer_width, clients, alpha,
                                 derive_seed(strategy.seed, "cwc"),
                                 cwc_max_iters);
      m.rows = std::move(r.codewords);
      m.achieved_min_distance = r.achieved_min_distance;
      break;
    }
  }
  m.validate(clients);
  return m;
}

long long mask_max_cross_correlation(const MaskMatrix& m) {
  return max_cross_correlation_scan(m.rows);
}

int mask_min_pairwise_distance(const MaskMatrix& m) {
  if (m.rows.size() < 2) return m.layer_width;
  int best = m.layer_width + 1;
  for (size_t a = 0; a + 1 < m.rows.size(); ++a)
    for (size_t b = a + 1; b < m.rows.size(); ++b)
      best = std::min(best, hamming_distance(m.rows[a], m.rows[b]));
  return best;
}

bool mask_rows_identical(const MaskMatrix& m) {
  for (const BitSeq& r : m.rows)
    if (r != m.rows.front()) return false;
  return true;
}

void save_mask_matrix(const std::string& path, const MaskMatrix& m) {
  std::ofstream out(path);
  require(out.good(), ErrorCode::IoError, "cannot open " + path);
  out << m.layer_width << ' ' << m.rows.size() << ' ' << m.alpha << ' '
      << code_variant_name(m.variant) << ' ' << m.seed << '\n';
  for (const BitSeq& r : m.rows) out << to_string(r) << '\n';
  require(out.good(), ErrorCode::IoError, "failed writing " + path);
}

MaskMatrix load_mask_matrix(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), ErrorCode::IoError, "cannot open " + path);
  MaskMatrix m;
  size_t count = 0;
  std::string variant;
  in >> m.layer_width >> count >> m.alpha >> variant >> m.seed;
  require(in.good(), ErrorCode::ParseError, "bad mask matrix header");
  m.variant = code_variant_from_name(variant);
  m.keep_weight = m.alpha == 0.0 ? m.layer_width
                                 : keep_weight_for(m.layer_width, m.alpha);
  std::string line;
  std::getline(in, line);
  for (size_t k = 0; k < count; ++k) {
    require(static_cast<bool>(std::getline(in, line)), ErrorCode::ParseError,
            "mask matrix row count mismatch");
    m.rows.push_back(bitseq_from_string(line));
  }
  m.validate(static_cast<int>(count));
  return m;
}

MaskMatrix shuffle_rows_and_columns(const MaskMatrix& m, uint64_t seed) {
  MaskMatrix out = m;
  Rng rng(derive_seed(seed, "mask_shuffle"));
  std::vector<int> cols(static_cast<size_t>(m.layer_width));
  std::iota(cols.begin(), cols.end(), 0);
  rng.shuffle(cols);
  for (size_t r = 0; r < m.rows.size(); ++r)
    for (size_t j = 0; j < m.rows[r].size(); ++j)
      out.rows[r][j] = m.rows[r][static_cast<size_t>(cols[j])];
  rng.shuffle(out.rows);
  return out;
}

}  // namespace cfd
