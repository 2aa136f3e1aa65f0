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

#include <numeric>

#include "cfd/dropout/dropout.hpp"

using namespace cfd;

namespace {

// input(5) -> dense5 -> dense5 -> dense5 -> dense3; the two middle layers
// are maskable, giving a 5x5 block between them.
ModelSpec chain_spec() { return parse_arch("dense5,dense5,dense5,dense3", {5, 1, 1}); }

ModelWeights<double> numbered_weights(const ModelSpec& spec) {
  ModelWeights<double> w = zero_weights<double>(spec);
  double v = 1.0;
  for (auto& l : w.layers) {
    for (double& x : l.w) x = v++;
    for (double& x : l.b) x = v++;
  }
  return w;
}

}  // namespace

TEST_CASE("maskable layers exclude the first and the last") {
  const ModelSpec spec = emnist62_spec();
  CHECK(maskable_ordinals(spec) == std::vector<int>{1, 2});
  CHECK(maskable_widths(spec) == std::vector<int>{64, 2048});

  const ModelSpec tiny = parse_arch("dense4,dense2", {3, 1, 1});
  CHECK(maskable_ordinals(tiny).empty());
}

TEST_CASE("the 5x5 block keeps exactly 9 of 25 weights") {
  const ModelSpec spec = chain_spec();
  const ModelWeights<double> global = numbered_weights(spec);
  const MaskAssignment a = build_assignment(
      spec, {bitseq_from_string("01011"), bitseq_from_string("10110")});

  const SubModel<double> sub = extract_submodel(spec, global, a);
  // Block between the two masked layers: 3 kept inputs x 3 kept outputs.
  CHECK(sub.weights.layers[2].w.size() == 9);
  CHECK(sub.weights.layers[2].b.size() == 3);
  // Values come from the kept rows {1,3,4} and columns {0,2,3}.
  const LayerParams<double>& g = global.layers[2];
  std::vector<double> expected;
  for (int i : {1, 3, 4})
    for (int j : {0, 2, 3})
      expected.push_back(g.w[static_cast<size_t>(i) * 5 + j]);
  CHECK(sub.weights.layers[2].w == expected);

  // Surrounding blocks shrink on one side only.
  CHECK(sub.weights.layers[1].w.size() == 5 * 3);
  CHECK(sub.weights.layers[3].w.size() == 3 * 3);
  CHECK(sub.spec.out_shapes.back().volume() == 3);
}

TEST_CASE("all-ones masks extract the identical model") {
  const ModelSpec spec = chain_spec();
  const ModelWeights<double> global = numbered_weights(spec);
  const MaskAssignment a = build_assignment(
      spec, {bitseq_from_string("11111"), bitseq_from_string("11111")});
  const SubModel<double> sub = extract_submodel(spec, global, a);
  CHECK(sub.weights == global);
  CHECK(sub.spec.arch_string() == spec.arch_string());

  const EmbeddedDelta<double> e = embed_update(spec, global, a);
  for (size_t ord = 0; ord < e.w_held.size(); ++ord) {
    for (uint8_t h : e.w_held[ord]) CHECK(h == 1);
    for (uint8_t h : e.b_held[ord]) CHECK(h == 1);
  }
}

TEST_CASE("embedding a zero delta marks exactly the kept positions") {
  const ModelSpec spec = chain_spec();
  const MaskAssignment a = build_assignment(
      spec, {bitseq_from_string("01011"), bitseq_from_string("10110")});
  const SubModel<double> sub =
      extract_submodel(spec, zero_weights<double>(spec), a);

  ModelWeights<double> zero_delta = sub.weights;  // all zeros already
  const EmbeddedDelta<double> e = embed_update(spec, zero_delta, a);
  for (size_t ord = 0; ord < e.dw.size(); ++ord)
    for (double v : e.dw[ord]) CHECK(v == 0.0);

  int held = 0;
  for (uint8_t h : e.w_held[2]) held += h;
  CHECK(held == 9);
  int bias_held = 0;
  for (uint8_t h : e.b_held[2]) bias_held += h;
  CHECK(bias_held == 3);
}

TEST_CASE("embed of an extracted delta round-trips through the bitmap") {
  const ModelSpec spec = chain_spec();
  const ModelWeights<double> global = numbered_weights(spec);
  const MaskAssignment a = build_assignment(
      spec, {bitseq_from_string("11010"), bitseq_from_string("01101")});
  const SubModel<double> sub = extract_submodel(spec, global, a);
  const EmbeddedDelta<double> e = embed_update(spec, sub.weights, a);

  // Restricting the embedded values to the bitmap reproduces the original
  // global values at held coordinates.
  for (size_t ord = 0; ord < e.dw.size(); ++ord) {
    for (size_t j = 0; j < e.dw[ord].size(); ++j) {
      if (e.w_held[ord][j])
        CHECK(e.dw[ord][j] == global.layers[ord].w[j]);
      else
        CHECK(e.dw[ord][j] == 0.0);
    }
    for (size_t j = 0; j < e.db[ord].size(); ++j) {
      if (e.b_held[ord][j])
        CHECK(e.db[ord][j] == global.layers[ord].b[j]);
      else
        CHECK(e.db[ord][j] == 0.0);
    }
  }
}

TEST_CASE("conv filter dropout keeps filters and input channels") {
  const ModelSpec spec =
      parse_arch("conv4k3,conv6k3,pool2,flatten,dense3", {1, 8, 8});
  CHECK(maskable_widths(spec) == std::vector<int>{6});
  const ModelWeights<double> global = numbered_weights(spec);
  const MaskAssignment a =
      build_assignment(spec, {bitseq_from_string("101010")});
  const SubModel<double> sub = extract_submodel(spec, global, a);

  // conv6 keeps 3 filters over all 4 input channels.
  CHECK(sub.weights.layers[1].w.size() == 3u * 4u * 9u);
  CHECK(sub.weights.layers[1].b.size() == 3);
  // Dense input shrinks from 6*4*4=96 to 3*4*4=48 flat units.
  CHECK(sub.weights.layers[2].w.size() == 48u * 3u);
  CHECK(sub.spec.out_shapes[1].c == 3);

  // Bias of a dropped filter does not appear in the sub-model.
  CHECK(sub.weights.layers[1].b ==
        std::vector<double>{global.layers[1].b[0], global.layers[1].b[2],
                            global.layers[1].b[4]});
}

TEST_CASE("half masks on a 2048 dense pair keep a quarter of the block") {
  const ModelSpec spec =
      parse_arch("dense2048,dense2048,dense2048,dense10", {16, 1, 1});
  BitSeq half(2048, 0);
  for (size_t j = 0; j < 1024; ++j) half[2 * j] = 1;
  const MaskAssignment a = build_assignment(spec, {half, half});
  const SubModel<float> sub =
      extract_submodel(spec, zero_weights<float>(spec), a);
  CHECK(sub.weights.layers[2].w.size() == 2048u * 2048u / 4u);
}

TEST_CASE("per-block kept fraction is the product of the mask fractions") {
  const ModelSpec spec = parse_arch("dense8,dense6,dense4,dense2", {4, 1, 1});
  const MaskAssignment a = build_assignment(
      spec, {bitseq_from_string("110100"), bitseq_from_string("1010")});
  const SubModel<double> sub =
      extract_submodel(spec, zero_weights<double>(spec), a);
  // Block 1: 8 in x 6 out -> 8 x 3. Block 2: 6 x 4 -> 3 x 2. Block 3: 4 x 2 -> 2 x 2.
  CHECK(sub.weights.layers[1].w.size() == 8u * 3u);
  CHECK(sub.weights.layers[2].w.size() == 3u * 2u);
  CHECK(sub.weights.layers[3].w.size() == 2u * 2u);
}

TEST_CASE("merge over full holders with equal weights is the plain mean") {
  const ModelSpec spec = chain_spec();
  const MaskAssignment full = build_assignment(
      spec, {bitseq_from_string("11111"), bitseq_from_string("11111")});

  ModelWeights<double> d1 = zero_weights<double>(spec);
  ModelWeights<double> d2 = zero_weights<double>(spec);
  Rng rng(3);
  for (auto* d : {&d1, &d2})
    for (auto& l : d->layers) {
      for (double& v : l.w) v = rng.next_double(-1, 1);
      for (double& v : l.b) v = rng.next_double(-1, 1);
    }
  const EmbeddedDelta<double> e1 = embed_update(spec, d1, full);
  const EmbeddedDelta<double> e2 = embed_update(spec, d2, full);
  const ModelWeights<double> merged =
      merge_updates<double>(spec, {{&e1, 0.5}, {&e2, 0.5}});

  ModelWeights<double> expected = zero_weights<double>(spec);
  axpy(expected, 0.5, d1);
  axpy(expected, 0.5, d2);
  CHECK(max_abs_difference(merged, expected) < 1e-12);
}

TEST_CASE("a coordinate held by one client passes through unchanged") {
  const ModelSpec spec = chain_spec();
  const MaskAssignment a1 = build_assignment(
      spec, {bitseq_from_string("11000"), bitseq_from_string("11100")});
  const MaskAssignment a2 = build_assignment(
      spec, {bitseq_from_string("00111"), bitseq_from_string("00011")});

  const SubModel<double> s1 =
      extract_submodel(spec, numbered_weights(spec), a1);
  const SubModel<double> s2 =
      extract_submodel(spec, numbered_weights(spec), a2);
  const EmbeddedDelta<double> e1 = embed_update(spec, s1.weights, a1);
  const EmbeddedDelta<double> e2 = embed_update(spec, s2.weights, a2);
  // Unequal p values must not rescale singleton holders.
  const ModelWeights<double> merged =
      merge_updates<double>(spec, {{&e1, 0.25}, {&e2, 0.75}});

  // Masks on the middle layers are disjoint, so every held coordinate of
  // the middle block has exactly one holder.
  for (size_t j = 0; j < merged.layers[2].w.size(); ++j) {
    if (e1.w_held[2][j]) CHECK(merged.layers[2].w[j] == e1.dw[2][j]);
    if (e2.w_held[2][j]) CHECK(merged.layers[2].w[j] == e2.dw[2][j]);
  }
}

// Two clients with disjoint middle masks and equal weights: the merged
// delta equals the disjoint union. Verified against a coordinate-by-
// coordinate reference loop computing sum(p d)/sum(p) from scratch.
TEST_CASE("disjoint masks merge to the union, matching the scalar oracle") {
  const ModelSpec spec = chain_spec();
  const MaskAssignment a1 = build_assignment(
      spec, {bitseq_from_string("11000"), bitseq_from_string("10100")});
  const MaskAssignment a2 = build_assignment(
      spec, {bitseq_from_string("00110"), bitseq_from_string("01001")});

  ModelWeights<double> global = numbered_weights(spec);
  const SubModel<double> s1 = extract_submodel(spec, global, a1);
  const SubModel<double> s2 = extract_submodel(spec, global, a2);
  const EmbeddedDelta<double> e1 = embed_update(spec, s1.weights, a1);
  const EmbeddedDelta<double> e2 = embed_update(spec, s2.weights, a2);
  const ModelWeights<double> merged =
      merge_updates<double>(spec, {{&e1, 0.5}, {&e2, 0.5}});

  for (size_t ord = 0; ord < merged.layers.size(); ++ord) {
    for (size_t j = 0; j < merged.layers[ord].w.size(); ++j) {
      double num = 0, den = 0;
      if (e1.w_held[ord][j]) num += 0.5 * e1.dw[ord][j], den += 0.5;
      if (e2.w_held[ord][j]) num += 0.5 * e2.dw[ord][j], den += 0.5;
      const double expected = den > 0 ? num / den : 0.0;
      CHECK(merged.layers[ord].w[j] == doctest::Approx(expected).epsilon(1e-15));
    }
    for (size_t j = 0; j < merged.layers[ord].b.size(); ++j) {
      double num = 0, den = 0;
      if (e1.b_held[ord][j]) num += 0.5 * e1.db[ord][j], den += 0.5;
      if (e2.b_held[ord][j]) num += 0.5 * e2.db[ord][j], den += 0.5;
      const double expected = den > 0 ? num / den : 0.0;
      CHECK(merged.layers[ord].b[j] == doctest::Approx(expected).epsilon(1e-15));
    }
  }

  // The middle-block masks are disjoint and do not cover everything:
  // unheld coordinates stay zero.
  bool saw_unheld = false;
  for (size_t j = 0; j < merged.layers[2].w.size(); ++j) {
    if (!e1.w_held[2][j] && !e2.w_held[2][j]) {
      CHECK(merged.layers[2].w[j] == 0.0);
      saw_unheld = true;
    }
  }
  CHECK(saw_unheld);
}

TEST_CASE("mask shape mismatches are rejected") {
  const ModelSpec spec = chain_spec();
  CHECK_THROWS_AS(
      build_assignment(spec, {bitseq_from_string("0101")}), Error);
  CHECK_THROWS_AS(build_assignment(spec, {bitseq_from_string("0101"),
                                          bitseq_from_string("10110")}),
                  Error);
  // A mask dropping every unit cannot produce a trainable sub-model.
  CHECK_THROWS_AS(build_assignment(spec, {bitseq_from_string("00000"),
                                          bitseq_from_string("10110")}),
                  Error);
}
