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

#ifndef CFD_DROPOUT_DROPOUT_HPP
#define CFD_DROPOUT_DROPOUT_HPP

#include <vector>

#include "cfd/codes/bitseq.hpp"
#include "cfd/nn/weights.hpp"

namespace cfd {

// Per-client keep/drop masks, one per trainable layer over that layer's
// output units (dense) or filters (conv). The first and last trainable
// layers are never dropped, so their masks are all-ones. Channel masks
// propagate unchanged through pooling and expand across spatial positions
// through flatten.
struct MaskAssignment {
  std::vector<BitSeq> unit_masks;
};

// Ordinals (into trainable_idx) of the layers that may be masked: every
// trainable layer except the first and the last.
std::vector<int> maskable_ordinals(const ModelSpec& spec);

// Output widths of the maskable layers, in ordinal order. These are the
// widths the per-layer mask matrices must match.
std::vector<int> maskable_widths(const ModelSpec& spec);

// Assembles a client's assignment from its row of each maskable layer's
// matrix (in maskable_ordinals order).
MaskAssignment build_assignment(const ModelSpec& spec,
                                const std::vector<BitSeq>& maskable_rows);

// Input-side mask of trainable layer `ordinal`: the previous trainable
// layer's output mask carried through any pooling/flatten layers between
// them, or all-ones for the first trainable layer. For conv layers the
// result is over input channels; for dense layers over flat input units.
BitSeq input_mask(const ModelSpec& spec, const MaskAssignment& assignment,
                  size_t ordinal);

template <typename T>
struct SubModel {
  ModelSpec spec;
  ModelWeights<T> weights;
  MaskAssignment assignment;  // against the global model
  int origin_round = 0;
};

// Full-shape client delta with the coordinates this client held.
template <typename T>
struct EmbeddedDelta {
  std::vector<std::vector<T>> dw, db;
  std::vector<std::vector<uint8_t>> w_held, b_held;
};

namespace detail {

inline std::vector<int> kept_indices(const BitSeq& mask) {
  std::vector<int> idx;
  for (size_t j = 0; j < mask.size(); ++j)
    if (mask[j]) idx.push_back(static_cast<int>(j));
  return idx;
}

inline void check_assignment(const ModelSpec& spec,
                             const MaskAssignment& assignment) {
  require(assignment.unit_masks.size() == spec.trainable_idx.size(),
          ErrorCode::MaskShapeMismatch,
          "assignment must carry one mask per trainable layer");
  for (size_t ord = 0; ord < assignment.unit_masks.size(); ++ord) {
    require(static_cast<int>(assignment.unit_masks[ord].size()) ==
                spec.trainable_width(ord),
            ErrorCode::MaskShapeMismatch, "mask length != layer width");
    require(hamming_weight(assignment.unit_masks[ord]) > 0,
            ErrorCode::MaskShapeMismatch, "a layer mask drops every unit");
  }
}

}  // namespace detail

// Builds the reduced model a client trains: kept rows/columns of dense
// blocks, kept filters and input channels of conv kernels, kept biases.
template <typename T>
SubModel<T> extract_submodel(const ModelSpec& spec,
                             const ModelWeights<T>& global,
                             const MaskAssignment& assignment) {
  detail::check_assignment(spec, assignment);

  SubModel<T> sub;
  sub.assignment = assignment;
  sub.spec = spec;
  for (size_t ord = 0; ord < spec.trainable_idx.size(); ++ord) {
    LayerSpec& l =
        sub.spec.layers[static_cast<size_t>(spec.trainable_idx[ord])];
    const int kept = hamming_weight(assignment.unit_masks[ord]);
    (l.kind == LayerKind::Conv2d ? l.filters : l.units) = kept;
  }
  sub.spec.finalize();

  sub.weights.layers.resize(spec.trainable_idx.size());
  for (size_t ord = 0; ord < spec.trainable_idx.size(); ++ord) {
    const size_t li = static_cast<size_t>(spec.trainable_idx[ord]);
    const LayerSpec& l = spec.layers[li];
    const std::vector<int> out_idx =
        detail::kept_indices(assignment.unit_masks[ord]);
    const std::vector<int> in_idx =
        detail::kept_indices(input_mask(spec, assignment, ord));
    const LayerParams<T>& g = global.layers[ord];
    LayerParams<T>& s = sub.weights.layers[ord];

    if (l.kind == LayerKind::Dense) {
      const int u = l.units;
      s.w.resize(in_idx.size() * out_idx.size());
      for (size_t i = 0; i < in_idx.size(); ++i)
        for (size_t j = 0; j < out_idx.size(); ++j)
          s.w[i * out_idx.size() + j] =
              g.w[static_cast<size_t>(in_idx[i]) * u +
                  static_cast<size_t>(out_idx[j])];
    } else {
      const int ci = spec.in_shape(li).c, k = l.kernel;
      s.w.resize(out_idx.size() * in_idx.size() * k * k);
      for (size_t oc = 0; oc < out_idx.size(); ++oc)
        for (size_t ic = 0; ic < in_idx.size(); ++ic)
          for (int t = 0; t < k * k; ++t)
            s.w[(oc * in_idx.size() + ic) * k * k + static_cast<size_t>(t)] =
                g.w[(static_cast<size_t>(out_idx[oc]) * ci +
                     static_cast<size_t>(in_idx[ic])) *
                        k * k +
                    static_cast<size_t>(t)];
    }
    s.b.resize(out_idx.size());
    for (size_t j = 0; j < out_idx.size(); ++j)
      s.b[j] = g.b[static_cast<size_t>(out_idx[j])];
  }
  return sub;
}

// Scatters a sub-model-shaped delta back into full coordinates and marks
// exactly the coordinates the client held.
template <typename T>
EmbeddedDelta<T> embed_update(const ModelSpec& spec,
                              const ModelWeights<T>& sub_delta,
                              const MaskAssignment& assignment) {
  detail::check_assignment(spec, assignment);
  require(sub_delta.layers.size() == spec.trainable_idx.size(),
          ErrorCode::MaskShapeMismatch,
          "delta must carry one entry per trainable layer");

  EmbeddedDelta<T> out;
  const size_t n = spec.trainable_idx.size();
  out.dw.resize(n);
  out.db.resize(n);
  out.w_held.resize(n);
  out.b_held.resize(n);
  for (size_t ord = 0; ord < n; ++ord) {
    const size_t li = static_cast<size_t>(spec.trainable_idx[ord]);
    const LayerSpec& l = spec.layers[li];
    const std::vector<int> out_idx =
        detail::kept_indices(assignment.unit_masks[ord]);
    const std::vector<int> in_idx =
        detail::kept_indices(input_mask(spec, assignment, ord));
    const LayerParams<T>& d = sub_delta.layers[ord];

    out.dw[ord].assign(spec.weight_count(li), T(0));
    out.db[ord].assign(spec.bias_count(li), T(0));
    out.w_held[ord].assign(spec.weight_count(li), 0);
    out.b_held[ord].assign(spec.bias_count(li), 0);

    if (l.kind == LayerKind::Dense) {
      require(d.w.size() == in_idx.size() * out_idx.size(),
              ErrorCode::MaskShapeMismatch, "dense delta shape mismatch");
      const int u = l.units;
      for (size_t i = 0; i < in_idx.size(); ++i)
        for (size_t j = 0; j < out_idx.size(); ++j) {
          const size_t full = static_cast<size_t>(in_idx[i]) * u +
                              static_cast<size_t>(out_idx[j]);
          out.dw[ord][full] = d.w[i * out_idx.size() + j];
          out.w_held[ord][full] = 1;
        }
    } else {
      const int ci = spec.in_shape(li).c, k = l.kernel;
      require(d.w.size() == out_idx.size() * in_idx.size() *
                                static_cast<size_t>(k) * k,
              ErrorCode::MaskShapeMismatch, "conv delta shape mismatch");
      for (size_t oc = 0; oc < out_idx.size(); ++oc)
        for (size_t ic = 0; ic < in_idx.size(); ++ic)
          for (int t = 0; t < k * k; ++t) {
            const size_t full = (static_cast<size_t>(out_idx[oc]) * ci +
                                 static_cast<size_t>(in_idx[ic])) *
                                    k * k +
                                static_cast<size_t>(t);
            out.dw[ord][full] =
                d.w[(oc * in_idx.size() + ic) * k * k +
                    static_cast<size_t>(t)];
            out.w_held[ord][full] = 1;
          }
    }
    require(d.b.size() == out_idx.size(), ErrorCode::MaskShapeMismatch,
            "bias delta shape mismatch");
    for (size_t j = 0; j < out_idx.size(); ++j) {
      out.db[ord][static_cast<size_t>(out_idx[j])] = d.b[j];
      out.b_held[ord][static_cast<size_t>(out_idx[j])] = 1;
    }
  }
  return out;
}

// Streaming per-coordinate average over holders: each coordinate of the
// merged delta is sum(p_j * delta_j) / sum(p_j) over the clients that held
// it, zero where nobody did. Client order is fixed by the caller, so the
// result does not depend on scheduling.
template <typename T>
class MergeAccumulator {
 public:
  explicit MergeAccumulator(const ModelSpec& spec) : spec_(&spec) {
    num_ = zero_weights<T>(spec);
    den_ = zero_weights<T>(spec);
  }

  void add(const EmbeddedDelta<T>& delta, double p) {
    const T pj = static_cast<T>(p);
    for (size_t ord = 0; ord < num_.layers.size(); ++ord) {
      auto& nw = num_.layers[ord].w;
      auto& dw = den_.layers[ord].w;
      for (size_t j = 0; j < nw.size(); ++j) {
        if (!delta.w_held[ord][j]) continue;
        nw[j] += pj * delta.dw[ord][j];
        dw[j] += pj;
      }
      auto& nb = num_.layers[ord].b;
      auto& db = den_.layers[ord].b;
      for (size_t j = 0; j < nb.size(); ++j) {
        if (!delta.b_held[ord][j]) continue;
        nb[j] += pj * delta.db[ord][j];
        db[j] += pj;
      }
    }
  }

  ModelWeights<T> finalize() const {
    ModelWeights<T> merged = zero_weights<T>(*spec_);
    for (size_t ord = 0; ord < merged.layers.size(); ++ord) {
      for (size_t j = 0; j < merged.layers[ord].w.size(); ++j)
        if (den_.layers[ord].w[j] != T(0))
          merged.layers[ord].w[j] =
              num_.layers[ord].w[j] / den_.layers[ord].w[j];
      for (size_t j = 0; j < merged.layers[ord].b.size(); ++j)
        if (den_.layers[ord].b[j] != T(0))
          merged.layers[ord].b[j] =
              num_.layers[ord].b[j] / den_.layers[ord].b[j];
    }
    return merged;
  }

 private:
  const ModelSpec* spec_;
  ModelWeights<T> num_, den_;
};

template <typename T>
ModelWeights<T> merge_updates(
    const ModelSpec& spec,
    const std::vector<std::pair<const EmbeddedDelta<T>*, double>>& updates) {
  MergeAccumulator<T> acc(spec);
  for (const auto& [delta, p] : updates) acc.add(*delta, p);
  return acc.finalize();
}

}  // namespace cfd

#endif  // CFD_DROPOUT_DROPOUT_HPP
