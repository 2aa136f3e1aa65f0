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

#include "cfd/dropout/dropout.hpp"

namespace cfd {

std::vector<int> maskable_ordinals(const ModelSpec& spec) {
  std::vector<int> ords;
  const int n = static_cast<int>(spec.trainable_idx.size());
  for (int ord = 1; ord + 1 < n; ++ord) ords.push_back(ord);
  return ords;
}

std::vector<int> maskable_widths(const ModelSpec& spec) {
  std::vector<int> widths;
  for (int ord : maskable_ordinals(spec))
    widths.push_back(spec.trainable_width(static_cast<size_t>(ord)));
  return widths;
}

MaskAssignment build_assignment(const ModelSpec& spec,
                                const std::vector<BitSeq>& maskable_rows) {
  const std::vector<int> ords = maskable_ordinals(spec);
  require(maskable_rows.size() == ords.size(), ErrorCode::MaskShapeMismatch,
          "expected one mask row per maskable layer");

  MaskAssignment a;
  for (size_t ord = 0; ord < spec.trainable_idx.size(); ++ord)
    a.unit_masks.push_back(
        BitSeq(static_cast<size_t>(spec.trainable_width(ord)), 1));
  for (size_t i = 0; i < ords.size(); ++i) {
    const size_t ord = static_cast<size_t>(ords[i]);
    require(maskable_rows[i].size() == a.unit_masks[ord].size(),
            ErrorCode::MaskShapeMismatch,
            "mask row length does not match layer width");
    a.unit_masks[ord] = maskable_rows[i];
  }
  detail::check_assignment(spec, a);
  return a;
}

BitSeq input_mask(const ModelSpec& spec, const MaskAssignment& assignment,
                  size_t ordinal) {
  const size_t li = static_cast<size_t>(spec.trainable_idx[ordinal]);
  const LayerSpec& l = spec.layers[li];
  const Shape3& in = spec.in_shape(li);

  if (ordinal == 0)
    return BitSeq(static_cast<size_t>(l.kind == LayerKind::Conv2d
                                          ? in.c
                                          : in.volume()),
                  1);

  const size_t prev_li =
      static_cast<size_t>(spec.trainable_idx[ordinal - 1]);
  BitSeq mask = assignment.unit_masks[ordinal - 1];
  // Carry the mask through the layers between the two trainable ones.
  for (size_t mid = prev_li + 1; mid < li; ++mid) {
    switch (spec.layers[mid].kind) {
      case LayerKind::MaxPool2d:
        break;  // channel mask unchanged
      case LayerKind::Flatten: {
        const Shape3& fin = spec.in_shape(mid);
        require(static_cast<int>(mask.size()) == fin.c,
                ErrorCode::MaskShapeMismatch,
                "flatten input channels do not match mask");
        BitSeq flat(static_cast<size_t>(fin.volume()));
        for (int c = 0; c < fin.c; ++c)
          for (int j = 0; j < fin.h * fin.w; ++j)
            flat[static_cast<size_t>(c * fin.h * fin.w + j)] =
                mask[static_cast<size_t>(c)];
        mask = std::move(flat);
        break;
      }
      default:
        fail(ErrorCode::MaskShapeMismatch,
             "unexpected trainable layer between mask propagation points");
    }
  }
  require(static_cast<int>(mask.size()) ==
              (l.kind == LayerKind::Conv2d ? in.c : in.volume()),
          ErrorCode::MaskShapeMismatch,
          "propagated mask does not match the layer input");
  return mask;
}

}  // namespace cfd
