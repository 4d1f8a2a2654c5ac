// Copyright 2026 The RouteFast Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>

#include "routefast/tensor.hpp"

namespace routefast {

// Additive mask value treated as fully masking (-65504 is the f16 finite
// minimum used by the padding-bias encoding).
constexpr float kMaskValue = -65504.0f;
constexpr float kMaskThreshold = -30000.0f;  // entries at or below are masked

struct AttentionSpec {
    double scale = 0.0;                 // 0 -> 1/sqrt(head_dim)
    int64_t window_left = -1;           // -1 = unbounded
    int64_t window_right = -1;
    std::optional<Tensor> pad_bias;     // [B,1,1,S], 0 or -65504 per key

    double effective_scale(int64_t head_dim) const;
};

// Naive O(S^2)-memory scaled dot-product attention. Q,K,V are [B,H,S,d];
// mask2d, when given, broadcasts over [B|1, H|1, S, S] and is added to the
// scores before the row softmax. Rows whose keys are all masked produce
// zeros. Double-precision accumulation, f32 storage.
Tensor sdpa(const Tensor& q, const Tensor& k, const Tensor& v, const Tensor* mask2d,
            double scale);

// Peak scratch sizes of one flash_attention call, in f32 elements. The tile
// scratch is independent of S; the row state is the O(S) running softmax.
struct FlashStats {
    std::size_t tile_scratch_floats = 0;  // per-row score buffer, O(tile)
    std::size_t row_state_floats = 0;     // running max + running sum, 2*S
    std::size_t output_floats = 0;        // B*H*S*d accumulator
};

// Tiled streaming-softmax attention: O(tile*d + S*d) auxiliary memory per
// (batch, head), no S x S materialization, bit-for-bit deterministic. Key j
// attends to query i iff i-j <= window_left and j-i <= window_right (-1
// disables a bound) and pad_bias[j] is non-masking.
Tensor flash_attention(const Tensor& q, const Tensor& k, const Tensor& v,
                       const AttentionSpec& spec, int64_t tile = 64,
                       FlashStats* stats = nullptr);

// Materializes the 2-D mask equivalent to (window, pad_bias): entry (i,j) is
// 0 when j is in-window for i and unpadded, -65504 otherwise. Shape is
// [B,1,S,S] with B taken from pad_bias (1 when absent).
Tensor window_to_mask2d(int64_t seq_len, int64_t window_left, int64_t window_right,
                        const Tensor* pad_bias);

// Memory model backing the scaling analysis: SDPA materializes the full
// S x S mask; FA needs only two key/value tiles plus the output accumulator.
uint64_t mask_memory_bytes(uint64_t batch, uint64_t heads, uint64_t seq_len,
                           uint64_t bytes_per_element);
uint64_t fa_memory_bytes(uint64_t batch, uint64_t heads, uint64_t seq_len,
                         uint64_t head_dim, uint64_t tile, uint64_t bytes_per_element);

}  // namespace routefast
