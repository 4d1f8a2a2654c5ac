// Copyright 2026 The RouteFast Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "routefast/graph.hpp"
#include "routefast/rewrite.hpp"

namespace routefast::testing {

struct FixtureSpec {
    int64_t batch = 1;
    int64_t heads = 2;
    int64_t seq = 64;
    int64_t head_dim = 32;
    int64_t local_window = 128;
    std::vector<LayerKind> layers{LayerKind::global};
    // When true the QK MatMul consumes a pre-transposed K graph input
    // instead of an in-graph Transpose (single layer only).
    bool pre_transposed_k = false;
};

struct FixtureManifest {
    std::size_t node_count = 0;
    std::size_t where_count = 0;
    std::size_t expand_count = 0;
    std::vector<LayerKind> layers;
};

struct Fixture {
    Graph graph;
    FixtureManifest manifest;
};

// Stacked self-attention: layer l computes
//   Mul(h, 1/sqrt(d)) -> MatMul(., K^T) -> Add(., mask_l) -> Softmax -> MatMul(., h)
// with per-layer mask chains built from the attention_mask input via
// Expand/Where nodes (names carry the Where_1 / Where_2 layer-kind tags).
Fixture build_attention_fixture(const FixtureSpec& spec);

}  // namespace routefast::testing
