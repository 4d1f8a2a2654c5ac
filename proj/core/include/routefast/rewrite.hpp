// Copyright 2026 The RouteFast Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "routefast/graph.hpp"

namespace routefast {

class UnsupportedHeadDim : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class NoAttentionMaskInput : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class LayerKind { local, global };

// One matched SDPA chain:
//   Mul(Q, scale) -> MatMul(., K^T) -> Add(., mask) -> Softmax -> MatMul(., V)
struct PatternMatch {
    std::size_t scale_mul = 0;  // node indices into Graph::nodes
    std::size_t qk_matmul = 0;
    std::size_t mask_add = 0;
    std::size_t softmax = 0;
    std::size_t av_matmul = 0;

    std::string q, k, v;    // resolved tensor names ([B,H,S,d] layout for K)
    std::string mask;       // the 2-D mask tensor fed to the Add
    bool k_pre_transposed = false;  // MatMul consumed K^T directly
    double scale = 0.0;
    LayerKind kind = LayerKind::global;
};

// Pattern scan. Tolerates a Transpose on K. The layer kind comes from an
// explicit `layer_kind` attribute (on the Add node or the mask producer)
// or, failing that, from the mask producer's name: "Where_2" tags global
// layers, "Where_1" local ones. Chains with an undeterminable kind are left
// alone rather than guessed at. Matches never overlap.
std::vector<PatternMatch> find_sdpa_patterns(const Graph& graph);

struct RewriteOptions {
    int64_t head_dim = 64;       // must be one of {32, 64, 128}
    int64_t local_window = 128;  // even, >= 2
    std::string mask_input = "attention_mask";  // graph input, [B,1,1,S]
};

// Replaces every match with one FusedFlashAttention node, installs a single
// shared pad-bias chain (pad_bias = -65504 * (1 - attention_mask), cast to
// f16), assigns per-layer windows (local: w/2-1, w/2; global: -1, -1), and
// runs dce. A graph with no matches is returned unchanged.
Graph rewrite(const Graph& graph, const RewriteOptions& options);

// Removes nodes and initializers not reachable backwards from the graph
// outputs. Graph inputs and outputs are never touched.
Graph dce(const Graph& graph);

}  // namespace routefast
