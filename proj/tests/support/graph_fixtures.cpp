// Copyright 2026 The RouteFast Authors
// SPDX-License-Identifier: Apache-2.0

#include "support/graph_fixtures.hpp"

#include <cmath>

namespace routefast::testing {

namespace {

std::string layer_prefix(std::size_t layer) { return "layer" + std::to_string(layer); }

}  // namespace

Fixture build_attention_fixture(const FixtureSpec& spec) {
    const int64_t B = spec.batch, H = spec.heads, S = spec.seq, d = spec.head_dim;
    Fixture fixture;
    Graph& g = fixture.graph;

    g.inputs.push_back({"hidden", {B, H, S, d}, DType::f32});
    g.inputs.push_back({"attention_mask", {B, 1, 1, S}, DType::f32});
    if (spec.pre_transposed_k) {
        g.inputs.push_back({"key_t", {B, H, d, S}, DType::f32});
    }

    const double scale = 1.0 / std::sqrt(static_cast<double>(d));
    g.initializers.push_back({"attn_scale", {1}, DType::f32, {scale}});
    g.initializers.push_back({"mask_zero", {1}, DType::f32, {0.0}});
    g.initializers.push_back({"mask_neg", {1}, DType::f32, {-65504.0}});

    bool any_local = false;
    for (LayerKind kind : spec.layers) any_local |= kind == LayerKind::local;
    if (any_local) {
        // [1,1,S,S] 0/1 window pattern shared by the local layers
        Initializer window{"local_window_pattern", {1, 1, S, S}, DType::f32, {}};
        window.data.resize(static_cast<std::size_t>(S * S), 0.0);
        const int64_t wl = spec.local_window / 2 - 1;
        const int64_t wr = spec.local_window / 2;
        for (int64_t i = 0; i < S; ++i) {
            for (int64_t j = 0; j < S; ++j) {
                if (i - j <= wl && j - i <= wr) {
                    window.data[static_cast<std::size_t>(i * S + j)] = 1.0;
                }
            }
        }
        g.initializers.push_back(std::move(window));
    }

    std::string hidden = "hidden";
    for (std::size_t l = 0; l < spec.layers.size(); ++l) {
        const std::string p = layer_prefix(l);
        const LayerKind kind = spec.layers[l];

        // mask chain
        Node expand{p + "/mask/Expand", OpKind::Expand, {"attention_mask"},
                    {p + "/mask/expanded"}, {}};
        expand.attrs.emplace("shape", std::vector<int64_t>{B, 1, S, S});
        g.nodes.push_back(std::move(expand));
        fixture.manifest.expand_count++;

        std::string cond = p + "/mask/expanded";
        if (kind == LayerKind::local) {
            Node window_and{p + "/mask/window_and", OpKind::Mul,
                            {cond, "local_window_pattern"}, {p + "/mask/window_cond"}, {}};
            g.nodes.push_back(std::move(window_and));
            cond = p + "/mask/window_cond";
        }
        const std::string where_tag = kind == LayerKind::local ? "Where_1" : "Where_2";
        Node where{p + "/mask/" + where_tag, OpKind::Where, {cond, "mask_zero", "mask_neg"},
                   {p + "/mask/bias2d"}, {}};
        g.nodes.push_back(std::move(where));
        fixture.manifest.where_count++;

        // attention chain
        Node scale_mul{p + "/q_scale", OpKind::Mul, {hidden, "attn_scale"},
                       {p + "/q_scaled"}, {}};
        g.nodes.push_back(std::move(scale_mul));

        std::string k_t;
        if (spec.pre_transposed_k) {
            k_t = "key_t";
        } else {
            k_t = p + "/k_t";
            Node kt{p + "/k_transpose", OpKind::Transpose, {hidden}, {k_t}, {}};
            kt.attrs.emplace("perm", std::vector<int64_t>{0, 1, 3, 2});
            g.nodes.push_back(std::move(kt));
        }

        Node qk{p + "/qk_matmul", OpKind::MatMul, {p + "/q_scaled", k_t},
                {p + "/scores"}, {}};
        g.nodes.push_back(std::move(qk));

        Node mask_add{p + "/mask_add", OpKind::Add, {p + "/scores", p + "/mask/bias2d"},
                      {p + "/scores_masked"}, {}};
        g.nodes.push_back(std::move(mask_add));

        Node softmax{p + "/softmax", OpKind::Softmax, {p + "/scores_masked"},
                     {p + "/attn"}, {}};
        softmax.attrs.emplace("axis", static_cast<int64_t>(-1));
        g.nodes.push_back(std::move(softmax));

        Node av{p + "/av_matmul", OpKind::MatMul, {p + "/attn", hidden}, {p + "/out"}, {}};
        g.nodes.push_back(std::move(av));

        hidden = p + "/out";
    }

    g.outputs.push_back(hidden);
    fixture.manifest.node_count = g.nodes.size();
    fixture.manifest.layers = spec.layers;
    validate_graph(g);
    return fixture;
}

}  // namespace routefast::testing
