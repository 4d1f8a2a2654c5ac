// Copyright 2026 The RouteFast Authors
// SPDX-License-Identifier: Apache-2.0

#include "routefast/rewrite.hpp"

#include <gtest/gtest.h>

#include <random>

#include "routefast/attention.hpp"
#include "routefast/interpreter.hpp"
#include "support/graph_fixtures.hpp"

namespace routefast {
namespace {

using testing::build_attention_fixture;
using testing::FixtureSpec;

RewriteOptions options_for(const FixtureSpec& spec) {
    RewriteOptions opts;
    opts.head_dim = spec.head_dim;
    opts.local_window = spec.local_window;
    return opts;
}

TEST(FindPatterns, NoSoftmaxNoMatch) {
    Graph g = parse_graph(R"({
        "inputs": [{"name": "x", "shape": [2, 2], "dtype": "f32"}],
        "outputs": ["y"],
        "nodes": [{"name": "m", "op": "MatMul", "inputs": ["x", "x"], "outputs": ["y"]}]
    })");
    EXPECT_TRUE(find_sdpa_patterns(g).empty());
}

TEST(FindPatterns, SingleLayerResolvesQkv) {
    FixtureSpec spec;
    spec.layers = {LayerKind::global};
    auto fixture = build_attention_fixture(spec);
    auto matches = find_sdpa_patterns(fixture.graph);
    ASSERT_EQ(matches.size(), 1u);
    EXPECT_EQ(matches[0].q, "hidden");
    EXPECT_EQ(matches[0].k, "hidden");  // transpose folded away
    EXPECT_EQ(matches[0].v, "hidden");
    EXPECT_FALSE(matches[0].k_pre_transposed);
    EXPECT_EQ(matches[0].kind, LayerKind::global);
    EXPECT_NEAR(matches[0].scale, 1.0 / std::sqrt(32.0), 1e-12);
}

TEST(FindPatterns, FourLayerKindsFromWhereNames) {
    FixtureSpec spec;
    spec.layers = {LayerKind::local, LayerKind::local, LayerKind::global, LayerKind::local};
    auto fixture = build_attention_fixture(spec);
    auto matches = find_sdpa_patterns(fixture.graph);
    ASSERT_EQ(matches.size(), 4u);
    EXPECT_EQ(matches[0].kind, LayerKind::local);
    EXPECT_EQ(matches[1].kind, LayerKind::local);
    EXPECT_EQ(matches[2].kind, LayerKind::global);
    EXPECT_EQ(matches[3].kind, LayerKind::local);
}

TEST(FindPatterns, AttrOverrideBeatsName) {
    FixtureSpec spec;
    spec.layers = {LayerKind::global};
    auto fixture = build_attention_fixture(spec);
    for (auto& node : fixture.graph.nodes) {
        if (node.op == OpKind::Add) node.attrs.emplace("layer_kind", std::string("local"));
    }
    auto matches = find_sdpa_patterns(fixture.graph);
    ASSERT_EQ(matches.size(), 1u);
    EXPECT_EQ(matches[0].kind, LayerKind::local);
}

TEST(FindPatterns, UntaggedKindIsSkippedNotGuessed) {
    FixtureSpec spec;
    spec.layers = {LayerKind::global};
    auto fixture = build_attention_fixture(spec);
    for (auto& node : fixture.graph.nodes) {
        auto pos = node.name.find("Where_2");
        if (pos != std::string::npos) node.name = node.name.substr(0, pos) + "Untagged";
    }
    EXPECT_TRUE(find_sdpa_patterns(fixture.graph).empty());
}

TEST(FindPatterns, PreTransposedKVariant) {
    FixtureSpec spec;
    spec.layers = {LayerKind::global};
    spec.pre_transposed_k = true;
    auto fixture = build_attention_fixture(spec);
    auto matches = find_sdpa_patterns(fixture.graph);
    ASSERT_EQ(matches.size(), 1u);
    EXPECT_TRUE(matches[0].k_pre_transposed);
    EXPECT_EQ(matches[0].k, "key_t");
}

TEST(Rewrite, ZeroMatchesIsByteIdentical) {
    Graph g = parse_graph(R"({
        "inputs": [{"name": "x", "shape": [4, 4], "dtype": "f32"}],
        "outputs": ["y"],
        "nodes": [{"name": "m", "op": "MatMul", "inputs": ["x", "x"], "outputs": ["y"]}]
    })");
    Graph out = rewrite(g, {});
    EXPECT_EQ(serialize_graph(out), serialize_graph(g));
}

TEST(Rewrite, LocalWindowAttrsMatchConvention) {
    FixtureSpec spec;
    spec.layers = {LayerKind::local, LayerKind::global};
    spec.seq = 128;
    spec.head_dim = 64;
    auto fixture = build_attention_fixture(spec);
    RewriteOptions opts = options_for(spec);
    opts.local_window = 128;
    Graph out = rewrite(fixture.graph, opts);

    std::vector<const Node*> fused;
    for (const auto& n : out.nodes) {
        if (n.op == OpKind::FusedFlashAttention) fused.push_back(&n);
    }
    ASSERT_EQ(fused.size(), 2u);
    EXPECT_EQ(fused[0]->attr_int("window_left", -99), 63);
    EXPECT_EQ(fused[0]->attr_int("window_right", -99), 64);
    EXPECT_EQ(fused[1]->attr_int("window_left", -99), -1);
    EXPECT_EQ(fused[1]->attr_int("window_right", -99), -1);
    EXPECT_NEAR(fused[0]->attr_real("scale", 0.0), 1.0 / 8.0, 1e-12);
    ASSERT_EQ(fused[0]->inputs.size(), 4u);  // Q, K, V, pad_bias
}

TEST(Rewrite, CleansMaskSubgraphAndSxSTensors) {
    FixtureSpec spec;
    spec.layers = {LayerKind::local, LayerKind::global};
    spec.seq = 128;
    spec.head_dim = 32;
    auto fixture = build_attention_fixture(spec);
    Graph out = rewrite(fixture.graph, options_for(spec));

    for (const auto& n : out.nodes) {
        EXPECT_NE(n.op, OpKind::Where) << n.name;
        EXPECT_NE(n.op, OpKind::Expand) << n.name;
        EXPECT_NE(n.op, OpKind::Softmax) << n.name;
    }
    for (const auto& init : out.initializers) {
        EXPECT_NE(init.name, "local_window_pattern");
    }
    auto shapes = infer_shapes(out);
    for (const auto& [name, shape] : shapes) {
        bool sxs = shape.size() >= 2 && shape[shape.size() - 1] == spec.seq &&
                   shape[shape.size() - 2] == spec.seq;
        EXPECT_FALSE(sxs) << name;
    }
}

TEST(Rewrite, IdempotentOnRewrittenGraph) {
    FixtureSpec spec;
    spec.layers = {LayerKind::local, LayerKind::global, LayerKind::local};
    auto fixture = build_attention_fixture(spec);
    Graph once = rewrite(fixture.graph, options_for(spec));
    Graph twice = rewrite(once, options_for(spec));
    EXPECT_EQ(serialize_graph(once), serialize_graph(twice));
}

TEST(Rewrite, ErrorsAreTyped) {
    FixtureSpec spec;
    auto fixture = build_attention_fixture(spec);
    RewriteOptions bad = options_for(spec);
    bad.head_dim = 48;
    EXPECT_THROW(rewrite(fixture.graph, bad), UnsupportedHeadDim);

    RewriteOptions mismatched = options_for(spec);
    mismatched.head_dim = spec.head_dim == 32 ? 64 : 32;
    EXPECT_THROW(rewrite(fixture.graph, mismatched), UnsupportedHeadDim);

    RewriteOptions renamed = options_for(spec);
    renamed.mask_input = "no_such_input";
    EXPECT_THROW(rewrite(fixture.graph, renamed), NoAttentionMaskInput);
}

TEST(Dce, NoDeadNodesUnchanged) {
    FixtureSpec spec;
    auto fixture = build_attention_fixture(spec);
    Graph out = dce(fixture.graph);
    EXPECT_EQ(serialize_graph(out), serialize_graph(fixture.graph));
}

TEST(Dce, RemovesTransitively) {
    Graph g = parse_graph(R"({
        "inputs": [{"name": "x", "shape": [2], "dtype": "f32"}],
        "outputs": ["y"],
        "nodes": [
            {"name": "keep", "op": "Mul", "inputs": ["x", "x"], "outputs": ["y"]},
            {"name": "dead1", "op": "Mul", "inputs": ["x", "x"], "outputs": ["d1"]},
            {"name": "dead2", "op": "Mul", "inputs": ["d1", "d1"], "outputs": ["d2"]}
        ]
    })");
    Graph out = dce(g);
    ASSERT_EQ(out.nodes.size(), 1u);
    EXPECT_EQ(out.nodes[0].name, "keep");
}

TEST(Dce, NeverRemovesReachable) {
    FixtureSpec spec;
    spec.layers = {LayerKind::local, LayerKind::global};
    auto fixture = build_attention_fixture(spec);
    Graph out = dce(fixture.graph);
    EXPECT_EQ(out.nodes.size(), fixture.graph.nodes.size());
}

// The 2-D mask implied by (padding, window) must equal the mask the original
// graph constructs; this is what makes the rewrite semantics-preserving.
TEST(Rewrite, WindowMaskMatchesOriginalMaskTensor) {
    FixtureSpec spec;
    spec.layers = {LayerKind::local};
    spec.seq = 96;
    spec.head_dim = 32;
    auto fixture = build_attention_fixture(spec);

    Graph probe = fixture.graph;  // expose the layer's 2-D bias as an output
    probe.outputs.push_back("layer0/mask/bias2d");

    std::mt19937_64 rng(5);
    Tensor hidden = Tensor::random({spec.batch, spec.heads, spec.seq, spec.head_dim}, rng);
    Tensor mask = Tensor::full({spec.batch, 1, 1, spec.seq}, 1.0f);
    for (int64_t i = 0; i < 9; ++i) mask.data[mask.data.size() - 1 - i] = 0.0f;

    auto outputs = interpret(probe, {{"hidden", hidden}, {"attention_mask", mask}});
    const Tensor& original_mask2d = outputs.at("layer0/mask/bias2d");

    Tensor pad_bias({spec.batch, 1, 1, spec.seq});
    for (std::size_t i = 0; i < pad_bias.data.size(); ++i) {
        pad_bias.data[i] = quantize_f16(-65504.0f * (1.0f - mask.data[i]));
    }
    Tensor derived = window_to_mask2d(spec.seq, 63, 64, &pad_bias);
    ASSERT_EQ(derived.data.size(), original_mask2d.data.size());
    for (std::size_t i = 0; i < derived.data.size(); ++i) {
        ASSERT_EQ(derived.data[i], original_mask2d.data[i]) << i;
    }
}

TEST(Rewrite, SemanticPreservationSingleLayer) {
    FixtureSpec spec;
    spec.layers = {LayerKind::local};
    spec.seq = 96;
    spec.head_dim = 32;
    auto fixture = build_attention_fixture(spec);
    Graph rewritten = rewrite(fixture.graph, options_for(spec));

    std::mt19937_64 rng(7);
    Tensor hidden = Tensor::random({spec.batch, spec.heads, spec.seq, spec.head_dim}, rng);
    Tensor mask = Tensor::full({spec.batch, 1, 1, spec.seq}, 1.0f);
    for (int64_t i = 0; i < 7; ++i) mask.data[mask.data.size() - 1 - i] = 0.0f;

    TensorMap inputs{{"hidden", hidden}, {"attention_mask", mask}};
    auto a = interpret(fixture.graph, inputs);
    auto b = interpret(rewritten, inputs);
    const auto& ta = a.at(fixture.graph.outputs[0]);
    const auto& tb = b.at(fixture.graph.outputs[0]);
    ASSERT_EQ(ta.shape, tb.shape);
    double max_abs = 0.0;
    for (std::size_t i = 0; i < ta.data.size(); ++i) {
        max_abs = std::max(max_abs, static_cast<double>(std::abs(ta.data[i] - tb.data[i])));
    }
    EXPECT_LE(max_abs, 1e-3);
}

}  // namespace
}  // namespace routefast
