// Copyright 2026 The RouteFast Authors
// SPDX-License-Identifier: Apache-2.0

#include "routefast/rewrite.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <unordered_map>
#include <unordered_set>

namespace routefast {

namespace {

struct Index {
    std::unordered_map<std::string, std::size_t> producer;       // tensor -> node
    std::unordered_map<std::string, std::size_t> consumer_count; // tensor -> #consumers
    std::unordered_map<std::string, const Initializer*> initializers;
    std::unordered_set<std::string> graph_inputs;

    explicit Index(const Graph& g) {
        for (std::size_t i = 0; i < g.nodes.size(); ++i) {
            for (const auto& out : g.nodes[i].outputs) producer[out] = i;
            for (const auto& in : g.nodes[i].inputs) consumer_count[in] += 1;
        }
        for (const auto& init : g.initializers) initializers[init.name] = &init;
        for (const auto& in : g.inputs) graph_inputs.insert(in.name);
    }

    const Node* producer_node(const Graph& g, const std::string& tensor) const {
        auto it = producer.find(tensor);
        return it == producer.end() ? nullptr : &g.nodes[it->second];
    }
};

// scalar constant value from an initializer or Constant node
std::optional<double> scalar_value(const Graph& g, const Index& index,
                                   const std::string& tensor) {
    if (auto it = index.initializers.find(tensor); it != index.initializers.end()) {
        if (it->second->data.size() == 1) return it->second->data[0];
        return std::nullopt;
    }
    const Node* n = index.producer_node(g, tensor);
    if (n && n->op == OpKind::Constant) {
        if (const auto* values = n->attr_reals("value"); values && values->size() == 1) {
            return (*values)[0];
        }
        double s = n->attr_real("scalar", std::numeric_limits<double>::quiet_NaN());
        if (!std::isnan(s)) return s;
    }
    return std::nullopt;
}

bool is_last_axis_softmax(const Node& node, int64_t rank) {
    int64_t axis = node.attr_int("axis", -1);
    return axis == -1 || (rank > 0 && axis == rank - 1);
}

bool perm_swaps_last_two(const std::vector<int64_t>& perm) {
    const auto rank = static_cast<int64_t>(perm.size());
    if (rank < 2) return false;
    for (int64_t i = 0; i < rank - 2; ++i) {
        if (perm[static_cast<std::size_t>(i)] != i) return false;
    }
    return perm[static_cast<std::size_t>(rank - 2)] == rank - 1 &&
           perm[static_cast<std::size_t>(rank - 1)] == rank - 2;
}

std::optional<LayerKind> kind_from_attr(const Node& node) {
    if (const auto* s = node.attr_string("layer_kind")) {
        if (*s == "local") return LayerKind::local;
        if (*s == "global") return LayerKind::global;
    }
    return std::nullopt;
}

std::optional<LayerKind> kind_from_name(const std::string& name) {
    // paper convention: mask construction nodes are named Where_1 (local)
    // vs Where_2 (global)
    if (name.find("Where_2") != std::string::npos) return LayerKind::global;
    if (name.find("Where_1") != std::string::npos) return LayerKind::local;
    return std::nullopt;
}

std::string unique_name(const Graph& g, std::string base) {
    std::unordered_set<std::string> taken;
    for (const auto& n : g.nodes) {
        taken.insert(n.name);
        for (const auto& o : n.outputs) taken.insert(o);
    }
    for (const auto& i : g.initializers) taken.insert(i.name);
    for (const auto& i : g.inputs) taken.insert(i.name);
    if (!taken.count(base)) return base;
    for (int k = 1;; ++k) {
        std::string candidate = base + "_" + std::to_string(k);
        if (!taken.count(candidate)) return candidate;
    }
}

}  // namespace

std::vector<PatternMatch> find_sdpa_patterns(const Graph& graph) {
    Index index(graph);
    std::vector<PatternMatch> matches;
    std::unordered_set<std::size_t> claimed;

    std::map<std::string, std::vector<int64_t>> shapes;
    try {
        shapes = infer_shapes(graph);
    } catch (const ValidationError&) {
        // shapes stay unknown; the -1 softmax convention still matches
    }
    auto rank_of = [&](const std::string& tensor) -> int64_t {
        auto it = shapes.find(tensor);
        return it == shapes.end() ? 0 : static_cast<int64_t>(it->second.size());
    };

    auto single_consumer = [&](const std::string& tensor) {
        auto it = index.consumer_count.find(tensor);
        bool is_output = std::find(graph.outputs.begin(), graph.outputs.end(), tensor) !=
                         graph.outputs.end();
        return !is_output && it != index.consumer_count.end() && it->second == 1;
    };

    for (std::size_t si = 0; si < graph.nodes.size(); ++si) {
        const Node& softmax_node = graph.nodes[si];
        if (softmax_node.op != OpKind::Softmax ||
            !is_last_axis_softmax(softmax_node, rank_of(softmax_node.inputs.at(0)))) {
            continue;
        }
        if (claimed.count(si)) continue;

        // upstream: Softmax <- Add(scores, mask)
        const Node* add = index.producer_node(graph, softmax_node.inputs.at(0));
        if (!add || add->op != OpKind::Add) continue;
        const auto add_idx = index.producer.at(add->outputs[0]);

        // downstream: Softmax -> MatMul(attn, V)
        std::size_t av_idx = graph.nodes.size();
        for (std::size_t i = 0; i < graph.nodes.size(); ++i) {
            const Node& n = graph.nodes[i];
            if (n.op == OpKind::MatMul && !n.inputs.empty() &&
                n.inputs[0] == softmax_node.outputs[0]) {
                av_idx = i;
                break;
            }
        }
        if (av_idx == graph.nodes.size()) continue;
        if (!single_consumer(softmax_node.outputs[0]) ||
            !single_consumer(add->outputs[0])) {
            continue;
        }

        // Add inputs: one side comes from the QK MatMul, the other is the mask
        const Node* qk = nullptr;
        std::string mask_tensor;
        for (std::size_t side = 0; side < 2; ++side) {
            const Node* cand = index.producer_node(graph, add->inputs.at(side));
            if (cand && cand->op == OpKind::MatMul) {
                qk = cand;
                mask_tensor = add->inputs.at(1 - side);
                break;
            }
        }
        if (!qk || !single_consumer(qk->outputs[0])) continue;
        const auto qk_idx = index.producer.at(qk->outputs[0]);

        // QK MatMul: first input from Mul(Q, scale-const), second is K^T
        const Node* scale_mul = index.producer_node(graph, qk->inputs.at(0));
        if (!scale_mul || scale_mul->op != OpKind::Mul) continue;
        if (!single_consumer(scale_mul->outputs[0])) continue;
        const auto mul_idx = index.producer.at(scale_mul->outputs[0]);

        std::optional<double> scale;
        std::string q_tensor;
        for (std::size_t side = 0; side < 2; ++side) {
            if (auto s = scalar_value(graph, index, scale_mul->inputs.at(side))) {
                scale = s;
                q_tensor = scale_mul->inputs.at(1 - side);
                break;
            }
        }
        if (!scale) continue;

        std::string k_tensor = qk->inputs.at(1);
        bool pre_transposed = true;
        if (const Node* kt = index.producer_node(graph, k_tensor);
            kt && kt->op == OpKind::Transpose) {
            if (const auto* perm = kt->attr_ints("perm"); perm && perm_swaps_last_two(*perm)) {
                k_tensor = kt->inputs.at(0);
                pre_transposed = false;
            }
        }

        const Node& av = graph.nodes[av_idx];
        std::string v_tensor = av.inputs.at(1);

        // layer kind: attribute override first, then the name convention
        std::optional<LayerKind> kind = kind_from_attr(*add);
        const Node* mask_producer = index.producer_node(graph, mask_tensor);
        if (!kind && mask_producer) kind = kind_from_attr(*mask_producer);
        if (!kind && mask_producer) kind = kind_from_name(mask_producer->name);
        if (!kind) continue;  // never guess a window shape

        if (claimed.count(av_idx) || claimed.count(add_idx) || claimed.count(qk_idx) ||
            claimed.count(mul_idx)) {
            continue;
        }

        PatternMatch m;
        m.scale_mul = mul_idx;
        m.qk_matmul = qk_idx;
        m.mask_add = add_idx;
        m.softmax = si;
        m.av_matmul = av_idx;
        m.q = q_tensor;
        m.k = k_tensor;
        m.v = v_tensor;
        m.mask = mask_tensor;
        m.k_pre_transposed = pre_transposed;
        m.scale = *scale;
        m.kind = *kind;
        matches.push_back(std::move(m));
        claimed.insert({si, add_idx, qk_idx, mul_idx, av_idx});
    }
    return matches;
}

Graph dce(const Graph& graph) {
    std::unordered_map<std::string, std::size_t> producer;
    for (std::size_t i = 0; i < graph.nodes.size(); ++i) {
        for (const auto& out : graph.nodes[i].outputs) producer[out] = i;
    }

    std::unordered_set<std::string> live_tensors;
    std::unordered_set<std::size_t> live_nodes;
    std::vector<std::string> work(graph.outputs.begin(), graph.outputs.end());
    while (!work.empty()) {
        std::string tensor = std::move(work.back());
        work.pop_back();
        if (!live_tensors.insert(tensor).second) continue;
        auto it = producer.find(tensor);
        if (it == producer.end()) continue;  // graph input or initializer
        if (live_nodes.insert(it->second).second) {
            for (const auto& in : graph.nodes[it->second].inputs) work.push_back(in);
        }
    }

    Graph out;
    out.inputs = graph.inputs;
    out.outputs = graph.outputs;
    for (std::size_t i = 0; i < graph.nodes.size(); ++i) {
        if (live_nodes.count(i)) out.nodes.push_back(graph.nodes[i]);
    }
    for (const auto& init : graph.initializers) {
        if (live_tensors.count(init.name)) out.initializers.push_back(init);
    }
    return out;
}

Graph rewrite(const Graph& graph, const RewriteOptions& options) {
    if (options.head_dim != 32 && options.head_dim != 64 && options.head_dim != 128) {
        throw UnsupportedHeadDim("head_dim must be one of {32, 64, 128}, got " +
                                 std::to_string(options.head_dim));
    }
    if (options.local_window < 2 || options.local_window % 2 != 0) {
        throw std::invalid_argument("local_window must be even and >= 2");
    }

    auto matches = find_sdpa_patterns(graph);
    if (matches.empty()) return graph;

    const TensorDecl* mask_input = nullptr;
    for (const auto& in : graph.inputs) {
        if (in.name == options.mask_input) mask_input = &in;
    }
    if (!mask_input) {
        throw NoAttentionMaskInput("graph has SDPA patterns but no '" + options.mask_input +
                                   "' input for the padding bias");
    }

    // validate head_dim against the Q tensors when shapes are known
    auto shapes = infer_shapes(graph);
    for (const auto& m : matches) {
        auto it = shapes.find(m.q);
        if (it != shapes.end() && !it->second.empty() &&
            it->second.back() != options.head_dim) {
            throw UnsupportedHeadDim("pattern at '" + graph.nodes[m.softmax].name +
                                     "' has head_dim " + std::to_string(it->second.back()) +
                                     ", expected " + std::to_string(options.head_dim));
        }
    }

    Graph out;
    out.inputs = graph.inputs;
    out.outputs = graph.outputs;
    out.initializers = graph.initializers;

    // one shared pad-bias chain per graph: -65504 * (1 - attention_mask), f16
    const std::string one_name = unique_name(graph, "pad_bias_one");
    const std::string neg_name = unique_name(graph, "pad_bias_negmax");
    const std::string sub_out = unique_name(graph, "pad_bias_inv");
    const std::string mul_out = unique_name(graph, "pad_bias_f32");
    const std::string bias_out = unique_name(graph, "pad_bias");
    out.initializers.push_back({one_name, {1}, DType::f32, {1.0}});
    out.initializers.push_back({neg_name, {1}, DType::f32, {-65504.0}});

    Node sub{sub_out + "/Sub", OpKind::Sub, {one_name, options.mask_input}, {sub_out}, {}};
    Node mul{mul_out + "/Mul", OpKind::Mul, {sub_out, neg_name}, {mul_out}, {}};
    Node cast{bias_out + "/Cast", OpKind::Cast, {mul_out}, {bias_out}, {}};
    cast.attrs.emplace("to", std::string("f16"));
    out.nodes.push_back(std::move(sub));
    out.nodes.push_back(std::move(mul));
    out.nodes.push_back(std::move(cast));

    std::unordered_set<std::size_t> replaced;
    std::unordered_map<std::size_t, const PatternMatch*> fused_at;  // av_matmul -> match
    for (const auto& m : matches) {
        replaced.insert({m.scale_mul, m.qk_matmul, m.mask_add, m.softmax});
        fused_at[m.av_matmul] = &m;
    }

    for (std::size_t i = 0; i < graph.nodes.size(); ++i) {
        if (replaced.count(i)) continue;
        auto it = fused_at.find(i);
        if (it == fused_at.end()) {
            out.nodes.push_back(graph.nodes[i]);
            continue;
        }
        const PatternMatch& m = *it->second;
        std::string k_name = m.k;
        if (m.k_pre_transposed) {
            // the graph only carries K^T; feed the fused node a [B,H,S,d] view
            auto kt_shape = shapes.find(m.k);
            std::size_t rank = kt_shape != shapes.end() ? kt_shape->second.size() : 4;
            std::vector<int64_t> perm(rank);
            for (std::size_t p = 0; p < rank; ++p) perm[p] = static_cast<int64_t>(p);
            std::swap(perm[rank - 1], perm[rank - 2]);
            k_name = m.k + "_rf_untransposed_" + std::to_string(i);
            Node kt{k_name + "/Transpose", OpKind::Transpose, {m.k}, {k_name}, {}};
            kt.attrs.emplace("perm", perm);
            out.nodes.push_back(std::move(kt));
        }

        Node fused;
        fused.name = graph.nodes[m.av_matmul].name + "/FlashAttention";
        fused.op = OpKind::FusedFlashAttention;
        fused.inputs = {m.q, k_name, m.v, bias_out};
        fused.outputs = graph.nodes[m.av_matmul].outputs;
        fused.attrs.emplace("scale", m.scale);
        if (m.kind == LayerKind::local) {
            fused.attrs.emplace("window_left", options.local_window / 2 - 1);
            fused.attrs.emplace("window_right", options.local_window / 2);
        } else {
            fused.attrs.emplace("window_left", static_cast<int64_t>(-1));
            fused.attrs.emplace("window_right", static_cast<int64_t>(-1));
        }
        out.nodes.push_back(std::move(fused));
    }

    return dce(out);
}

}  // namespace routefast
