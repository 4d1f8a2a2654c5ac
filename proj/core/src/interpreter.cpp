// Copyright 2026 The RouteFast Authors
// SPDX-License-Identifier: Apache-2.0

#include "routefast/interpreter.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "routefast/attention.hpp"

namespace routefast {

namespace {

std::vector<int64_t> broadcast_out(const std::vector<int64_t>& a,
                                   const std::vector<int64_t>& b, const std::string& node) {
    std::vector<int64_t> out(std::max(a.size(), b.size()), 1);
    for (std::size_t i = 0; i < out.size(); ++i) {
        int64_t da = i < out.size() - a.size() ? 1 : a[i - (out.size() - a.size())];
        int64_t db = i < out.size() - b.size() ? 1 : b[i - (out.size() - b.size())];
        if (da != db && da != 1 && db != 1) {
            throw ShapeMismatch("node '" + node + "': operands not broadcastable");
        }
        out[i] = std::max(da, db);
    }
    return out;
}

// index into `t` for the broadcast output coordinate `coord`
std::size_t broadcast_index(const Tensor& t, const std::vector<int64_t>& coord) {
    std::size_t idx = 0;
    const std::size_t offset = coord.size() - t.shape.size();
    for (std::size_t i = 0; i < t.shape.size(); ++i) {
        int64_t c = t.shape[i] == 1 ? 0 : coord[offset + i];
        idx = idx * static_cast<std::size_t>(t.shape[i]) + static_cast<std::size_t>(c);
    }
    return idx;
}

Tensor elementwise(const Tensor& a, const Tensor& b, const std::string& node,
                   const std::function<float(float, float)>& fn) {
    Tensor out(broadcast_out(a.shape, b.shape, node));
    std::vector<int64_t> coord(out.shape.size(), 0);
    for (std::size_t flat = 0; flat < out.data.size(); ++flat) {
        out.data[flat] = fn(a.data[broadcast_index(a, coord)], b.data[broadcast_index(b, coord)]);
        for (std::size_t i = coord.size(); i-- > 0;) {
            if (++coord[i] < out.shape[i]) break;
            coord[i] = 0;
        }
    }
    return out;
}

Tensor matmul(const Tensor& a, const Tensor& b, const std::string& node) {
    if (a.shape.size() < 2 || b.shape.size() < 2) {
        throw ShapeMismatch("node '" + node + "': MatMul needs rank >= 2");
    }
    const int64_t m = a.shape[a.shape.size() - 2];
    const int64_t ka = a.shape[a.shape.size() - 1];
    const int64_t kb = b.shape[b.shape.size() - 2];
    const int64_t n = b.shape[b.shape.size() - 1];
    if (ka != kb) throw ShapeMismatch("node '" + node + "': MatMul inner dims differ");

    std::vector<int64_t> batch_a(a.shape.begin(), a.shape.end() - 2);
    std::vector<int64_t> batch_b(b.shape.begin(), b.shape.end() - 2);
    std::vector<int64_t> batch = broadcast_out(batch_a, batch_b, node);

    std::vector<int64_t> out_shape = batch;
    out_shape.push_back(m);
    out_shape.push_back(n);
    Tensor out(out_shape);

    std::size_t batch_count = shape_numel(batch);
    std::vector<int64_t> coord(batch.size(), 0);
    auto batch_offset = [&](const std::vector<int64_t>& shape) {
        // flat offset of the [..,m,k] block for the current batch coordinate
        std::size_t idx = 0;
        const std::size_t off = batch.size() - (shape.size() - 2);
        for (std::size_t i = 0; i + 2 < shape.size(); ++i) {
            int64_t c = shape[i] == 1 ? 0 : coord[off + i];
            idx = idx * static_cast<std::size_t>(shape[i]) + static_cast<std::size_t>(c);
        }
        return idx;
    };

    for (std::size_t bi = 0; bi < batch_count; ++bi) {
        std::size_t ia = batch_offset(a.shape) * static_cast<std::size_t>(m * ka);
        std::size_t ib = batch_offset(b.shape) * static_cast<std::size_t>(kb * n);
        std::size_t io = bi * static_cast<std::size_t>(m * n);
        const float* pa = a.data.data() + ia;
        const float* pb = b.data.data() + ib;
        float* po = out.data.data() + io;
        for (int64_t r = 0; r < m; ++r) {
            for (int64_t c = 0; c < n; ++c) {
                double acc = 0.0;
                for (int64_t t = 0; t < ka; ++t) {
                    acc += static_cast<double>(pa[r * ka + t]) *
                           static_cast<double>(pb[t * n + c]);
                }
                po[r * n + c] = static_cast<float>(acc);
            }
        }
        for (std::size_t i = coord.size(); i-- > 0;) {
            if (++coord[i] < batch[i]) break;
            coord[i] = 0;
        }
    }
    return out;
}

Tensor softmax(const Tensor& x, int64_t axis, const std::string& node) {
    const auto rank = static_cast<int64_t>(x.shape.size());
    if (axis < 0) axis += rank;
    if (axis < 0 || axis >= rank) throw ShapeMismatch("node '" + node + "': bad softmax axis");

    std::size_t inner = 1, outer = 1;
    for (int64_t i = 0; i < axis; ++i) outer *= static_cast<std::size_t>(x.shape[i]);
    for (int64_t i = axis + 1; i < rank; ++i) inner *= static_cast<std::size_t>(x.shape[i]);
    const std::size_t len = static_cast<std::size_t>(x.shape[axis]);

    Tensor out(x.shape);
    for (std::size_t o = 0; o < outer; ++o) {
        for (std::size_t in = 0; in < inner; ++in) {
            const std::size_t stride = inner;
            const std::size_t base = o * len * inner + in;
            double mx = -std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < len; ++i) {
                mx = std::max(mx, static_cast<double>(x.data[base + i * stride]));
            }
            double denom = 0.0;
            for (std::size_t i = 0; i < len; ++i) {
                denom += std::exp(static_cast<double>(x.data[base + i * stride]) - mx);
            }
            for (std::size_t i = 0; i < len; ++i) {
                double e = std::exp(static_cast<double>(x.data[base + i * stride]) - mx);
                out.data[base + i * stride] = static_cast<float>(e / denom);
            }
        }
    }
    return out;
}

Tensor transpose(const Tensor& x, const std::vector<int64_t>& perm, const std::string& node) {
    if (perm.size() != x.shape.size()) {
        throw ShapeMismatch("node '" + node + "': transpose perm rank mismatch");
    }
    std::vector<int64_t> out_shape(perm.size());
    for (std::size_t i = 0; i < perm.size(); ++i) {
        out_shape[i] = x.shape.at(static_cast<std::size_t>(perm[i]));
    }
    Tensor out(out_shape);

    std::vector<std::size_t> in_strides(x.shape.size(), 1);
    for (std::size_t i = x.shape.size() - 1; i-- > 0;) {
        in_strides[i] = in_strides[i + 1] * static_cast<std::size_t>(x.shape[i + 1]);
    }
    std::vector<int64_t> coord(out_shape.size(), 0);
    for (std::size_t flat = 0; flat < out.data.size(); ++flat) {
        std::size_t src = 0;
        for (std::size_t i = 0; i < coord.size(); ++i) {
            src += static_cast<std::size_t>(coord[i]) *
                   in_strides[static_cast<std::size_t>(perm[i])];
        }
        out.data[flat] = x.data[src];
        for (std::size_t i = coord.size(); i-- > 0;) {
            if (++coord[i] < out_shape[i]) break;
            coord[i] = 0;
        }
    }
    return out;
}

Tensor expand(const Tensor& x, const std::vector<int64_t>& target, const std::string& node) {
    Tensor out(broadcast_out(x.shape, target, node));
    std::vector<int64_t> coord(out.shape.size(), 0);
    for (std::size_t flat = 0; flat < out.data.size(); ++flat) {
        out.data[flat] = x.data[broadcast_index(x, coord)];
        for (std::size_t i = coord.size(); i-- > 0;) {
            if (++coord[i] < out.shape[i]) break;
            coord[i] = 0;
        }
    }
    return out;
}

}  // namespace

TensorMap interpret(const Graph& graph, const TensorMap& inputs) {
    TensorMap env;
    for (const auto& decl : graph.inputs) {
        auto it = inputs.find(decl.name);
        if (it == inputs.end()) {
            throw ShapeMismatch("graph input '" + decl.name + "' is not bound");
        }
        if (it->second.shape != decl.shape) {
            throw ShapeMismatch("graph input '" + decl.name + "' has wrong shape");
        }
        env[decl.name] = it->second;
    }
    for (const auto& init : graph.initializers) {
        Tensor t(init.shape, init.dtype);
        for (std::size_t i = 0; i < init.data.size(); ++i) {
            t.data[i] = static_cast<float>(init.data[i]);
            if (init.dtype == DType::f16) t.data[i] = quantize_f16(t.data[i]);
        }
        env[init.name] = std::move(t);
    }

    for (std::size_t idx : topological_order(graph)) {
        const Node& node = graph.nodes[idx];
        auto in = [&](std::size_t i) -> const Tensor& {
            auto it = env.find(node.inputs.at(i));
            if (it == env.end()) {
                throw ShapeMismatch("node '" + node.name + "': missing input tensor");
            }
            return it->second;
        };

        Tensor result;
        switch (node.op) {
            case OpKind::MatMul:
                result = matmul(in(0), in(1), node.name);
                break;
            case OpKind::Add:
                result = elementwise(in(0), in(1), node.name,
                                     [](float a, float b) { return a + b; });
                break;
            case OpKind::Sub:
                result = elementwise(in(0), in(1), node.name,
                                     [](float a, float b) { return a - b; });
                break;
            case OpKind::Mul:
                result = elementwise(in(0), in(1), node.name,
                                     [](float a, float b) { return a * b; });
                break;
            case OpKind::Softmax:
                result = softmax(in(0), node.attr_int("axis", -1), node.name);
                break;
            case OpKind::Transpose: {
                const auto* perm = node.attr_ints("perm");
                if (!perm) throw ShapeMismatch("node '" + node.name + "': missing perm");
                result = transpose(in(0), *perm, node.name);
                break;
            }
            case OpKind::Cast: {
                const auto* to = node.attr_string("to");
                if (!to) throw ShapeMismatch("node '" + node.name + "': missing 'to'");
                DType target = dtype_from_name(*to);
                result = in(0);
                result.dtype = target;
                if (target == DType::f16) {
                    for (auto& v : result.data) v = quantize_f16(v);
                }
                break;
            }
            case OpKind::Where: {
                // elementwise select with broadcasting; condition is numeric
                const Tensor& cond = in(0);
                const Tensor& x = in(1);
                const Tensor& y = in(2);
                auto shape = broadcast_out(broadcast_out(cond.shape, x.shape, node.name),
                                           y.shape, node.name);
                Tensor out(shape);
                std::vector<int64_t> coord(shape.size(), 0);
                for (std::size_t flat = 0; flat < out.data.size(); ++flat) {
                    float c = cond.data[broadcast_index(cond, coord)];
                    out.data[flat] = c != 0.0f ? x.data[broadcast_index(x, coord)]
                                               : y.data[broadcast_index(y, coord)];
                    for (std::size_t i = coord.size(); i-- > 0;) {
                        if (++coord[i] < shape[i]) break;
                        coord[i] = 0;
                    }
                }
                result = std::move(out);
                break;
            }
            case OpKind::Expand: {
                const auto* target = node.attr_ints("shape");
                if (!target) throw ShapeMismatch("node '" + node.name + "': missing shape");
                result = expand(in(0), *target, node.name);
                break;
            }
            case OpKind::Constant: {
                const auto* shape = node.attr_ints("shape");
                const auto* values = node.attr_reals("value");
                double scalar = node.attr_real("scalar", std::numeric_limits<double>::quiet_NaN());
                if (shape && values) {
                    Tensor t(*shape);
                    if (t.data.size() != values->size()) {
                        throw ShapeMismatch("node '" + node.name + "': constant size mismatch");
                    }
                    for (std::size_t i = 0; i < values->size(); ++i) {
                        t.data[i] = static_cast<float>((*values)[i]);
                    }
                    result = std::move(t);
                } else if (!std::isnan(scalar)) {
                    Tensor t({1});
                    t.data[0] = static_cast<float>(scalar);
                    result = std::move(t);
                } else {
                    throw UnsupportedOp("node '" + node.name +
                                        "': Constant needs shape+value or scalar");
                }
                break;
            }
            case OpKind::FusedFlashAttention: {
                AttentionSpec spec;
                spec.scale = node.attr_real("scale", 0.0);
                spec.window_left = node.attr_int("window_left", -1);
                spec.window_right = node.attr_int("window_right", -1);
                if (node.inputs.size() > 3) {
                    spec.pad_bias = in(3);
                }
                result = flash_attention(in(0), in(1), in(2), spec);
                break;
            }
        }
        if (node.outputs.size() != 1) {
            throw UnsupportedOp("node '" + node.name + "': exactly one output supported");
        }
        env[node.outputs[0]] = std::move(result);
    }

    TensorMap outputs;
    for (const auto& name : graph.outputs) {
        auto it = env.find(name);
        if (it == env.end()) {
            throw ShapeMismatch("graph output '" + name + "' was not computed");
        }
        outputs[name] = it->second;
    }
    return outputs;
}

}  // namespace routefast
