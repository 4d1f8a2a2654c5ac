// Copyright 2026 The RouteFast Authors
// SPDX-License-Identifier: Apache-2.0

#include "routefast/graph.hpp"

#include <algorithm>
#include <array>
#include <queue>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "json.hpp"

namespace routefast {

using ordered_json = nlohmann::ordered_json;

std::string_view dtype_name(DType dtype) { return dtype == DType::f32 ? "f32" : "f16"; }

DType dtype_from_name(std::string_view name) {
    if (name == "f32") return DType::f32;
    if (name == "f16") return DType::f16;
    throw SchemaError("unknown dtype: " + std::string(name));
}

namespace {

constexpr std::array<std::pair<OpKind, std::string_view>, 11> kOpNames{{
    {OpKind::MatMul, "MatMul"},
    {OpKind::Add, "Add"},
    {OpKind::Sub, "Sub"},
    {OpKind::Mul, "Mul"},
    {OpKind::Softmax, "Softmax"},
    {OpKind::Transpose, "Transpose"},
    {OpKind::Cast, "Cast"},
    {OpKind::Where, "Where"},
    {OpKind::Expand, "Expand"},
    {OpKind::Constant, "Constant"},
    {OpKind::FusedFlashAttention, "FusedFlashAttention"},
}};

}  // namespace

std::string_view op_name(OpKind op) {
    for (const auto& [kind, name] : kOpNames) {
        if (kind == op) return name;
    }
    return "Constant";
}

OpKind op_from_name(std::string_view name) {
    for (const auto& [kind, op] : kOpNames) {
        if (op == name) return kind;
    }
    throw SchemaError("unknown op: " + std::string(name));
}

int64_t Node::attr_int(std::string_view key, int64_t fallback) const {
    auto it = attrs.find(std::string(key));
    if (it == attrs.end()) return fallback;
    if (const auto* v = std::get_if<int64_t>(&it->second)) return *v;
    if (const auto* d = std::get_if<double>(&it->second)) return static_cast<int64_t>(*d);
    throw SchemaError("attribute '" + std::string(key) + "' is not an integer");
}

double Node::attr_real(std::string_view key, double fallback) const {
    auto it = attrs.find(std::string(key));
    if (it == attrs.end()) return fallback;
    if (const auto* v = std::get_if<double>(&it->second)) return *v;
    if (const auto* i = std::get_if<int64_t>(&it->second)) return static_cast<double>(*i);
    throw SchemaError("attribute '" + std::string(key) + "' is not a number");
}

const std::vector<int64_t>* Node::attr_ints(std::string_view key) const {
    auto it = attrs.find(std::string(key));
    if (it == attrs.end()) return nullptr;
    return std::get_if<std::vector<int64_t>>(&it->second);
}

const std::vector<double>* Node::attr_reals(std::string_view key) const {
    auto it = attrs.find(std::string(key));
    if (it == attrs.end()) return nullptr;
    return std::get_if<std::vector<double>>(&it->second);
}

const std::string* Node::attr_string(std::string_view key) const {
    auto it = attrs.find(std::string(key));
    if (it == attrs.end()) return nullptr;
    return std::get_if<std::string>(&it->second);
}

namespace {

std::vector<int64_t> parse_shape(const ordered_json& j, const char* what) {
    if (!j.is_array()) throw SchemaError(std::string(what) + ": shape must be an array");
    std::vector<int64_t> shape;
    for (const auto& d : j) {
        if (!d.is_number_integer()) {
            throw SchemaError(std::string(what) + ": shape entries must be integers");
        }
        shape.push_back(d.get<int64_t>());
    }
    return shape;
}

AttrValue parse_attr(const ordered_json& j, const std::string& key) {
    if (j.is_number_integer()) return j.get<int64_t>();
    if (j.is_number_float()) return j.get<double>();
    if (j.is_string()) return j.get<std::string>();
    if (j.is_array()) {
        bool all_int = true;
        for (const auto& e : j) {
            if (!e.is_number_integer()) all_int = false;
            if (!e.is_number()) throw SchemaError("attribute '" + key + "': bad array element");
        }
        if (all_int) {
            std::vector<int64_t> v;
            for (const auto& e : j) v.push_back(e.get<int64_t>());
            return v;
        }
        std::vector<double> v;
        for (const auto& e : j) v.push_back(e.get<double>());
        return v;
    }
    throw SchemaError("attribute '" + key + "': unsupported value type");
}

ordered_json attr_to_json(const AttrValue& v) {
    return std::visit([](const auto& x) { return ordered_json(x); }, v);
}

const ordered_json& require(const ordered_json& j, const char* key, const char* ctx) {
    auto it = j.find(key);
    if (it == j.end()) {
        throw SchemaError(std::string(ctx) + ": missing required field '" + key + "'");
    }
    return *it;
}

}  // namespace

Graph parse_graph(std::string_view json_text) {
    ordered_json j = ordered_json::parse(json_text, nullptr, false);
    if (j.is_discarded()) throw SchemaError("graph JSON does not parse");
    if (!j.is_object()) throw SchemaError("graph JSON must be an object");

    Graph g;
    for (const auto& ji : require(j, "inputs", "graph")) {
        TensorDecl decl;
        decl.name = require(ji, "name", "input").get<std::string>();
        decl.shape = parse_shape(require(ji, "shape", "input"), "input");
        decl.dtype = dtype_from_name(require(ji, "dtype", "input").get<std::string>());
        g.inputs.push_back(std::move(decl));
    }
    for (const auto& jo : require(j, "outputs", "graph")) {
        if (!jo.is_string()) throw SchemaError("outputs must be tensor names");
        g.outputs.push_back(jo.get<std::string>());
    }
    for (const auto& jn : require(j, "nodes", "graph")) {
        Node node;
        node.name = require(jn, "name", "node").get<std::string>();
        node.op = op_from_name(require(jn, "op", "node").get<std::string>());
        for (const auto& i : require(jn, "inputs", "node")) {
            node.inputs.push_back(i.get<std::string>());
        }
        for (const auto& o : require(jn, "outputs", "node")) {
            node.outputs.push_back(o.get<std::string>());
        }
        if (auto it = jn.find("attrs"); it != jn.end()) {
            for (const auto& [key, value] : it->items()) {
                node.attrs.emplace(key, parse_attr(value, key));
            }
        }
        g.nodes.push_back(std::move(node));
    }
    if (auto it = j.find("initializers"); it != j.end()) {
        for (const auto& jt : *it) {
            Initializer init;
            init.name = require(jt, "name", "initializer").get<std::string>();
            init.shape = parse_shape(require(jt, "shape", "initializer"), "initializer");
            init.dtype = dtype_from_name(require(jt, "dtype", "initializer").get<std::string>());
            for (const auto& v : require(jt, "data", "initializer")) {
                if (!v.is_number()) throw SchemaError("initializer data must be numeric");
                init.data.push_back(v.get<double>());
            }
            g.initializers.push_back(std::move(init));
        }
    }

    validate_graph(g);
    return g;
}

std::string serialize_graph(const Graph& graph) {
    ordered_json j;
    j["inputs"] = ordered_json::array();
    for (const auto& in : graph.inputs) {
        ordered_json ji;
        ji["name"] = in.name;
        ji["shape"] = in.shape;
        ji["dtype"] = std::string(dtype_name(in.dtype));
        j["inputs"].push_back(std::move(ji));
    }
    j["outputs"] = graph.outputs;
    j["nodes"] = ordered_json::array();
    for (const auto& node : graph.nodes) {
        ordered_json jn;
        jn["name"] = node.name;
        jn["op"] = std::string(op_name(node.op));
        jn["inputs"] = node.inputs;
        jn["outputs"] = node.outputs;
        if (!node.attrs.empty()) {
            ordered_json attrs;
            for (const auto& [key, value] : node.attrs) attrs[key] = attr_to_json(value);
            jn["attrs"] = std::move(attrs);
        }
        j["nodes"].push_back(std::move(jn));
    }
    j["initializers"] = ordered_json::array();
    for (const auto& init : graph.initializers) {
        ordered_json jt;
        jt["name"] = init.name;
        jt["shape"] = init.shape;
        jt["dtype"] = std::string(dtype_name(init.dtype));
        jt["data"] = init.data;
        j["initializers"].push_back(std::move(jt));
    }
    return j.dump(2);
}

void validate_graph(const Graph& graph) {
    std::unordered_set<std::string> produced;
    auto claim = [&](const std::string& name, const char* what) {
        if (!produced.insert(name).second) {
            throw ValidationError("tensor '" + name + "' has more than one producer (" +
                                  what + ")");
        }
    };
    for (const auto& in : graph.inputs) claim(in.name, "graph input");
    for (const auto& init : graph.initializers) claim(init.name, "initializer");
    for (const auto& node : graph.nodes) {
        if (node.outputs.empty()) {
            throw ValidationError("node '" + node.name + "' has no outputs");
        }
        for (const auto& out : node.outputs) claim(out, "node output");
    }
    for (const auto& node : graph.nodes) {
        for (const auto& in : node.inputs) {
            if (!produced.count(in)) {
                throw ValidationError("node '" + node.name + "' reads unresolved tensor '" +
                                      in + "'");
            }
        }
    }
    for (const auto& out : graph.outputs) {
        if (!produced.count(out)) {
            throw ValidationError("graph output '" + out + "' is not produced");
        }
    }
    for (const auto& init : graph.initializers) {
        std::size_t numel = 1;
        for (int64_t d : init.shape) numel *= static_cast<std::size_t>(std::max<int64_t>(d, 0));
        if (numel != init.data.size()) {
            throw ValidationError("initializer '" + init.name + "' data length " +
                                  std::to_string(init.data.size()) + " != shape product " +
                                  std::to_string(numel));
        }
    }
    topological_order(graph);  // throws on cycles
}

std::vector<std::size_t> topological_order(const Graph& graph) {
    std::unordered_map<std::string, std::size_t> producer;  // tensor -> node index
    for (std::size_t i = 0; i < graph.nodes.size(); ++i) {
        for (const auto& out : graph.nodes[i].outputs) producer[out] = i;
    }
    std::vector<std::vector<std::size_t>> consumers(graph.nodes.size());
    std::vector<std::size_t> indegree(graph.nodes.size(), 0);
    for (std::size_t i = 0; i < graph.nodes.size(); ++i) {
        std::set<std::size_t> deps;
        for (const auto& in : graph.nodes[i].inputs) {
            auto it = producer.find(in);
            if (it != producer.end()) deps.insert(it->second);
        }
        indegree[i] = deps.size();
        for (std::size_t dep : deps) consumers[dep].push_back(i);
    }

    // stable Kahn: lowest original index first
    std::priority_queue<std::size_t, std::vector<std::size_t>, std::greater<>> ready;
    for (std::size_t i = 0; i < graph.nodes.size(); ++i) {
        if (indegree[i] == 0) ready.push(i);
    }
    std::vector<std::size_t> order;
    order.reserve(graph.nodes.size());
    while (!ready.empty()) {
        std::size_t i = ready.top();
        ready.pop();
        order.push_back(i);
        for (std::size_t c : consumers[i]) {
            if (--indegree[c] == 0) ready.push(c);
        }
    }
    if (order.size() != graph.nodes.size()) {
        throw ValidationError("graph contains a cycle");
    }
    return order;
}

namespace {

std::vector<int64_t> broadcast_shapes(const std::vector<int64_t>& a,
                                      const std::vector<int64_t>& b,
                                      const std::string& node_name) {
    std::vector<int64_t> out(std::max(a.size(), b.size()), 1);
    for (std::size_t i = 0; i < out.size(); ++i) {
        int64_t da = i < out.size() - a.size() ? 1 : a[i - (out.size() - a.size())];
        int64_t db = i < out.size() - b.size() ? 1 : b[i - (out.size() - b.size())];
        if (da != db && da != 1 && db != 1) {
            throw ValidationError("node '" + node_name + "': shapes not broadcastable");
        }
        out[i] = std::max(da, db);
    }
    return out;
}

}  // namespace

std::map<std::string, std::vector<int64_t>> infer_shapes(const Graph& graph) {
    std::map<std::string, std::vector<int64_t>> shapes;
    for (const auto& in : graph.inputs) shapes[in.name] = in.shape;
    for (const auto& init : graph.initializers) shapes[init.name] = init.shape;

    for (std::size_t idx : topological_order(graph)) {
        const Node& node = graph.nodes[idx];
        auto shape_of = [&](std::size_t i) -> const std::vector<int64_t>& {
            auto it = shapes.find(node.inputs.at(i));
            if (it == shapes.end()) {
                throw ValidationError("node '" + node.name + "': unknown input shape");
            }
            return it->second;
        };

        std::vector<int64_t> out;
        switch (node.op) {
            case OpKind::Add:
            case OpKind::Sub:
            case OpKind::Mul:
                out = broadcast_shapes(shape_of(0), shape_of(1), node.name);
                break;
            case OpKind::Where: {
                auto cx = broadcast_shapes(shape_of(0), shape_of(1), node.name);
                out = broadcast_shapes(cx, shape_of(2), node.name);
                break;
            }
            case OpKind::Softmax:
            case OpKind::Cast:
                out = shape_of(0);
                break;
            case OpKind::Transpose: {
                const auto& in = shape_of(0);
                const auto* perm = node.attr_ints("perm");
                if (!perm || perm->size() != in.size()) {
                    throw ValidationError("node '" + node.name + "': bad transpose perm");
                }
                out.resize(in.size());
                for (std::size_t i = 0; i < in.size(); ++i) {
                    out[i] = in.at(static_cast<std::size_t>((*perm)[i]));
                }
                break;
            }
            case OpKind::Expand: {
                const auto* target = node.attr_ints("shape");
                if (!target) {
                    throw ValidationError("node '" + node.name + "': Expand needs shape attr");
                }
                out = broadcast_shapes(shape_of(0), *target, node.name);
                break;
            }
            case OpKind::Constant: {
                const auto* shape = node.attr_ints("shape");
                if (!shape) {
                    throw ValidationError("node '" + node.name + "': Constant needs shape attr");
                }
                out = *shape;
                break;
            }
            case OpKind::MatMul: {
                const auto& a = shape_of(0);
                const auto& b = shape_of(1);
                if (a.size() < 2 || b.size() < 2) {
                    throw ValidationError("node '" + node.name + "': MatMul needs rank >= 2");
                }
                if (a[a.size() - 1] != b[b.size() - 2]) {
                    throw ValidationError("node '" + node.name + "': MatMul inner dims differ");
                }
                std::vector<int64_t> batch_a(a.begin(), a.end() - 2);
                std::vector<int64_t> batch_b(b.begin(), b.end() - 2);
                out = broadcast_shapes(batch_a, batch_b, node.name);
                out.push_back(a[a.size() - 2]);
                out.push_back(b[b.size() - 1]);
                break;
            }
            case OpKind::FusedFlashAttention:
                out = shape_of(0);  // same as Q
                break;
        }
        for (const auto& name : node.outputs) shapes[name] = out;
    }
    return shapes;
}

}  // namespace routefast
