// Copyright 2026 The RouteFast Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace routefast {

// The JSON text does not conform to the graph schema (missing/mistyped field).
class SchemaError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// The graph violates single assignment, has a cycle, or an unresolved input.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class DType { f32, f16 };

std::string_view dtype_name(DType dtype);
DType dtype_from_name(std::string_view name);  // throws SchemaError

enum class OpKind {
    MatMul,
    Add,
    Sub,
    Mul,
    Softmax,
    Transpose,
    Cast,
    Where,
    Expand,
    Constant,
    FusedFlashAttention,
};

std::string_view op_name(OpKind op);
OpKind op_from_name(std::string_view name);  // throws SchemaError

using AttrValue = std::variant<int64_t, double, std::string, std::vector<int64_t>,
                               std::vector<double>>;

struct TensorDecl {
    std::string name;
    std::vector<int64_t> shape;
    DType dtype = DType::f32;
};

struct Node {
    std::string name;
    OpKind op = OpKind::Constant;
    std::vector<std::string> inputs;
    std::vector<std::string> outputs;
    std::map<std::string, AttrValue> attrs;

    int64_t attr_int(std::string_view key, int64_t fallback) const;
    double attr_real(std::string_view key, double fallback) const;
    const std::vector<int64_t>* attr_ints(std::string_view key) const;
    const std::vector<double>* attr_reals(std::string_view key) const;
    const std::string* attr_string(std::string_view key) const;
};

struct Initializer {
    std::string name;
    std::vector<int64_t> shape;
    DType dtype = DType::f32;
    std::vector<double> data;  // row-major
};

// JSON-serializable computation-graph IR. Single assignment: every tensor
// name is produced by exactly one node output, initializer, or graph input.
struct Graph {
    std::vector<TensorDecl> inputs;
    std::vector<std::string> outputs;
    std::vector<Node> nodes;
    std::vector<Initializer> initializers;
};

// Parses and validates; topological order is checked as part of validation.
Graph parse_graph(std::string_view json_text);

// Deterministic serialization (stable key and element order).
std::string serialize_graph(const Graph& graph);

// Throws ValidationError on duplicate producers, unresolved inputs, cycles,
// or duplicate/unknown output names.
void validate_graph(const Graph& graph);

// Node execution order; throws ValidationError when the graph has a cycle.
std::vector<std::size_t> topological_order(const Graph& graph);

// Static shapes for every tensor in the graph (inputs, initializers, node
// outputs). Broadcasting follows numpy rules; MatMul contracts the last two
// dims. Throws ValidationError when shapes are inconsistent.
std::map<std::string, std::vector<int64_t>> infer_shapes(const Graph& graph);

}  // namespace routefast
