// Copyright 2026 The RouteFast Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <string>

#include "routefast/graph.hpp"
#include "routefast/tensor.hpp"

namespace routefast {

class UnsupportedOp : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

using TensorMap = std::map<std::string, Tensor>;

// Executes the graph in topological order over the bound inputs and returns
// the graph outputs. FusedFlashAttention dispatches to flash_attention;
// Cast(f16) applies round-trip quantization. Shape errors identify the
// failing node by name.
TensorMap interpret(const Graph& graph, const TensorMap& inputs);

}  // namespace routefast
