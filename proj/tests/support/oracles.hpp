// Copyright 2026 The RouteFast Authors
// SPDX-License-Identifier: Apache-2.0
//
// Independent reference implementations used as test oracles. These must not
// share code paths with the library implementations they check.

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "routefast/tensor.hpp"

namespace routefast::testing {

// Dense-matrix PageRank: builds the full Google matrix in doubles and power-
// iterates it. Same damping/tolerance semantics as the library textrank.
std::vector<double> pagerank_reference(const std::vector<std::vector<double>>& similarity,
                                       double damping = 0.85, double tolerance = 1e-6,
                                       int max_iterations = 100);

// Full-parse JSON oracle on a dot-path (supports numeric indexes, not '#').
// JSON null and missing paths both come back as nullopt.
std::optional<nlohmann::json> full_parse_extract(const std::string& body,
                                                 const std::string& path);

// All messages[i].content string values, via full parse.
std::vector<std::string> full_parse_contents(const std::string& body);

// Straightforward double-precision SDPA without masking (independent of the
// library implementation; used for the random-input agreement check).
std::vector<double> sdpa_double_reference(const std::vector<double>& q,
                                          const std::vector<double>& k,
                                          const std::vector<double>& v, int64_t batch,
                                          int64_t heads, int64_t seq, int64_t dim,
                                          double scale);

// Brute-force window/padding predicate for one (i, j) pair.
bool window_live_reference(int64_t i, int64_t j, int64_t window_left, int64_t window_right,
                           const std::vector<bool>& padded);

}  // namespace routefast::testing
