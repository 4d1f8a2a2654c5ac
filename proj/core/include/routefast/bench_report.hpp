// Copyright 2026 The RouteFast Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "routefast/compress.hpp"
#include "routefast/corpus.hpp"

namespace routefast {

struct BenchRow {
    std::size_t tokens = 0;       // nominal corpus size
    std::string mode = "compress";
    std::size_t iters = 0;
    double mean_ms = 0.0;
    double p50_ms = 0.0;
    double mean_ratio = 0.0;
    double mean_output_tokens = 0.0;
    std::size_t max_output_tokens = 0;
    std::size_t budget_violations = 0;  // docs whose output exceeded max_tokens
};

struct BenchReport {
    static constexpr int kSchemaVersion = 1;
    uint64_t seed = 0;
    std::vector<BenchRow> rows;

    std::string to_json() const;
    std::string to_table() const;
};

struct BenchOptions {
    std::vector<std::size_t> sizes{2000, 4000, 8000, 16000};
    std::size_t iters = 96;
    uint64_t seed = 42;
    bool parallel = false;
    CompressionConfig compression;
};

// Compresses `iters` seeded corpus docs per size and reports latency and
// ratio statistics. In-process and CPU-only; results are independent of the
// --parallel worker split.
BenchReport run_bench(const BenchOptions& options);

}  // namespace routefast
