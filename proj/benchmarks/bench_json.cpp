// Copyright 2026 The RouteFast Authors
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include "json.hpp"
#include "routefast/corpus.hpp"
#include "routefast/json_scan.hpp"

namespace {

std::string body_of_size(std::size_t tokens) {
    routefast::CorpusOptions opts;
    opts.seed = 7;
    opts.target_tokens = tokens;
    auto doc = routefast::generate_doc(opts, 0);
    return routefast::make_chat_body("auto", "You route requests.", doc.text);
}

void BM_ExtractModelScan(benchmark::State& state) {
    std::string body = body_of_size(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        auto v = routefast::extract_field(body, "model");
        benchmark::DoNotOptimize(v);
    }
    state.SetBytesProcessed(static_cast<int64_t>(state.iterations() * body.size()));
}
BENCHMARK(BM_ExtractModelScan)->Arg(2000)->Arg(16000);

void BM_ExtractModelFullParse(benchmark::State& state) {
    std::string body = body_of_size(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        auto j = nlohmann::json::parse(body);
        auto model = j.at("model").get<std::string>();
        benchmark::DoNotOptimize(model);
    }
    state.SetBytesProcessed(static_cast<int64_t>(state.iterations() * body.size()));
}
BENCHMARK(BM_ExtractModelFullParse)->Arg(2000)->Arg(16000);

void BM_RewriteModel(benchmark::State& state) {
    std::string body = body_of_size(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        auto out = routefast::rewrite_model(body, "model-finance");
        benchmark::DoNotOptimize(out.size());
    }
    state.SetBytesProcessed(static_cast<int64_t>(state.iterations() * body.size()));
}
BENCHMARK(BM_RewriteModel)->Arg(2000)->Arg(16000);

}  // namespace
