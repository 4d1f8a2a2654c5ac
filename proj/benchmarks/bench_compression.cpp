// Copyright 2026 The RouteFast Authors
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include "routefast/compress.hpp"
#include "routefast/corpus.hpp"
#include "routefast/signals.hpp"

namespace {

routefast::CorpusDoc doc_of_size(std::size_t tokens) {
    routefast::CorpusOptions opts;
    opts.seed = 7;
    opts.target_tokens = tokens;
    return routefast::generate_doc(opts, 0);
}

void BM_Compress(benchmark::State& state) {
    auto doc = doc_of_size(static_cast<std::size_t>(state.range(0)));
    routefast::CompressionConfig config;
    for (auto _ : state) {
        auto result = routefast::compress(doc.text, config);
        benchmark::DoNotOptimize(result.output_tokens);
    }
    state.SetLabel(std::to_string(doc.token_estimate) + " tokens");
}
BENCHMARK(BM_Compress)->Arg(2000)->Arg(4000)->Arg(8000)->Arg(16000)->Unit(benchmark::kMillisecond);

void BM_TextRank(benchmark::State& state) {
    auto doc = doc_of_size(static_cast<std::size_t>(state.range(0)));
    auto sentences = routefast::split_sentences(doc.text);
    sentences = routefast::cap_sentences(std::move(sentences), 500);
    routefast::TermDictionary dict;
    std::vector<routefast::TermVector> vectors;
    for (const auto& s : sentences) vectors.push_back(routefast::build_term_vector(s.text, dict));
    for (auto _ : state) {
        auto scores = routefast::textrank(vectors);
        benchmark::DoNotOptimize(scores.data());
    }
    state.SetLabel(std::to_string(vectors.size()) + " sentences");
}
BENCHMARK(BM_TextRank)->Arg(2000)->Arg(16000)->Unit(benchmark::kMillisecond);

void BM_SplitSentences(benchmark::State& state) {
    auto doc = doc_of_size(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        auto sentences = routefast::split_sentences(doc.text);
        benchmark::DoNotOptimize(sentences.size());
    }
}
BENCHMARK(BM_SplitSentences)->Arg(2000)->Arg(16000)->Unit(benchmark::kMicrosecond);

}  // namespace
