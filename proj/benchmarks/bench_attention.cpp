// Copyright 2026 The RouteFast Authors
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include <random>

#include "routefast/attention.hpp"

namespace {

struct Inputs {
    routefast::Tensor q, k, v;
};

Inputs make_inputs(int64_t seq_len, int64_t head_dim) {
    std::mt19937_64 rng(11);
    Inputs in;
    in.q = routefast::Tensor::random({1, 2, seq_len, head_dim}, rng);
    in.k = routefast::Tensor::random({1, 2, seq_len, head_dim}, rng);
    in.v = routefast::Tensor::random({1, 2, seq_len, head_dim}, rng);
    return in;
}

void BM_Sdpa(benchmark::State& state) {
    auto in = make_inputs(state.range(0), 64);
    double scale = 1.0 / 8.0;
    for (auto _ : state) {
        auto out = routefast::sdpa(in.q, in.k, in.v, nullptr, scale);
        benchmark::DoNotOptimize(out.data.data());
    }
}
BENCHMARK(BM_Sdpa)->Arg(128)->Arg(512)->Unit(benchmark::kMillisecond);

void BM_FlashAttention(benchmark::State& state) {
    auto in = make_inputs(state.range(0), 64);
    routefast::AttentionSpec spec;
    spec.scale = 1.0 / 8.0;
    for (auto _ : state) {
        auto out = routefast::flash_attention(in.q, in.k, in.v, spec);
        benchmark::DoNotOptimize(out.data.data());
    }
}
BENCHMARK(BM_FlashAttention)->Arg(128)->Arg(512)->Unit(benchmark::kMillisecond);

void BM_FlashAttentionLocalWindow(benchmark::State& state) {
    auto in = make_inputs(state.range(0), 64);
    routefast::AttentionSpec spec;
    spec.scale = 1.0 / 8.0;
    spec.window_left = 63;
    spec.window_right = 64;
    for (auto _ : state) {
        auto out = routefast::flash_attention(in.q, in.k, in.v, spec);
        benchmark::DoNotOptimize(out.data.data());
    }
}
BENCHMARK(BM_FlashAttentionLocalWindow)->Arg(512)->Unit(benchmark::kMillisecond);

}  // namespace
