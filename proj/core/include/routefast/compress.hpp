// Copyright 2026 The RouteFast Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <chrono>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "routefast/segment.hpp"
#include "routefast/signals.hpp"

namespace routefast {

struct CompressionConfig {
    std::size_t max_tokens = 512;
    // composite weights for (textrank, position, tfidf, novelty); sum to 1
    std::array<double, 4> weights{0.20, 0.40, 0.35, 0.05};
    double curve_depth = 0.5;
    std::size_t preserve_first = 3;
    std::size_t preserve_last = 2;
    std::size_t sentence_cap = 500;
    TextRankOptions textrank;

    void validate() const;  // throws std::invalid_argument
};

struct CompressedPrompt {
    std::string text;
    std::vector<std::size_t> selected_indices;  // ascending original indices
    std::size_t input_tokens = 0;
    std::size_t output_tokens = 0;
    double ratio = 1.0;  // output/input token estimate; 1.0 for empty input
    std::chrono::microseconds duration{0};
};

// Max-normalizes each signal independently (all-zero arrays stay zero) and
// combines them linearly with the given weights. Result is in [0, 1].
std::vector<double> composite_rank(const SignalScores& signals,
                                   const std::array<double, 4>& weights);

// Full pipeline: split -> cap -> score -> rank -> boundary-preserve ->
// greedy budget fill -> reassemble in original order. Inputs already within
// the token budget pass through verbatim.
CompressedPrompt compress(std::string_view text, const CompressionConfig& config = {});

// Pre-segmented document, as produced by the incremental NLP accumulator.
// `vectors` must be parallel to `sentences` (both may be empty).
struct PreparedDocument {
    std::vector<Sentence> sentences;
    std::vector<TermVector> vectors;
};

// Same pipeline, reusing segmentation and term vectors computed while the
// body was still streaming in. Produces byte-identical output to
// compress(text, config) when `prepared` matches split_sentences(text).
CompressedPrompt compress_prepared(std::string_view text, PreparedDocument prepared,
                                   const CompressionConfig& config = {});

}  // namespace routefast
