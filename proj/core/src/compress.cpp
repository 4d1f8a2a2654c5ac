// Copyright 2026 The RouteFast Authors
// SPDX-License-Identifier: Apache-2.0

#include "routefast/compress.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace routefast {

void CompressionConfig::validate() const {
    if (max_tokens < 16) throw std::invalid_argument("max_tokens must be >= 16");
    double sum = 0.0;
    for (double w : weights) {
        if (w < 0.0) throw std::invalid_argument("weights must be >= 0");
        sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw std::invalid_argument("weights must sum to 1");
    if (curve_depth < 0.0 || curve_depth > 1.0) {
        throw std::invalid_argument("curve_depth must be in [0,1]");
    }
    if (sentence_cap < 2) throw std::invalid_argument("sentence_cap must be >= 2");
}

namespace {

void max_normalize(std::vector<double>& v) {
    double mx = 0.0;
    for (double x : v) mx = std::max(mx, x);
    if (mx <= 0.0) return;  // all-zero stays zero
    for (double& x : v) x /= mx;
}

// Incremental token estimate of the space-joined selection. Tracks raw
// codepoint tallies so adding a sentence is O(1) and exact.
struct JoinBudget {
    std::size_t latin = 0;
    std::size_t cjk = 0;
    std::size_t count = 0;

    std::size_t tokens_with(const Sentence& s) const {
        std::size_t l = latin + s.latin_chars + (count > 0 ? 1 : 0);  // joining space
        std::size_t c = cjk + s.cjk_chars;
        return (l + 3) / 4 + c;
    }
    void add(const Sentence& s) {
        latin += s.latin_chars + (count > 0 ? 1 : 0);
        cjk += s.cjk_chars;
        ++count;
    }
    std::size_t tokens() const { return (latin + 3) / 4 + cjk; }
};

}  // namespace

std::vector<double> composite_rank(const SignalScores& signals,
                                   const std::array<double, 4>& weights) {
    SignalScores s = signals;
    max_normalize(s.textrank);
    max_normalize(s.position);
    max_normalize(s.tfidf);
    max_normalize(s.novelty);

    const std::size_t n = s.textrank.size();
    std::vector<double> rank(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        rank[i] = weights[0] * s.textrank[i] + weights[1] * s.position[i] +
                  weights[2] * s.tfidf[i] + weights[3] * s.novelty[i];
    }
    return rank;
}

CompressedPrompt compress(std::string_view text, const CompressionConfig& config) {
    return compress_prepared(text, PreparedDocument{}, config);
}

CompressedPrompt compress_prepared(std::string_view text, PreparedDocument prepared,
                                   const CompressionConfig& config) {
    config.validate();
    const auto start = std::chrono::steady_clock::now();
    CompressedPrompt out;

    out.input_tokens = estimate_tokens(text);
    if (text.empty()) {
        out.ratio = 1.0;
        out.duration = std::chrono::duration_cast<std::chrono::microseconds>(
            std::chrono::steady_clock::now() - start);
        return out;
    }

    if (prepared.sentences.empty()) {
        prepared.sentences = split_sentences(text);
    }
    auto& sentences = prepared.sentences;

    // Under budget: identity. The compressed view exists only for the
    // classifiers; small prompts are evaluated as-is.
    if (out.input_tokens <= config.max_tokens) {
        out.text.assign(text);
        out.selected_indices.resize(sentences.size());
        std::iota(out.selected_indices.begin(), out.selected_indices.end(), std::size_t{0});
        out.output_tokens = out.input_tokens;
        out.ratio = 1.0;
        out.duration = std::chrono::duration_cast<std::chrono::microseconds>(
            std::chrono::steady_clock::now() - start);
        return out;
    }

    std::vector<TermVector> vectors = std::move(prepared.vectors);
    if (sentences.size() > config.sentence_cap) {
        // Keep vectors aligned with the sampled sentences.
        if (!vectors.empty()) {
            std::vector<Sentence> idx_only = sentences;
            idx_only = cap_sentences(std::move(idx_only), config.sentence_cap);
            std::vector<TermVector> kept;
            kept.reserve(idx_only.size());
            std::size_t cursor = 0;
            for (const auto& s : idx_only) {
                while (sentences[cursor].index != s.index) ++cursor;
                kept.push_back(std::move(vectors[cursor]));
            }
            vectors = std::move(kept);
            sentences = std::move(idx_only);
        } else {
            sentences = cap_sentences(std::move(sentences), config.sentence_cap);
        }
    }
    const std::size_t n = sentences.size();

    if (vectors.empty()) {
        TermDictionary dict;
        vectors.reserve(n);
        for (const auto& s : sentences) vectors.push_back(build_term_vector(s.text, dict));
    }
    std::size_t vocab = 0;
    for (const auto& v : vectors) {
        for (const auto& [id, count] : v.entries) vocab = std::max<std::size_t>(vocab, id + 1);
    }

    SignalScores signals;
    signals.textrank = textrank(vectors, config.textrank);
    signals.position = position_weights(n, config.curve_depth);
    signals.tfidf = tfidf_scores(vectors);
    signals.novelty = novelty_scores(vectors, vocab);
    std::vector<double> rank = composite_rank(signals, config.weights);

    // Boundary sentences are forced in regardless of score; they consume
    // budget first. If they alone exceed the budget they are still emitted.
    std::vector<char> selected(n, 0);
    JoinBudget budget;
    const std::size_t first_n = std::min(config.preserve_first, n);
    const std::size_t last_start = n - std::min(config.preserve_last, n);
    for (std::size_t i = 0; i < n; ++i) {
        if (i < first_n || i >= last_start) {
            selected[i] = 1;
            budget.add(sentences[i]);
        }
    }

    std::vector<std::size_t> order;
    order.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!selected[i]) order.push_back(i);
    }
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (rank[a] != rank[b]) return rank[a] > rank[b];
        return a < b;  // ties favor earlier sentences
    });

    // Greedy prefix fill: stop at the first candidate that does not fit, so
    // a larger budget can only extend the selection.
    for (std::size_t i : order) {
        if (budget.tokens_with(sentences[i]) > config.max_tokens) break;
        selected[i] = 1;
        budget.add(sentences[i]);
    }

    for (std::size_t i = 0; i < n; ++i) {
        if (!selected[i]) continue;
        if (!out.text.empty()) out.text.push_back(' ');
        out.text += sentences[i].text;
        out.selected_indices.push_back(sentences[i].index);
    }

    out.output_tokens = estimate_tokens(out.text);
    out.ratio = out.input_tokens == 0
                    ? 1.0
                    : static_cast<double>(out.output_tokens) /
                          static_cast<double>(out.input_tokens);
    out.duration = std::chrono::duration_cast<std::chrono::microseconds>(
        std::chrono::steady_clock::now() - start);
    return out;
}

}  // namespace routefast
