// Copyright 2026 The RouteFast Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <atomic>
#include <cstddef>
#include <mutex>
#include <span>
#include <vector>

#include "routefast/term_vector.hpp"

namespace routefast {

// Recycles the flat n*n similarity matrix and power-iteration vectors so
// repeated scoring performs no quadratic allocation after warm-up. A leased
// buffer is owned by exactly one computation until the lease is destroyed.
class BufferPool {
public:
    class Lease {
    public:
        Lease(BufferPool* pool, std::vector<double> buf) : pool_(pool), buf_(std::move(buf)) {}
        Lease(Lease&& other) noexcept : pool_(other.pool_), buf_(std::move(other.buf_)) {
            other.pool_ = nullptr;
        }
        Lease& operator=(Lease&&) = delete;
        Lease(const Lease&) = delete;
        ~Lease() {
            if (pool_) pool_->give_back(std::move(buf_));
        }
        double* data() { return buf_.data(); }
        std::span<double> span(std::size_t n) { return {buf_.data(), n}; }

    private:
        BufferPool* pool_;
        std::vector<double> buf_;
    };

    // Returns a zeroed buffer with at least `n` elements.
    Lease acquire(std::size_t n);

    // Buffers created because no pooled one was large enough.
    std::size_t allocation_count() const { return allocations_.load(); }

    static BufferPool& global();

private:
    friend class Lease;
    void give_back(std::vector<double> buf);

    std::mutex mu_;
    std::vector<std::vector<double>> free_;
    std::atomic<std::size_t> allocations_{0};
};

struct SignalScores {
    std::vector<double> textrank;
    std::vector<double> position;
    std::vector<double> tfidf;
    std::vector<double> novelty;
};

struct TextRankOptions {
    double damping = 0.85;
    double tolerance = 1e-6;  // L1 change between iterations
    int max_iterations = 100;
};

// PageRank over the cosine-similarity graph of the sentence TF vectors.
// The n*n adjacency matrix lives in one flat pooled buffer; rows with zero
// out-weight are treated as uniform. Scores sum to 1.
std::vector<double> textrank(const std::vector<TermVector>& vectors,
                             const TextRankOptions& opts = {},
                             BufferPool& pool = BufferPool::global());

// Same power iteration over a caller-provided flat row-major n*n weight
// matrix (entries >= 0, diagonal ignored).
std::vector<double> textrank_from_similarity(std::span<const double> similarity, std::size_t n,
                                             const TextRankOptions& opts = {},
                                             BufferPool& pool = BufferPool::global());

// U-shaped curve w(i) = 1 - d*sin(pi*i/(n-1)); endpoints are exactly 1.0 and
// the array is symmetric by construction.
std::vector<double> position_weights(std::size_t n, double depth);

// Mean smoothed TF-IDF per token instance; idf(t) = ln((1+n)/(1+df(t))) + 1.
std::vector<double> tfidf_scores(const std::vector<TermVector>& vectors);

// 1 - cosine(tf_i, centroid) where the centroid is the mean TF vector.
std::vector<double> novelty_scores(const std::vector<TermVector>& vectors,
                                   std::size_t vocabulary_size);

}  // namespace routefast
