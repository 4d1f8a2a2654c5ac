// Copyright 2026 The RouteFast Authors
// SPDX-License-Identifier: Apache-2.0

#include "routefast/signals.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace routefast {

BufferPool::Lease BufferPool::acquire(std::size_t n) {
    {
        std::lock_guard lock(mu_);
        // best fit: smallest pooled buffer with enough capacity
        std::size_t best = free_.size();
        for (std::size_t i = 0; i < free_.size(); ++i) {
            if (free_[i].capacity() < n) continue;
            if (best == free_.size() || free_[i].capacity() < free_[best].capacity()) best = i;
        }
        if (best != free_.size()) {
            std::vector<double> buf = std::move(free_[best]);
            free_.erase(free_.begin() + static_cast<std::ptrdiff_t>(best));
            buf.assign(n, 0.0);
            return Lease(this, std::move(buf));
        }
    }
    allocations_.fetch_add(1);
    return Lease(this, std::vector<double>(n, 0.0));
}

void BufferPool::give_back(std::vector<double> buf) {
    std::lock_guard lock(mu_);
    constexpr std::size_t kMaxPooled = 8;
    if (free_.size() < kMaxPooled) {
        free_.push_back(std::move(buf));
        return;
    }
    // keep the largest buffers
    auto smallest = std::min_element(free_.begin(), free_.end(),
                                     [](const auto& a, const auto& b) {
                                         return a.capacity() < b.capacity();
                                     });
    if (smallest->capacity() < buf.capacity()) *smallest = std::move(buf);
}

BufferPool& BufferPool::global() {
    static BufferPool pool;
    return pool;
}

namespace {

std::vector<double> power_iterate(const double* w, std::size_t n, const TextRankOptions& opts,
                                  BufferPool& pool) {
    auto vec_lease = pool.acquire(2 * n);
    double* rank = vec_lease.data();
    double* next = rank + n;

    std::vector<double> row_sum(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            if (j != i) s += w[i * n + j];
        }
        row_sum[i] = s;
    }

    const double d = opts.damping;
    const double base = (1.0 - d) / static_cast<double>(n);
    std::fill(rank, rank + n, 1.0 / static_cast<double>(n));

    for (int iter = 0; iter < opts.max_iterations; ++iter) {
        std::fill(next, next + n, base);
        for (std::size_t i = 0; i < n; ++i) {
            if (row_sum[i] > 0.0) {
                double scale = d * rank[i] / row_sum[i];
                const double* row = w + i * n;
                for (std::size_t j = 0; j < n; ++j) {
                    if (j != i) next[j] += scale * row[j];
                }
            } else {
                // dangling node: distribute uniformly to keep stochasticity
                double share = d * rank[i] / static_cast<double>(n);
                for (std::size_t j = 0; j < n; ++j) next[j] += share;
            }
        }
        double delta = 0.0;
        for (std::size_t j = 0; j < n; ++j) delta += std::abs(next[j] - rank[j]);
        std::swap(rank, next);
        if (delta < opts.tolerance) break;
    }

    return {rank, rank + n};
}

}  // namespace

std::vector<double> textrank_from_similarity(std::span<const double> similarity, std::size_t n,
                                             const TextRankOptions& opts, BufferPool& pool) {
    if (n == 0) return {};
    if (n == 1) return {1.0};
    if (similarity.size() < n * n) {
        throw std::invalid_argument("textrank_from_similarity: matrix too small");
    }
    return power_iterate(similarity.data(), n, opts, pool);
}

std::vector<double> textrank(const std::vector<TermVector>& vectors,
                             const TextRankOptions& opts, BufferPool& pool) {
    const std::size_t n = vectors.size();
    if (n == 0) return {};
    if (n == 1) return {1.0};

    auto matrix_lease = pool.acquire(n * n);
    double* w = matrix_lease.data();
    for (std::size_t i = 0; i < n; ++i) {
        w[i * n + i] = 0.0;
        for (std::size_t j = i + 1; j < n; ++j) {
            double sim = cosine(vectors[i], vectors[j]);
            w[i * n + j] = sim;
            w[j * n + i] = sim;
        }
    }
    return power_iterate(w, n, opts, pool);
}

std::vector<double> position_weights(std::size_t n, double depth) {
    if (n == 0) return {};
    if (depth < 0.0 || depth > 1.0) {
        throw std::invalid_argument("position_weights: depth must be in [0,1]");
    }
    std::vector<double> w(n, 1.0);
    if (n == 1) return w;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (i > n - 1 - i) break;  // mirror the lower half for exact symmetry
        double x = std::numbers::pi * static_cast<double>(i) / static_cast<double>(n - 1);
        w[i] = 1.0 - depth * std::sin(x);
        w[n - 1 - i] = w[i];
    }
    return w;
}

std::vector<double> tfidf_scores(const std::vector<TermVector>& vectors) {
    const std::size_t n = vectors.size();
    std::vector<double> scores(n, 0.0);
    if (n == 0) return scores;

    std::unordered_map<uint32_t, std::size_t> df;
    for (const auto& v : vectors) {
        for (const auto& [id, count] : v.entries) df[id] += 1;
    }

    const double n1 = static_cast<double>(n) + 1.0;
    for (std::size_t i = 0; i < n; ++i) {
        const auto& v = vectors[i];
        if (v.total_terms == 0) continue;
        double acc = 0.0;
        for (const auto& [id, count] : v.entries) {
            double idf = std::log(n1 / (1.0 + static_cast<double>(df[id]))) + 1.0;
            acc += count * idf;
        }
        scores[i] = acc / static_cast<double>(v.total_terms);
    }
    return scores;
}

std::vector<double> novelty_scores(const std::vector<TermVector>& vectors,
                                   std::size_t vocabulary_size) {
    const std::size_t n = vectors.size();
    std::vector<double> scores(n, 0.0);
    if (n == 0) return scores;

    std::vector<double> centroid(vocabulary_size, 0.0);
    for (const auto& v : vectors) {
        for (const auto& [id, count] : v.entries) centroid[id] += count;
    }
    double norm_sq = 0.0;
    for (auto& c : centroid) {
        c /= static_cast<double>(n);
        norm_sq += c * c;
    }
    double centroid_norm = std::sqrt(norm_sq);

    for (std::size_t i = 0; i < n; ++i) {
        const auto& v = vectors[i];
        double cos_sim = 0.0;  // zero-norm convention, same as cosine()
        if (v.norm != 0.0 && centroid_norm != 0.0) {
            double acc = 0.0;
            for (const auto& [id, count] : v.entries) acc += count * centroid[id];
            cos_sim = std::clamp(acc / (v.norm * centroid_norm), 0.0, 1.0);
        }
        scores[i] = 1.0 - cos_sim;
    }
    return scores;
}

}  // namespace routefast
