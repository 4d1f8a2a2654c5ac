// Copyright 2026 The RouteFast Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

namespace routefast {

// Monotonic counters plus per-stage latency histograms, safe for concurrent
// increment. Exposition is line-oriented `name{labels} value` text with
// stable (sorted) ordering.
class MetricsRegistry {
public:
    using Labels = std::vector<std::pair<std::string, std::string>>;

    void inc(std::string_view name, const Labels& labels, uint64_t delta = 1);
    void observe_ms(std::string_view stage, double ms);

    uint64_t counter(std::string_view name, const Labels& labels) const;
    std::string snapshot() const;

private:
    static std::string series_key(std::string_view name, const Labels& labels);

    struct Histogram {
        std::vector<uint64_t> bucket_counts;
        double sum = 0.0;
        uint64_t count = 0;
    };

    mutable std::mutex mu_;
    std::map<std::string, uint64_t> counters_;
    std::map<std::string, Histogram> histograms_;
};

}  // namespace routefast
