// Copyright 2026 The RouteFast Authors
// SPDX-License-Identifier: Apache-2.0

#include "routefast/metrics.hpp"

#include <array>
#include <cstdio>

namespace routefast {

namespace {

constexpr std::array<double, 11> kBucketBoundsMs = {0.5, 1,   2,   5,    10,  20,
                                                    50,  100, 200, 500, 1000};

std::string format_value(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

}  // namespace

std::string MetricsRegistry::series_key(std::string_view name, const Labels& labels) {
    std::string key(name);
    if (!labels.empty()) {
        key += "{";
        for (std::size_t i = 0; i < labels.size(); ++i) {
            if (i) key += ",";
            key += labels[i].first;
            key += "=\"";
            key += labels[i].second;
            key += "\"";
        }
        key += "}";
    }
    return key;
}

void MetricsRegistry::inc(std::string_view name, const Labels& labels, uint64_t delta) {
    std::lock_guard lock(mu_);
    counters_[series_key(name, labels)] += delta;
}

void MetricsRegistry::observe_ms(std::string_view stage, double ms) {
    std::lock_guard lock(mu_);
    auto& h = histograms_[std::string(stage)];
    if (h.bucket_counts.empty()) h.bucket_counts.assign(kBucketBoundsMs.size() + 1, 0);
    std::size_t b = 0;
    while (b < kBucketBoundsMs.size() && ms > kBucketBoundsMs[b]) ++b;
    h.bucket_counts[b] += 1;
    h.sum += ms;
    h.count += 1;
}

uint64_t MetricsRegistry::counter(std::string_view name, const Labels& labels) const {
    std::lock_guard lock(mu_);
    auto it = counters_.find(series_key(name, labels));
    return it == counters_.end() ? 0 : it->second;
}

std::string MetricsRegistry::snapshot() const {
    std::lock_guard lock(mu_);
    std::string out;
    for (const auto& [key, value] : counters_) {
        out += key;
        out += " ";
        out += std::to_string(value);
        out += "\n";
    }
    for (const auto& [stage, h] : histograms_) {
        uint64_t cumulative = 0;
        for (std::size_t b = 0; b < h.bucket_counts.size(); ++b) {
            cumulative += h.bucket_counts[b];
            std::string le = b < kBucketBoundsMs.size() ? format_value(kBucketBoundsMs[b])
                                                        : std::string("+Inf");
            out += "routefast_stage_duration_ms_bucket{stage=\"" + stage + "\",le=\"" + le +
                   "\"} " + std::to_string(cumulative) + "\n";
        }
        out += "routefast_stage_duration_ms_sum{stage=\"" + stage + "\"} " +
               format_value(h.sum) + "\n";
        out += "routefast_stage_duration_ms_count{stage=\"" + stage + "\"} " +
               std::to_string(h.count) + "\n";
    }
    return out;
}

}  // namespace routefast
