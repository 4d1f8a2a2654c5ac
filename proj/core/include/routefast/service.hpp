// Copyright 2026 The RouteFast Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <chrono>
#include <map>
#include <memory>
#include <string>

#include "routefast/compress.hpp"
#include "routefast/metrics.hpp"
#include "routefast/stream.hpp"

namespace routefast {

struct ServiceConfig {
    std::string host = "127.0.0.1";
    int port = 8080;  // 0 = pick a free port
    std::size_t max_body_bytes = 10 * 1024 * 1024;
    double jailbreak_threshold = 0.5;
    bool enable_metrics = true;
    CompressionConfig compression;
    std::map<std::string, std::string> domain_models;
    std::string default_model = "model-general";
    // artificial per-request classifier delay, for reproducing latency-table
    // shapes in benchmarks; zero in normal operation
    std::chrono::milliseconds classifier_latency_padding{0};

    static ServiceConfig from_json(std::string_view json_text);
    // Reads the file named by ROUTEFAST_CONFIG when set, else defaults.
    static ServiceConfig from_env();

    StreamConfig stream_config() const;
};

// Demo HTTP routing service: POST /v1/chat/completions drives the stream
// handler chunk by chunk, GET /metrics exposes the counters, GET /healthz
// liveness. Upstream forwarding goes to an in-process echo sink that counts
// the bytes it would have proxied.
class RouteService {
public:
    explicit RouteService(ServiceConfig config);
    ~RouteService();
    RouteService(const RouteService&) = delete;
    RouteService& operator=(const RouteService&) = delete;

    // Binds and serves on a background thread; returns once listening.
    bool start();
    void stop();

    int port() const;
    MetricsRegistry& metrics();
    uint64_t upstream_bytes() const;  // total bytes the echo sink received
    const ServiceConfig& config() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace routefast
