// Copyright 2026 The RouteFast Authors
// SPDX-License-Identifier: Apache-2.0

#include "routefast/service.hpp"

#include <atomic>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

#include "httplib.h"
#include "json.hpp"

namespace routefast {

using ordered_json = nlohmann::ordered_json;

ServiceConfig ServiceConfig::from_json(std::string_view json_text) {
    ordered_json j = ordered_json::parse(json_text);
    ServiceConfig cfg;
    cfg.host = j.value("host", cfg.host);
    cfg.port = j.value("port", cfg.port);
    cfg.max_body_bytes = j.value("max_body_bytes", cfg.max_body_bytes);
    cfg.jailbreak_threshold = j.value("jailbreak_threshold", cfg.jailbreak_threshold);
    cfg.enable_metrics = j.value("enable_metrics", cfg.enable_metrics);
    cfg.default_model = j.value("default_model", cfg.default_model);
    if (auto it = j.find("domain_models"); it != j.end()) {
        for (const auto& [domain, model] : it->items()) {
            cfg.domain_models[domain] = model.get<std::string>();
        }
    }
    if (auto it = j.find("compression"); it != j.end()) {
        auto& c = *it;
        cfg.compression.max_tokens = c.value("max_tokens", cfg.compression.max_tokens);
        cfg.compression.curve_depth = c.value("depth", cfg.compression.curve_depth);
        cfg.compression.preserve_first = c.value("preserve_first", cfg.compression.preserve_first);
        cfg.compression.preserve_last = c.value("preserve_last", cfg.compression.preserve_last);
        cfg.compression.sentence_cap = c.value("sentence_cap", cfg.compression.sentence_cap);
        if (auto w = c.find("weights"); w != c.end()) {
            if (!w->is_array() || w->size() != 4) {
                throw std::invalid_argument("compression.weights must have 4 entries");
            }
            for (std::size_t i = 0; i < 4; ++i) cfg.compression.weights[i] = (*w)[i].get<double>();
        }
    }
    cfg.classifier_latency_padding =
        std::chrono::milliseconds(j.value("classifier_latency_padding_ms", int64_t{0}));
    cfg.compression.validate();
    return cfg;
}

ServiceConfig ServiceConfig::from_env() {
    const char* path = std::getenv("ROUTEFAST_CONFIG");
    if (!path || !*path) return {};
    std::ifstream in(path);
    if (!in) throw std::runtime_error(std::string("cannot open ROUTEFAST_CONFIG file: ") + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return from_json(buf.str());
}

StreamConfig ServiceConfig::stream_config() const {
    StreamConfig sc = StreamConfig::defaults();
    sc.compression = compression;
    sc.jailbreak_threshold = jailbreak_threshold;
    if (!domain_models.empty()) sc.domain_models = domain_models;
    sc.default_model = default_model;
    return sc;
}

namespace {

const char* mode_name(RouteMode mode) {
    return mode == RouteMode::passthrough ? "passthrough" : "classified";
}

ordered_json signals_json(const SignalResults& s) {
    ordered_json j;
    j["jailbreak"] = {{"flagged", s.jailbreak.flagged},
                      {"score", s.jailbreak.score},
                      {"matched", s.jailbreak.matched}};
    j["pii"] = {{"flagged", s.pii.flagged}, {"kinds", s.pii.kinds}};
    j["domain"] = {{"label", s.domain.label}, {"score", s.domain.score}};
    return j;
}

}  // namespace

struct RouteService::Impl {
    ServiceConfig config;
    httplib::Server server;
    std::thread serve_thread;
    int bound_port = 0;
    MetricsRegistry metrics;
    std::atomic<uint64_t> upstream_bytes{0};
    ClassifierSet classifiers;

    explicit Impl(ServiceConfig cfg)
        : config(std::move(cfg)),
          classifiers(ClassifierSet::stubs(config.jailbreak_threshold)) {
        install_routes();
    }

    void count_signals(const SignalResults& s) {
        metrics.inc("llm_signal_extraction_total", {{"signal", "jailbreak"}});
        metrics.inc("llm_signal_extraction_total", {{"signal", "pii"}});
        metrics.inc("llm_signal_extraction_total", {{"signal", "domain"}});
        if (s.jailbreak.flagged) metrics.inc("llm_signal_match_total", {{"signal", "jailbreak"}});
        if (s.pii.flagged) metrics.inc("llm_signal_match_total", {{"signal", "pii"}});
        if (s.domain.label != "general") {
            metrics.inc("llm_signal_match_total", {{"signal", "domain"}});
        }
    }

    void install_routes() {
        server.set_payload_max_length(config.max_body_bytes);

        server.Get("/healthz", [](const httplib::Request&, httplib::Response& res) {
            res.set_content("ok\n", "text/plain");
        });

        server.Get("/metrics", [this](const httplib::Request&, httplib::Response& res) {
            if (!config.enable_metrics) {
                res.status = 404;
                return;
            }
            res.set_content(metrics.snapshot(), "text/plain; version=0.0.4");
        });

        server.Post("/v1/chat/completions",
                    [this](const httplib::Request& req, httplib::Response& res,
                           const httplib::ContentReader& reader) {
                        handle_route(req, res, reader);
                    });
    }

    void handle_route(const httplib::Request&, httplib::Response& res,
                      const httplib::ContentReader& reader) {
        const auto total_start = std::chrono::steady_clock::now();
        StreamHandler handler(config.stream_config(), classifiers);

        std::optional<RoutingDecision> decision;
        uint64_t forwarded = 0;
        std::size_t received = 0;
        bool over_limit = false;

        reader([&](const char* data, std::size_t len) {
            if (decision) return false;  // handler finalized early (reject)
            received += len;
            if (received > config.max_body_bytes) {
                over_limit = true;
                return false;
            }
            ChunkAction act = handler.on_chunk({data, len}, false);
            switch (act.kind) {
                case ChunkAction::Kind::forward:
                    upstream_bytes.fetch_add(act.forward_bytes.size());
                    forwarded += act.forward_bytes.size();
                    break;
                case ChunkAction::Kind::consume:
                    break;
                case ChunkAction::Kind::finalize:
                    decision = std::move(act.decision);
                    break;
            }
            return true;
        });

        if (over_limit) {
            res.status = 413;
            res.set_content(ordered_json{{"error", "body too large"}}.dump(), "application/json");
            metrics.inc("routefast_requests_total", {{"mode", "oversized"}});
            return;
        }

        if (!decision) {
            ChunkAction act = handler.on_chunk("", true);
            if (act.kind == ChunkAction::Kind::finalize) {
                upstream_bytes.fetch_add(act.final_body.size());
                forwarded += act.final_body.size();
                decision = std::move(act.decision);
            }
        }
        if (!decision) {
            res.status = 500;
            res.set_content(ordered_json{{"error", "stream did not finalize"}}.dump(),
                            "application/json");
            return;
        }

        if (config.classifier_latency_padding.count() > 0 &&
            decision->mode == RouteMode::classified) {
            std::this_thread::sleep_for(config.classifier_latency_padding);
        }

        const double total_ms =
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                      total_start)
                .count();

        if (decision->rejected) {
            res.status = 400;
            res.set_content(ordered_json{{"error", "malformed body"},
                                         {"reason", decision->reject_reason}}
                                .dump(),
                            "application/json");
            metrics.inc("routefast_requests_total", {{"mode", "malformed"}});
            return;
        }

        if (decision->signals) {
            count_signals(*decision->signals);
            metrics.observe_ms("compress",
                               static_cast<double>(decision->compress_duration.count()) / 1000.0);
            metrics.observe_ms("classify",
                               static_cast<double>(decision->classify_duration.count()) / 1000.0);
        }
        metrics.observe_ms("total", total_ms);

        if (decision->signals && decision->signals->jailbreak.flagged) {
            metrics.inc("routefast_requests_total", {{"mode", "rejected"}});
            ordered_json body;
            body["error"] = "request rejected";
            body["signal"] = "jailbreak";
            body["score"] = decision->signals->jailbreak.score;
            body["matched"] = decision->signals->jailbreak.matched;
            res.status = 403;
            res.set_header("x-routing-mode", "rejected");
            res.set_content(body.dump(), "application/json");
            return;
        }

        metrics.inc("routefast_requests_total", {{"mode", mode_name(decision->mode)}});

        ordered_json body;
        body["selected_model"] = decision->selected_model;
        body["mode"] = mode_name(decision->mode);
        if (decision->signals) body["signals"] = signals_json(*decision->signals);
        body["eval_tokens"] = decision->eval_tokens;
        body["durations_ms"] = {
            {"compress", static_cast<double>(decision->compress_duration.count()) / 1000.0},
            {"classify", static_cast<double>(decision->classify_duration.count()) / 1000.0},
            {"total", total_ms}};
        if (decision->mode == RouteMode::passthrough) body["forwarded_bytes"] = forwarded;

        res.status = 200;
        res.set_header("x-selected-model", decision->selected_model);
        res.set_header("x-routing-mode", mode_name(decision->mode));
        res.set_content(body.dump(), "application/json");
    }
};

RouteService::RouteService(ServiceConfig config) : impl_(std::make_unique<Impl>(std::move(config))) {}

RouteService::~RouteService() { stop(); }

bool RouteService::start() {
    auto& impl = *impl_;
    if (impl.config.port == 0) {
        impl.bound_port = impl.server.bind_to_any_port(impl.config.host);
        if (impl.bound_port <= 0) return false;
    } else {
        if (!impl.server.bind_to_port(impl.config.host, impl.config.port)) return false;
        impl.bound_port = impl.config.port;
    }
    impl.serve_thread = std::thread([this] { impl_->server.listen_after_bind(); });
    impl.server.wait_until_ready();
    return true;
}

void RouteService::stop() {
    if (!impl_) return;
    impl_->server.stop();
    if (impl_->serve_thread.joinable()) impl_->serve_thread.join();
}

int RouteService::port() const { return impl_->bound_port; }

MetricsRegistry& RouteService::metrics() { return impl_->metrics; }

uint64_t RouteService::upstream_bytes() const { return impl_->upstream_bytes.load(); }

const ServiceConfig& RouteService::config() const { return impl_->config; }

}  // namespace routefast
