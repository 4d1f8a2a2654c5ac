// Copyright 2026 The RouteFast Authors
// SPDX-License-Identifier: Apache-2.0

#include "routefast/service.hpp"

#include <gtest/gtest.h>

#include <thread>

#include "httplib.h"
#include "json.hpp"
#include "routefast/corpus.hpp"

namespace routefast {
namespace {

using nlohmann::json;

class ServiceTest : public ::testing::Test {
protected:
    void SetUp() override {
        ServiceConfig config;
        config.port = 0;
        service_ = std::make_unique<RouteService>(config);
        ASSERT_TRUE(service_->start());
        client_ = std::make_unique<httplib::Client>("127.0.0.1", service_->port());
        client_->set_read_timeout(30, 0);
    }

    httplib::Result post_body(const std::string& body) {
        return client_->Post("/v1/chat/completions", body, "application/json");
    }

    httplib::Result post_chunked(const std::string& body, std::size_t chunk) {
        return client_->Post(
            "/v1/chat/completions",
            [body, chunk](std::size_t offset, httplib::DataSink& sink) {
                if (offset >= body.size()) {
                    sink.done();
                    return true;
                }
                std::size_t len = std::min(chunk, body.size() - offset);
                sink.write(body.data() + offset, len);
                if (offset + len >= body.size()) sink.done();
                return true;
            },
            "application/json");
    }

    std::unique_ptr<RouteService> service_;
    std::unique_ptr<httplib::Client> client_;
};

TEST_F(ServiceTest, Healthz) {
    auto res = client_->Get("/healthz");
    ASSERT_TRUE(res);
    EXPECT_EQ(res->status, 200);
}

TEST_F(ServiceTest, FreshMetricsAreEmpty) {
    auto res = client_->Get("/metrics");
    ASSERT_TRUE(res);
    EXPECT_EQ(res->status, 200);
    EXPECT_EQ(res->body.find("llm_signal_extraction_total"), std::string::npos);
}

TEST_F(ServiceTest, PassthroughSpecifiedModel) {
    std::string body = make_chat_body("m1", "system", "a short user question");
    auto res = post_body(body);
    ASSERT_TRUE(res);
    EXPECT_EQ(res->status, 200);
    EXPECT_EQ(res->get_header_value("x-routing-mode"), "passthrough");
    EXPECT_EQ(res->get_header_value("x-selected-model"), "m1");
    auto j = json::parse(res->body);
    EXPECT_EQ(j["mode"], "passthrough");
    EXPECT_EQ(j["selected_model"], "m1");
    EXPECT_EQ(j["forwarded_bytes"].get<uint64_t>(), body.size());
    EXPECT_FALSE(j.contains("signals"));
}

TEST_F(ServiceTest, ChunkedAndUnchunkedAgree) {
    CorpusOptions opts;
    opts.target_tokens = 2500;
    opts.jailbreak = SignalPosition::none;
    auto doc = generate_doc(opts, 3);
    std::string body = make_chat_body("auto", "routing system", doc.text);

    auto plain = post_body(body);
    auto chunked = post_chunked(body, 1024);
    ASSERT_TRUE(plain);
    ASSERT_TRUE(chunked);
    EXPECT_EQ(plain->status, 200);
    EXPECT_EQ(chunked->status, plain->status);

    auto a = json::parse(plain->body);
    auto b = json::parse(chunked->body);
    a.erase("durations_ms");
    b.erase("durations_ms");
    EXPECT_EQ(a, b);
    EXPECT_EQ(a["mode"], "classified");
    EXPECT_EQ(a["selected_model"], "model-" + doc.domain);
}

TEST_F(ServiceTest, JailbreakRejectedWith403) {
    CorpusOptions opts;
    opts.target_tokens = 1500;
    opts.jailbreak = SignalPosition::start;
    auto doc = generate_doc(opts, 4);
    std::string body = make_chat_body("auto", "route it", doc.text);
    auto res = post_body(body);
    ASSERT_TRUE(res);
    EXPECT_EQ(res->status, 403);
    auto j = json::parse(res->body);
    EXPECT_EQ(j["signal"], "jailbreak");
    EXPECT_GE(j["score"].get<double>(), 0.5);
}

TEST_F(ServiceTest, MalformedBodyIs400) {
    auto res = post_body("this is not json at all");
    ASSERT_TRUE(res);
    EXPECT_EQ(res->status, 400);
}

TEST_F(ServiceTest, MetricsCountersTrackRequests) {
    CorpusOptions opts;
    opts.target_tokens = 1500;
    opts.jailbreak = SignalPosition::none;
    for (uint64_t i = 0; i < 5; ++i) {
        auto doc = generate_doc(opts, i);
        auto res = post_body(make_chat_body("auto", "route", doc.text));
        ASSERT_TRUE(res);
        ASSERT_EQ(res->status, 200);
    }
    post_body(make_chat_body("m9", "sys", "plain"));

    auto& metrics = service_->metrics();
    EXPECT_EQ(metrics.counter("llm_signal_extraction_total", {{"signal", "pii"}}), 5u);
    EXPECT_EQ(metrics.counter("llm_signal_extraction_total", {{"signal", "jailbreak"}}), 5u);
    EXPECT_EQ(metrics.counter("llm_signal_match_total", {{"signal", "pii"}}), 5u);
    EXPECT_EQ(metrics.counter("llm_signal_match_total", {{"signal", "jailbreak"}}), 0u);
    EXPECT_EQ(metrics.counter("routefast_requests_total", {{"mode", "classified"}}), 5u);
    EXPECT_EQ(metrics.counter("routefast_requests_total", {{"mode", "passthrough"}}), 1u);

    auto res = client_->Get("/metrics");
    ASSERT_TRUE(res);
    EXPECT_NE(res->body.find("llm_signal_extraction_total{signal=\"pii\"} 5"),
              std::string::npos);
    EXPECT_NE(res->body.find("routefast_stage_duration_ms_count{stage=\"compress\"} 5"),
              std::string::npos);
}

TEST(ServiceLimits, OversizedBodyIs413) {
    ServiceConfig config;
    config.port = 0;
    config.max_body_bytes = 2048;
    RouteService service(config);
    ASSERT_TRUE(service.start());
    httplib::Client client("127.0.0.1", service.port());
    std::string body = make_chat_body("m1", "sys", std::string(8192, 'y'));
    auto res = client.Post("/v1/chat/completions", body, "application/json");
    ASSERT_TRUE(res);
    EXPECT_EQ(res->status, 413);
}

TEST(ServiceConfigJson, ParsesOverrides) {
    auto cfg = ServiceConfig::from_json(R"({
        "port": 9911,
        "jailbreak_threshold": 0.8,
        "default_model": "fallback",
        "domain_models": {"finance": "fin-model"},
        "compression": {"max_tokens": 256, "weights": [0.25, 0.25, 0.25, 0.25]}
    })");
    EXPECT_EQ(cfg.port, 9911);
    EXPECT_DOUBLE_EQ(cfg.jailbreak_threshold, 0.8);
    EXPECT_EQ(cfg.default_model, "fallback");
    EXPECT_EQ(cfg.domain_models.at("finance"), "fin-model");
    EXPECT_EQ(cfg.compression.max_tokens, 256u);
    EXPECT_THROW(ServiceConfig::from_json(R"({"compression":{"weights":[1.0]}})"),
                 std::invalid_argument);
}

TEST(ServiceConcurrency, NoCrossRequestStateBleed) {
    ServiceConfig config;
    config.port = 0;
    RouteService service(config);
    ASSERT_TRUE(service.start());

    // mixed workload: passthrough, classified per domain, jailbreak reject
    std::vector<std::string> bodies;
    CorpusOptions opts;
    opts.target_tokens = 1200;
    for (uint64_t i = 0; i < 10; ++i) {
        opts.jailbreak = i % 3 == 0 ? SignalPosition::start : SignalPosition::none;
        auto doc = generate_doc(opts, i);
        bodies.push_back(make_chat_body(i % 4 == 0 ? "model-fixed" : "auto", "route", doc.text));
    }

    auto run_one = [&](const std::string& body) {
        httplib::Client client("127.0.0.1", service.port());
        client.set_read_timeout(30, 0);
        auto res = client.Post("/v1/chat/completions", body, "application/json");
        if (!res) return std::string("<transport error>");
        auto j = json::parse(res->body);
        j.erase("durations_ms");
        return std::to_string(res->status) + " " + j.dump();
    };

    // sequential baseline
    std::vector<std::string> expected;
    for (const auto& body : bodies) expected.push_back(run_one(body));

    for (int round = 0; round < 2; ++round) {
        std::vector<std::string> got(bodies.size());
        std::vector<std::thread> threads;
        for (std::size_t i = 0; i < bodies.size(); ++i) {
            threads.emplace_back([&, i] { got[i] = run_one(bodies[i]); });
        }
        for (auto& t : threads) t.join();
        EXPECT_EQ(got, expected) << "round " << round;
    }
}

}  // namespace
}  // namespace routefast
