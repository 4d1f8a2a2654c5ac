// Copyright 2026 The RouteFast Authors
// SPDX-License-Identifier: Apache-2.0

#include "routefast/stream.hpp"

#include <gtest/gtest.h>

#include <random>

#include "routefast/corpus.hpp"
#include "support/body_gen.hpp"
#include "support/oracles.hpp"

namespace routefast {
namespace {

// ---------------------------------------------------------------------------
// NlpAccumulator

TEST(NlpAccumulator, SpecExample) {
    NlpAccumulator acc;
    acc.ingest("A. B");
    ASSERT_EQ(acc.sentences().size(), 1u);
    EXPECT_EQ(acc.sentences()[0].text, "A.");
    acc.ingest(". C.");
    acc.flush();
    ASSERT_EQ(acc.sentences().size(), 3u);
    EXPECT_EQ(acc.sentences()[0].text, "A.");
    EXPECT_EQ(acc.sentences()[1].text, "B.");
    EXPECT_EQ(acc.sentences()[2].text, "C.");
}

void check_matches_scratch(const std::string& text, const std::vector<std::size_t>& cuts) {
    NlpAccumulator acc;
    std::size_t prev = 0;
    for (std::size_t cut : cuts) {
        acc.ingest(std::string_view(text).substr(prev, cut - prev));
        prev = cut;
    }
    acc.ingest(std::string_view(text).substr(prev));
    acc.flush();

    auto expected = split_sentences(text);
    ASSERT_EQ(acc.sentences().size(), expected.size()) << text;
    for (std::size_t i = 0; i < expected.size(); ++i) {
        EXPECT_EQ(acc.sentences()[i].text, expected[i].text);
        EXPECT_EQ(acc.sentences()[i].index, expected[i].index);
        EXPECT_EQ(acc.sentences()[i].char_span.begin, expected[i].char_span.begin);
        EXPECT_EQ(acc.sentences()[i].char_span.end, expected[i].char_span.end);
    }

    // term tallies equal a from-scratch recomputation
    TermDictionary dict;
    std::map<std::string, std::size_t> expected_df;
    for (const auto& s : expected) {
        auto v = build_term_vector(s.text, dict);
        for (const auto& [id, count] : v.entries) expected_df[dict.term(id)] += 1;
    }
    std::map<std::string, std::size_t> got_df;
    for (const auto& [id, count] : acc.doc_frequency()) {
        got_df[acc.dictionary().term(id)] += count;
    }
    EXPECT_EQ(got_df, expected_df);
}

TEST(NlpAccumulator, RandomSplitPointsMatchScratch) {
    std::mt19937_64 rng(3);
    CorpusOptions opts;
    opts.target_tokens = 600;
    for (int trial = 0; trial < 30; ++trial) {
        auto doc = generate_doc(opts, static_cast<uint64_t>(trial));
        std::vector<std::size_t> cuts;
        std::size_t pos = 0;
        while (pos < doc.text.size()) {
            pos += 1 + rng() % 200;
            if (pos < doc.text.size()) cuts.push_back(pos);
        }
        check_matches_scratch(doc.text, cuts);
    }
}

TEST(NlpAccumulator, MultibyteSplitAcrossChunks) {
    const std::string text = "第一句话结束。第二句话也结束。最后一个片段";
    for (std::size_t cut = 1; cut < text.size(); ++cut) {
        NlpAccumulator acc;
        acc.ingest(std::string_view(text).substr(0, cut));
        acc.ingest(std::string_view(text).substr(cut));
        acc.flush();
        auto expected = split_sentences(text);
        ASSERT_EQ(acc.sentences().size(), expected.size()) << "cut=" << cut;
        for (std::size_t i = 0; i < expected.size(); ++i) {
            ASSERT_EQ(acc.sentences()[i].text, expected[i].text) << "cut=" << cut;
        }
    }
}

// ---------------------------------------------------------------------------
// ChatContentScanner

void feed_chunked(ChatContentScanner& scanner, std::string_view body, std::size_t chunk) {
    for (std::size_t i = 0; i < body.size(); i += chunk) {
        scanner.feed(body.substr(i, chunk));
    }
}

TEST(ChatContentScanner, ExtractsJoinedContents) {
    const std::string body =
        R"({"model":"auto","messages":[{"role":"a","content":"one"},{"content":"two 你好"}]})";
    for (std::size_t chunk : {1u, 3u, 7u, 1024u}) {
        ChatContentScanner scanner;
        feed_chunked(scanner, body, chunk);
        EXPECT_FALSE(scanner.confused());
        EXPECT_EQ(scanner.content(), "one\ntwo 你好") << "chunk=" << chunk;
    }
}

TEST(ChatContentScanner, HandlesEscapesAcrossChunkBoundaries) {
    const std::string body =
        R"({"messages":[{"content":"a\nbéc😀d\"e"}]})";
    const std::string expected = "a\nb\xC3\xA9"
                                 "c\xF0\x9F\x98\x80"
                                 "d\"e";
    for (std::size_t chunk = 1; chunk <= body.size(); ++chunk) {
        ChatContentScanner scanner;
        feed_chunked(scanner, body, chunk);
        ASSERT_FALSE(scanner.confused()) << "chunk=" << chunk;
        ASSERT_EQ(scanner.content(), expected) << "chunk=" << chunk;
    }
}

TEST(ChatContentScanner, SkipsNonStringContentAndNestedKeys) {
    const std::string body =
        R"({"messages":[{"content":[{"text":"part"}]},{"content":"real","meta":{"content":"fake"}}]})";
    ChatContentScanner scanner;
    scanner.feed(body);
    EXPECT_FALSE(scanner.confused());
    EXPECT_EQ(scanner.content(), "real");
}

TEST(ChatContentScanner, AgreesWithOracleOnGeneratedBodies) {
    std::mt19937_64 rng(47);
    for (int trial = 0; trial < 60; ++trial) {
        auto body = testing::random_chat_body(rng);
        auto contents = testing::full_parse_contents(body.json);
        std::string joined;
        for (std::size_t i = 0; i < contents.size(); ++i) {
            if (i) joined += "\n";
            joined += contents[i];
        }
        std::size_t chunk = 1 + rng() % 300;
        ChatContentScanner scanner;
        feed_chunked(scanner, body.json, chunk);
        ASSERT_FALSE(scanner.confused()) << body.json;
        EXPECT_EQ(scanner.content(), joined);
    }
}

// ---------------------------------------------------------------------------
// StreamHandler

StreamConfig test_config() { return StreamConfig::defaults(); }

TEST(StreamHandler, SingleChunkSpecifiedModelPassthrough) {
    std::string body = make_chat_body("m1", "sys", "short user question");
    StreamHandler handler(test_config());
    ChunkAction act = handler.on_chunk(body, true);
    ASSERT_EQ(act.kind, ChunkAction::Kind::finalize);
    ASSERT_TRUE(act.decision);
    EXPECT_EQ(act.decision->mode, RouteMode::passthrough);
    EXPECT_EQ(act.decision->selected_model, "m1");
    EXPECT_FALSE(act.decision->signals.has_value());
    EXPECT_EQ(act.final_body, body);  // everything still to forward
    EXPECT_EQ(handler.stats().bytes_forwarded, body.size());
    EXPECT_EQ(handler.stats().bytes_accumulated, 0u);
}

TEST(StreamHandler, PassthroughForwardsChunksVerbatim) {
    std::string body = make_chat_body("m1", "sys", std::string(4000, 'x'));
    StreamHandler handler(test_config());
    std::string forwarded;
    const std::size_t chunk = 512;
    for (std::size_t i = 0; i < body.size(); i += chunk) {
        bool eos = i + chunk >= body.size();
        auto act = handler.on_chunk(std::string_view(body).substr(i, chunk), eos);
        if (act.kind == ChunkAction::Kind::forward) forwarded += act.forward_bytes;
        if (act.kind == ChunkAction::Kind::finalize) forwarded += act.final_body;
    }
    EXPECT_EQ(forwarded, body);
    EXPECT_EQ(handler.stats().bytes_accumulated, 0u);  // zero-copy path
}

TEST(StreamHandler, AutoModelClassifiedUnderBudget) {
    CorpusOptions opts;
    opts.target_tokens = 3000;
    auto doc = generate_doc(opts, 0);
    std::string body = make_chat_body("auto", "route this request", doc.text);

    StreamHandler handler(test_config());
    std::optional<RoutingDecision> decision;
    const std::size_t chunk = 1024;
    for (std::size_t i = 0; i < body.size(); i += chunk) {
        bool eos = i + chunk >= body.size();
        auto act = handler.on_chunk(std::string_view(body).substr(i, chunk), eos);
        if (!eos) EXPECT_EQ(act.kind, ChunkAction::Kind::consume);
        if (act.kind == ChunkAction::Kind::finalize) decision = act.decision;
    }
    ASSERT_TRUE(decision);
    EXPECT_EQ(decision->mode, RouteMode::classified);
    ASSERT_TRUE(decision->signals);
    EXPECT_LE(decision->eval_tokens, 512u);
    EXPECT_EQ(decision->signals->domain.label, doc.domain);
    EXPECT_EQ(decision->selected_model, "model-" + doc.domain);
    EXPECT_TRUE(decision->signals->jailbreak.flagged);
    EXPECT_TRUE(decision->signals->pii.flagged);
}

TEST(StreamHandler, ClassifiedRewritesModelInFinalBody) {
    CorpusOptions opts;
    opts.target_tokens = 1500;
    opts.jailbreak = SignalPosition::none;
    auto doc = generate_doc(opts, 1);
    std::string body = make_chat_body("auto", "route", doc.text);
    StreamHandler handler(test_config());
    auto act = handler.on_chunk(body, true);
    ASSERT_EQ(act.kind, ChunkAction::Kind::finalize);
    auto rewritten_model = extract_field(act.final_body, "model");
    ASSERT_TRUE(rewritten_model);
    EXPECT_EQ(rewritten_model->str, act.decision->selected_model);
    // everything else byte-preserved around the model span
    EXPECT_EQ(act.final_body.size() - act.decision->selected_model.size(),
              body.size() - std::string("auto").size());
}

TEST(StreamHandler, UpstreamNeverSeesCompressedText) {
    CorpusOptions opts;
    opts.target_tokens = 4000;
    opts.jailbreak = SignalPosition::none;
    auto doc = generate_doc(opts, 2);
    std::string body = make_chat_body("auto", "route", doc.text);
    StreamHandler handler(test_config());
    auto act = handler.on_chunk(body, true);
    ASSERT_EQ(act.kind, ChunkAction::Kind::finalize);
    auto contents = extract_chat_contents(act.final_body);
    ASSERT_TRUE(contents);
    EXPECT_NE(contents->find(doc.text), std::string::npos);  // original, not eval_text
    EXPECT_LT(act.decision->eval_text.size(), doc.text.size());
}

TEST(StreamHandler, NotJsonRejectsImmediately) {
    StreamHandler handler(test_config());
    auto act = handler.on_chunk("GET / HTTP/1.1\r\n", false);
    ASSERT_EQ(act.kind, ChunkAction::Kind::finalize);
    EXPECT_TRUE(act.decision->rejected);
    EXPECT_THROW(handler.on_chunk("more", false), ProtocolError);
}

TEST(StreamHandler, TruncatedBodyRejectsAtEos) {
    StreamHandler handler(test_config());
    handler.on_chunk(R"({"model":"au)", false);
    auto act = handler.on_chunk("", true);
    ASSERT_EQ(act.kind, ChunkAction::Kind::finalize);
    EXPECT_TRUE(act.decision->rejected);
}

TEST(StreamHandler, PrefixCapForcesClassification) {
    StreamConfig config = test_config();
    config.prefix_cap = 256;
    // a body whose model field arrives after 1 KiB of filler key
    std::string body = R"({"filler":")" + std::string(1024, 'f') +
                       R"(","model":"late-model","messages":[{"content":"question here"}]})";
    StreamHandler handler(config, ClassifierSet::stubs());
    std::optional<RoutingDecision> decision;
    for (std::size_t i = 0; i < body.size(); i += 64) {
        bool eos = i + 64 >= body.size();
        auto act = handler.on_chunk(std::string_view(body).substr(i, 64), eos);
        if (act.kind == ChunkAction::Kind::finalize) decision = act.decision;
    }
    ASSERT_TRUE(decision);
    EXPECT_EQ(decision->mode, RouteMode::classified);  // cap treated it as auto
}

RoutingDecision run_chunked(const std::string& body, std::size_t chunk_size) {
    StreamHandler handler(test_config());
    std::optional<RoutingDecision> decision;
    if (body.empty()) {
        auto act = handler.on_chunk("", true);
        decision = act.decision;
    }
    for (std::size_t i = 0; i < body.size(); i += chunk_size) {
        bool eos = i + chunk_size >= body.size();
        auto act = handler.on_chunk(std::string_view(body).substr(i, chunk_size), eos);
        if (act.kind == ChunkAction::Kind::finalize) {
            decision = act.decision;
            break;
        }
    }
    if (!decision) throw std::logic_error("no decision");
    return *decision;
}

void expect_same_decision(const RoutingDecision& a, const RoutingDecision& b,
                          const std::string& context) {
    EXPECT_EQ(a.mode, b.mode) << context;
    EXPECT_EQ(a.selected_model, b.selected_model) << context;
    EXPECT_EQ(a.rejected, b.rejected) << context;
    EXPECT_EQ(a.eval_text, b.eval_text) << context;
    EXPECT_EQ(a.eval_tokens, b.eval_tokens) << context;
    ASSERT_EQ(a.signals.has_value(), b.signals.has_value()) << context;
    if (a.signals) {
        EXPECT_EQ(a.signals->jailbreak.flagged, b.signals->jailbreak.flagged) << context;
        EXPECT_EQ(a.signals->jailbreak.score, b.signals->jailbreak.score) << context;
        EXPECT_EQ(a.signals->pii.kinds, b.signals->pii.kinds) << context;
        EXPECT_EQ(a.signals->domain.label, b.signals->domain.label) << context;
        EXPECT_EQ(a.signals->domain.score, b.signals->domain.score) << context;
    }
}

TEST(StreamHandler, StreamedEqualsBufferedOnGeneratedBodies) {
    std::mt19937_64 rng(53);
    for (int trial = 0; trial < 40; ++trial) {
        auto body = testing::random_chat_body(rng);
        RoutingDecision buffered = run_chunked(body.json, body.json.size() + 1);
        for (std::size_t chunk : {1u, 7u, 1024u}) {
            RoutingDecision streamed = run_chunked(body.json, chunk);
            expect_same_decision(buffered, streamed,
                                 "chunk=" + std::to_string(chunk) + " trial=" +
                                     std::to_string(trial));
        }
    }
}

}  // namespace
}  // namespace routefast
