// Copyright 2026 The RouteFast Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "routefast/classifiers.hpp"
#include "routefast/compress.hpp"
#include "routefast/json_scan.hpp"
#include "routefast/segment.hpp"
#include "routefast/term_vector.hpp"

namespace routefast {

// A chunk arrived after the stream was finalized.
class ProtocolError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

// Incremental sentence splitting and term tallying over a byte stream.
// Sentences are finalized per the stable-prefix rule: everything before the
// last (possibly still growing) sentence boundary. flush() finalizes the
// trailing sentence; afterwards the accumulator equals a from-scratch
// split_sentences / build_term_vector run over ingested().
class NlpAccumulator {
public:
    void ingest(std::string_view bytes);
    void flush();

    const std::vector<Sentence>& sentences() const { return sentences_; }
    const std::vector<TermVector>& vectors() const { return vectors_; }
    const std::map<uint32_t, std::size_t>& doc_frequency() const { return doc_frequency_; }
    const std::string& ingested() const { return text_; }

    // Hands the prepared document to the compressor; leaves the accumulator empty.
    PreparedDocument take_prepared();

private:
    void finalize_until(std::size_t keep_last);

    std::string text_;
    std::size_t stable_end_ = 0;  // byte offset; sentences before it are final
    TermDictionary dict_;
    std::vector<Sentence> sentences_;
    std::vector<TermVector> vectors_;
    std::map<uint32_t, std::size_t> doc_frequency_;
};

// Streaming extractor for messages[*].content string values, fed arbitrary
// byte slices of an OpenAI-shaped chat body. Emits unescaped content bytes
// (messages joined with '\n') as soon as they are structurally complete.
// Tolerates escapes, \uXXXX pairs and UTF-8 sequences split across chunks.
class ChatContentScanner {
public:
    void feed(std::string_view bytes);
    // Unescaped eval text completed so far; monotonically growing.
    const std::string& content() const { return content_; }
    bool confused() const { return confused_; }

private:
    void feed_byte(char c);

    enum class State {
        start,
        expect_key,
        in_key,
        expect_colon,
        expect_value,
        in_string,
        in_scalar,
        after_value,
        done,
    };

    struct Frame {
        bool object = false;
        bool messages_array = false;   // the top-level "messages" array
        bool message_element = false;  // a direct element object of it
    };

    State state_ = State::start;
    std::vector<Frame> stack_;
    std::string current_key_;
    bool capturing_ = false;       // inside a content string value
    bool saw_messages_ = false;    // only the first messages array counts
    std::size_t contents_emitted_ = 0;

    // string decode state (persists across chunk boundaries)
    bool esc_ = false;
    int unicode_left_ = -1;  // hex digits still expected, -1 when inactive
    uint32_t unicode_acc_ = 0;
    uint32_t pending_high_ = 0;  // stored high surrogate awaiting its pair
    bool expect_low_escape_ = false;

    std::string content_;
    bool confused_ = false;
};

enum class StreamPhase { init, passthrough, accumulate, done };

enum class RouteMode { passthrough, classified };

struct SignalResults {
    JailbreakSignal jailbreak;
    PiiSignal pii;
    DomainSignal domain;
};

struct RoutingDecision {
    RouteMode mode = RouteMode::passthrough;
    std::string selected_model;
    std::optional<SignalResults> signals;  // absent in passthrough mode
    std::string eval_text;                 // what the classifiers saw
    std::size_t eval_tokens = 0;
    bool rejected = false;
    std::string reject_reason;
    std::chrono::microseconds compress_duration{0};
    std::chrono::microseconds classify_duration{0};
};

// What the caller must do with the chunk that was just delivered.
struct ChunkAction {
    enum class Kind { forward, consume, finalize };
    Kind kind = Kind::consume;
    std::string forward_bytes;                 // forward: bytes to emit upstream
    std::optional<RoutingDecision> decision;   // finalize only
    std::string final_body;                    // finalize: remaining bytes to emit
};

struct StreamConfig {
    CompressionConfig compression;
    std::size_t prefix_cap = 64 * 1024;  // Init bytes before forcing accumulate
    double jailbreak_threshold = 0.5;
    std::map<std::string, std::string> domain_models;  // domain label -> model
    std::string default_model = "model-general";

    std::string model_for(const std::string& domain) const {
        auto it = domain_models.find(domain);
        return it == domain_models.end() ? default_model : it->second;
    }

    static StreamConfig defaults();
};

struct StreamStats {
    std::size_t chunks = 0;
    std::size_t bytes_seen = 0;
    std::size_t bytes_forwarded = 0;
    std::size_t bytes_accumulated = 0;  // stays 0 on the passthrough path
};

// The near-streaming three-state body processor. One instance per request;
// feed chunks in order, with end_of_stream set on exactly the last call.
class StreamHandler {
public:
    explicit StreamHandler(StreamConfig config = StreamConfig::defaults(),
                           ClassifierSet classifiers = ClassifierSet::stubs());

    ChunkAction on_chunk(std::string_view chunk, bool end_of_stream);

    StreamPhase phase() const { return phase_; }
    const StreamStats& stats() const { return stats_; }

private:
    ChunkAction finalize_passthrough(std::string_view tail_bytes);
    ChunkAction finalize_classified();
    ChunkAction finalize_reject(std::string reason);
    void enter_accumulate(std::string_view buffered);

    StreamConfig config_;
    ClassifierSet classifiers_;
    StreamPhase phase_ = StreamPhase::init;
    StreamStats stats_;

    std::string prefix_;       // init only
    std::string body_;         // accumulate only
    std::string client_model_; // passthrough: the detected model
    ChatContentScanner content_scanner_;
    NlpAccumulator nlp_;
    std::size_t nlp_fed_ = 0;  // bytes of scanner content already ingested
};

}  // namespace routefast
