// Copyright 2026 The RouteFast Authors
// SPDX-License-Identifier: Apache-2.0

#include "routefast/stream.hpp"

#include <algorithm>

namespace routefast {

// ---------------------------------------------------------------------------
// NlpAccumulator

void NlpAccumulator::ingest(std::string_view bytes) {
    text_.append(bytes);
    finalize_until(1);  // keep the trailing sentence open
}

void NlpAccumulator::flush() { finalize_until(0); }

void NlpAccumulator::finalize_until(std::size_t keep_last) {
    std::string_view tail = std::string_view(text_).substr(stable_end_);
    if (tail.empty()) return;
    auto parts = split_sentences(tail);
    if (parts.size() <= keep_last) return;

    const std::size_t take = parts.size() - keep_last;
    for (std::size_t i = 0; i < take; ++i) {
        Sentence s = std::move(parts[i]);
        s.index = sentences_.size();
        s.char_span.begin += stable_end_;
        s.char_span.end += stable_end_;
        TermVector v = build_term_vector(s.text, dict_);
        for (const auto& [id, count] : v.entries) doc_frequency_[id] += 1;
        sentences_.push_back(std::move(s));
        vectors_.push_back(std::move(v));
    }
    stable_end_ = keep_last == 0 ? text_.size() : parts[take].char_span.begin + stable_end_;
}

PreparedDocument NlpAccumulator::take_prepared() {
    PreparedDocument doc;
    doc.sentences = std::move(sentences_);
    doc.vectors = std::move(vectors_);
    sentences_.clear();
    vectors_.clear();
    return doc;
}

// ---------------------------------------------------------------------------
// ChatContentScanner

void ChatContentScanner::feed(std::string_view bytes) {
    if (confused_) return;
    for (char c : bytes) {
        feed_byte(c);
        if (confused_) return;
    }
}

namespace {

bool ws_byte(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; }

int hex_digit(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

void append_cp_utf8(std::string& out, uint32_t cp) {
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

}  // namespace

void ChatContentScanner::feed_byte(char c) {
    // String bytes first: they ignore structure until the closing quote.
    if (state_ == State::in_string || state_ == State::in_key) {
        std::string* sink = nullptr;
        if (state_ == State::in_key) sink = &current_key_;
        else if (capturing_) sink = &content_;

        if (unicode_left_ >= 0) {
            int h = hex_digit(c);
            if (h < 0) {
                confused_ = true;
                return;
            }
            unicode_acc_ = (unicode_acc_ << 4) | static_cast<uint32_t>(h);
            if (--unicode_left_ == 0) {
                unicode_left_ = -1;
                uint32_t cp = unicode_acc_;
                unicode_acc_ = 0;
                if (expect_low_escape_) {
                    if (cp >= 0xDC00 && cp <= 0xDFFF) {
                        uint32_t combined =
                            0x10000 + ((pending_high_ - 0xD800) << 10) + (cp - 0xDC00);
                        if (sink) append_cp_utf8(*sink, combined);
                    } else {
                        confused_ = true;
                        return;
                    }
                    expect_low_escape_ = false;
                    pending_high_ = 0;
                } else if (cp >= 0xD800 && cp <= 0xDBFF) {
                    pending_high_ = cp;
                    expect_low_escape_ = true;
                } else if (cp >= 0xDC00 && cp <= 0xDFFF) {
                    confused_ = true;
                    return;
                } else if (sink) {
                    append_cp_utf8(*sink, cp);
                }
            }
            return;
        }

        if (esc_) {
            esc_ = false;
            if (expect_low_escape_ && c != 'u') {
                confused_ = true;
                return;
            }
            switch (c) {
                case '"': if (sink) sink->push_back('"'); break;
                case '\\': if (sink) sink->push_back('\\'); break;
                case '/': if (sink) sink->push_back('/'); break;
                case 'b': if (sink) sink->push_back('\b'); break;
                case 'f': if (sink) sink->push_back('\f'); break;
                case 'n': if (sink) sink->push_back('\n'); break;
                case 'r': if (sink) sink->push_back('\r'); break;
                case 't': if (sink) sink->push_back('\t'); break;
                case 'u':
                    unicode_left_ = 4;
                    unicode_acc_ = 0;
                    break;
                default:
                    confused_ = true;
            }
            return;
        }
        if (expect_low_escape_ && c != '\\') {
            confused_ = true;  // lone high surrogate
            return;
        }
        if (c == '\\') {
            esc_ = true;
            return;
        }
        if (c == '"') {
            if (state_ == State::in_key) {
                state_ = State::expect_colon;
            } else {
                if (capturing_) {
                    capturing_ = false;
                    ++contents_emitted_;
                }
                state_ = State::after_value;
            }
            return;
        }
        if (static_cast<unsigned char>(c) < 0x20) {
            confused_ = true;
            return;
        }
        if (sink) sink->push_back(c);  // raw UTF-8 bytes pass straight through
        return;
    }

    if (ws_byte(c)) return;

    switch (state_) {
        case State::start:
            if (c == '{') {
                stack_.push_back(Frame{true, false, false});
                state_ = State::expect_key;
            } else {
                confused_ = true;
            }
            return;

        case State::expect_key:
            if (c == '"') {
                current_key_.clear();
                state_ = State::in_key;
            } else if (c == '}' && !stack_.empty() && stack_.back().object) {
                stack_.pop_back();
                state_ = stack_.empty() ? State::done : State::after_value;
            } else {
                confused_ = true;
            }
            return;

        case State::expect_colon:
            if (c == ':') {
                state_ = State::expect_value;
            } else {
                confused_ = true;
            }
            return;

        case State::expect_value: {
            bool in_message_element = !stack_.empty() && stack_.back().message_element;
            bool in_top_object = stack_.size() == 1 && stack_[0].object;
            if (c == '"') {
                capturing_ = in_message_element && current_key_ == "content";
                if (capturing_ && contents_emitted_ > 0) content_.push_back('\n');
                state_ = State::in_string;
            } else if (c == '{') {
                Frame f{true, false, false};
                if (!stack_.empty() && stack_.back().messages_array) f.message_element = true;
                stack_.push_back(f);
                state_ = State::expect_key;
            } else if (c == '[') {
                Frame f{false, false, false};
                if (in_top_object && current_key_ == "messages" && !saw_messages_) {
                    f.messages_array = true;
                    saw_messages_ = true;
                }
                stack_.push_back(f);
                state_ = State::expect_value;
                current_key_.clear();
            } else if (c == ']' && !stack_.empty() && !stack_.back().object) {
                stack_.pop_back();  // empty array
                state_ = stack_.empty() ? State::done : State::after_value;
            } else if (c == 't' || c == 'f' || c == 'n' || c == '-' ||
                       (c >= '0' && c <= '9')) {
                state_ = State::in_scalar;
            } else {
                confused_ = true;
            }
            return;
        }

        case State::in_scalar:
            // numbers / true / false / null: structure resumes at , } ]
            if (c == ',' || c == '}' || c == ']') {
                state_ = State::after_value;
                feed_byte(c);
            }
            return;

        case State::after_value:
            if (c == ',') {
                if (!stack_.empty() && stack_.back().object) {
                    state_ = State::expect_key;
                } else {
                    state_ = State::expect_value;
                }
            } else if (c == '}' && !stack_.empty() && stack_.back().object) {
                stack_.pop_back();
                state_ = stack_.empty() ? State::done : State::after_value;
            } else if (c == ']' && !stack_.empty() && !stack_.back().object) {
                stack_.pop_back();
                state_ = stack_.empty() ? State::done : State::after_value;
            } else {
                confused_ = true;
            }
            return;

        case State::done:
            confused_ = true;  // trailing non-ws bytes
            return;

        case State::in_key:
        case State::in_string:
            return;  // handled above
    }
}

// ---------------------------------------------------------------------------
// StreamHandler

StreamConfig StreamConfig::defaults() {
    StreamConfig cfg;
    for (const auto& domain : StubDomainClassifier::domains()) {
        cfg.domain_models[domain] = "model-" + domain;
    }
    return cfg;
}

StreamHandler::StreamHandler(StreamConfig config, ClassifierSet classifiers)
    : config_(std::move(config)), classifiers_(std::move(classifiers)) {}

void StreamHandler::enter_accumulate(std::string_view buffered) {
    phase_ = StreamPhase::accumulate;
    body_.assign(buffered);
    stats_.bytes_accumulated = body_.size();
    content_scanner_.feed(buffered);
    if (!content_scanner_.confused()) {
        const std::string& c = content_scanner_.content();
        if (c.size() > nlp_fed_) {
            nlp_.ingest(std::string_view(c).substr(nlp_fed_));
            nlp_fed_ = c.size();
        }
    }
}

ChunkAction StreamHandler::on_chunk(std::string_view chunk, bool end_of_stream) {
    if (phase_ == StreamPhase::done) {
        throw ProtocolError("chunk delivered after end of stream");
    }
    ++stats_.chunks;
    stats_.bytes_seen += chunk.size();

    if (phase_ == StreamPhase::init) {
        prefix_.append(chunk);
        DetectResult detection = detect_model_in_prefix(prefix_);
        switch (detection.kind) {
            case DetectKind::specified: {
                phase_ = StreamPhase::passthrough;
                client_model_ = detection.model;
                std::string buffered = std::move(prefix_);
                prefix_.clear();
                if (end_of_stream) return finalize_passthrough(buffered);
                ChunkAction act;
                act.kind = ChunkAction::Kind::forward;
                act.forward_bytes = std::move(buffered);
                stats_.bytes_forwarded += act.forward_bytes.size();
                return act;
            }
            case DetectKind::auto_route: {
                std::string buffered = std::move(prefix_);
                prefix_.clear();
                enter_accumulate(buffered);
                if (end_of_stream) return finalize_classified();
                return {};  // consume
            }
            case DetectKind::not_json:
                phase_ = StreamPhase::done;
                return finalize_reject("body is not a JSON object");
            case DetectKind::unknown: {
                if (prefix_.size() >= config_.prefix_cap) {
                    // model did not show up within the cap: classify
                    std::string buffered = std::move(prefix_);
                    prefix_.clear();
                    enter_accumulate(buffered);
                    if (end_of_stream) return finalize_classified();
                    return {};
                }
                if (end_of_stream) {
                    // complete body but detection never resolved: truncated JSON
                    return finalize_reject("malformed body: truncated JSON");
                }
                return {};  // consume, stay in init
            }
        }
    }

    if (phase_ == StreamPhase::passthrough) {
        if (end_of_stream) return finalize_passthrough(chunk);
        ChunkAction act;
        act.kind = ChunkAction::Kind::forward;
        act.forward_bytes.assign(chunk);
        stats_.bytes_forwarded += chunk.size();
        return act;
    }

    // accumulate
    body_.append(chunk);
    stats_.bytes_accumulated = body_.size();
    content_scanner_.feed(chunk);
    if (!content_scanner_.confused()) {
        const std::string& c = content_scanner_.content();
        if (c.size() > nlp_fed_) {
            nlp_.ingest(std::string_view(c).substr(nlp_fed_));
            nlp_fed_ = c.size();
        }
    }
    if (end_of_stream) return finalize_classified();
    return {};  // consume
}

ChunkAction StreamHandler::finalize_passthrough(std::string_view tail_bytes) {
    phase_ = StreamPhase::done;
    ChunkAction act;
    act.kind = ChunkAction::Kind::finalize;
    act.final_body.assign(tail_bytes);
    stats_.bytes_forwarded += tail_bytes.size();
    RoutingDecision decision;
    decision.mode = RouteMode::passthrough;
    decision.selected_model = client_model_;
    act.decision = std::move(decision);
    return act;
}

ChunkAction StreamHandler::finalize_reject(std::string reason) {
    phase_ = StreamPhase::done;
    ChunkAction act;
    act.kind = ChunkAction::Kind::finalize;
    RoutingDecision decision;
    decision.mode = RouteMode::classified;
    decision.rejected = true;
    decision.reject_reason = std::move(reason);
    act.decision = std::move(decision);
    return act;
}

ChunkAction StreamHandler::finalize_classified() {
    phase_ = StreamPhase::done;

    std::optional<std::string> contents;
    try {
        contents = extract_chat_contents(body_);
    } catch (const MalformedJson&) {
        return finalize_reject("malformed body: JSON scan failed");
    }
    if (!contents) {
        return finalize_reject("no message content to classify");
    }

    // Reuse the incremental NLP state when it matches the authoritative
    // full-body extraction; otherwise recompute from scratch. Either way the
    // decision is identical to buffered-mode processing.
    CompressedPrompt compressed;
    nlp_.flush();
    if (!content_scanner_.confused() && nlp_.ingested() == *contents) {
        compressed = compress_prepared(*contents, nlp_.take_prepared(), config_.compression);
    } else {
        compressed = compress(*contents, config_.compression);
    }

    const auto classify_start = std::chrono::steady_clock::now();
    SignalResults signals;
    // jailbreak and PII scan the full text; domain sees the compressed view
    signals.jailbreak = classifiers_.jailbreak->classify(*contents);
    signals.pii = classifiers_.pii->classify(*contents);
    signals.domain = classifiers_.domain->classify(compressed.text);

    RoutingDecision decision;
    decision.mode = RouteMode::classified;
    decision.selected_model = config_.model_for(signals.domain.label);
    decision.eval_text = compressed.text;
    decision.eval_tokens = compressed.output_tokens;
    decision.compress_duration = compressed.duration;
    decision.classify_duration = std::chrono::duration_cast<std::chrono::microseconds>(
        std::chrono::steady_clock::now() - classify_start);
    decision.signals = std::move(signals);

    ChunkAction act;
    act.kind = ChunkAction::Kind::finalize;
    // The upstream always receives the original message content; only the
    // model field is rewritten (when present) to the routed model.
    try {
        act.final_body = rewrite_model(body_, decision.selected_model);
    } catch (const ModelFieldMissing&) {
        act.final_body = body_;  // absent model: headers carry the routing
    } catch (const MalformedJson&) {
        return finalize_reject("malformed body: JSON scan failed");
    }
    act.decision = std::move(decision);
    return act;
}

}  // namespace routefast
