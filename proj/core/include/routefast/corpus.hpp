// Copyright 2026 The RouteFast Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace routefast {

enum class SignalPosition { none, start, middle, end };

std::string_view signal_position_name(SignalPosition pos);

// Synthetic benchmark / fixture prompt with embedded ground truth. PII
// sentences carry rare tokens (generated emails, SSN-format digits,
// Luhn-valid card numbers) so the TF-IDF and novelty signals have something
// real to latch onto.
struct CorpusDoc {
    std::string text;
    std::string domain;
    std::size_t token_estimate = 0;

    std::string jailbreak_text;  // empty when not embedded
    SignalPosition jailbreak_pos = SignalPosition::none;
    std::string domain_question;
    SignalPosition domain_question_pos = SignalPosition::none;
    std::vector<std::string> pii_values;  // literal embedded tokens
    std::vector<std::string> pii_kinds;   // parallel: ssn | email | credit_card

    bool has_pii() const { return !pii_values.empty(); }
};

struct CorpusOptions {
    uint64_t seed = 42;
    std::size_t count = 96;
    std::size_t target_tokens = 2000;
    std::string domain;  // empty = cycle through all stub domains
    SignalPosition jailbreak = SignalPosition::start;
    SignalPosition domain_question = SignalPosition::end;
    bool embed_pii = true;  // spread through the body, ~1 per 1500 tokens
};

// Deterministic in (options.seed, index).
CorpusDoc generate_doc(const CorpusOptions& options, uint64_t index);
std::vector<CorpusDoc> generate_corpus(const CorpusOptions& options);

// Ground-truth manifest for a generated corpus (JSON array, one entry per doc).
std::string corpus_manifest_json(const std::vector<CorpusDoc>& docs);

// OpenAI-shaped chat completion body around the given contents.
std::string make_chat_body(std::string_view model, std::string_view system_content,
                           std::string_view user_content, bool stream = false);

}  // namespace routefast
