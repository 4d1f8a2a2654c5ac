// Copyright 2026 The RouteFast Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace routefast {

struct ByteSpan {
    std::size_t begin = 0;
    std::size_t end = 0;

    std::size_t size() const { return end - begin; }
    bool operator==(const ByteSpan&) const = default;
};

// One segmented sentence. `text` is always a verbatim, contiguous substring
// of the source document; `char_span` gives its byte offsets so that the
// source can be reconstructed from the sentence list plus the whitespace
// gaps between spans.
struct Sentence {
    std::size_t index = 0;
    std::string text;
    std::size_t token_estimate = 0;
    ByteSpan char_span;
    // Codepoint counts backing token_estimate; kept so pipelines can do
    // incremental budget math without rescanning the text.
    std::size_t latin_chars = 0;
    std::size_t cjk_chars = 0;
};

// Character-length token heuristic: ceil(latin_codepoints / 4) + cjk_codepoints.
// Deterministic and monotone in text length; 0 only for empty text.
std::size_t estimate_tokens(std::string_view text);

// Rule-based multilingual segmenter. Terminators: . ! ? 。 ！ ？ ؟ । and
// newline runs. ASCII . ! ? split only when followed by whitespace or end of
// input, with an abbreviation guard on "." (single-letter segments and the
// built-in set Mr/Dr/vs/e.g/i.e). The other terminators split immediately.
// Sentences longer than 2000 bytes are hard-split at the next whitespace
// (or unconditionally at 4000 bytes on a codepoint boundary, for scripts
// without whitespace). Never fails; malformed bytes are treated as Latin-1.
std::vector<Sentence> split_sentences(std::string_view text);

// Uniform-stride downsampling to at most `cap` sentences (cap >= 2).
// When sampling, index 0 and index n-1 are always retained and the original
// relative order is preserved.
std::vector<Sentence> cap_sentences(std::vector<Sentence> sentences, std::size_t cap);

namespace utf8 {

// Decodes one codepoint at `pos`; returns {codepoint, byte_length}.
// Invalid bytes decode as themselves with length 1 (Latin-1 fallback).
struct Decoded {
    char32_t cp;
    std::size_t len;
};
Decoded decode(std::string_view text, std::size_t pos);

bool is_cjk(char32_t cp);
bool is_space(char32_t cp);

}  // namespace utf8

}  // namespace routefast
