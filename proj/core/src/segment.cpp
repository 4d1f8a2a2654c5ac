// Copyright 2026 The RouteFast Authors
// SPDX-License-Identifier: Apache-2.0

#include "routefast/segment.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

namespace routefast {

namespace utf8 {

Decoded decode(std::string_view text, std::size_t pos) {
    const auto* bytes = reinterpret_cast<const unsigned char*>(text.data());
    const std::size_t n = text.size();
    unsigned char b0 = bytes[pos];
    if (b0 < 0x80) return {b0, 1};

    std::size_t len = 0;
    char32_t cp = 0;
    if ((b0 & 0xE0) == 0xC0) {
        len = 2;
        cp = b0 & 0x1F;
    } else if ((b0 & 0xF0) == 0xE0) {
        len = 3;
        cp = b0 & 0x0F;
    } else if ((b0 & 0xF8) == 0xF0) {
        len = 4;
        cp = b0 & 0x07;
    } else {
        return {b0, 1};  // stray continuation byte
    }
    if (pos + len > n) return {b0, 1};
    for (std::size_t i = 1; i < len; ++i) {
        unsigned char bi = bytes[pos + i];
        if ((bi & 0xC0) != 0x80) return {b0, 1};
        cp = (cp << 6) | (bi & 0x3F);
    }
    return {cp, len};
}

bool is_cjk(char32_t cp) {
    return (cp >= 0x2E80 && cp <= 0x303F) ||    // radicals, kana punctuation, 。
           (cp >= 0x3040 && cp <= 0x30FF) ||    // hiragana, katakana
           (cp >= 0x3400 && cp <= 0x4DBF) ||    // CJK ext A
           (cp >= 0x4E00 && cp <= 0x9FFF) ||    // CJK unified
           (cp >= 0xAC00 && cp <= 0xD7AF) ||    // hangul syllables
           (cp >= 0xF900 && cp <= 0xFAFF) ||    // compatibility ideographs
           (cp >= 0xFF00 && cp <= 0xFFEF) ||    // fullwidth forms, ！ ？
           (cp >= 0x20000 && cp <= 0x2FA1F);    // CJK ext B+
}

bool is_space(char32_t cp) {
    switch (cp) {
        case U' ':
        case U'\t':
        case U'\n':
        case U'\r':
        case U'\v':
        case U'\f':
        case 0x00A0:  // nbsp
        case 0x3000:  // ideographic space
            return true;
        default:
            return false;
    }
}

}  // namespace utf8

namespace {

constexpr std::size_t kSoftSplitBytes = 2000;
constexpr std::size_t kHardSplitBytes = 4000;

bool is_immediate_terminator(char32_t cp) {
    // Fullwidth/CJK, Arabic question mark and Devanagari danda end a sentence
    // regardless of what follows (these scripts need no trailing space).
    return cp == 0x3002 || cp == 0xFF01 || cp == 0xFF1F || cp == 0x061F || cp == 0x0964;
}

bool is_ascii_terminator(char32_t cp) {
    return cp == U'.' || cp == U'!' || cp == U'?';
}

bool is_word_char(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
           c == '.';
}

char ascii_lower(char c) { return (c >= 'A' && c <= 'Z') ? static_cast<char>(c + 32) : c; }

// Abbreviation guard for ".": looks at the word ending right before the dot.
// Guards single-letter-dot pair words ("U.S.", "e.g.") and a small fixed
// list. A lone letter-dot ("A.") is a sentence end, not an abbreviation.
bool is_abbreviation(std::string_view text, std::size_t dot_pos) {
    std::size_t start = dot_pos;
    while (start > 0 && is_word_char(text[start - 1])) --start;
    if (start == dot_pos) return false;  // dot with no preceding word
    std::string_view word = text.substr(start, dot_pos - start);

    std::size_t last_seg = word.rfind('.');
    if (last_seg != std::string_view::npos) {
        std::string_view segment = word.substr(last_seg + 1);
        if (segment.size() == 1 && ((segment[0] >= 'a' && segment[0] <= 'z') ||
                                    (segment[0] >= 'A' && segment[0] <= 'Z'))) {
            return true;
        }
    }

    static constexpr std::array<std::string_view, 5> kGuardList = {"mr", "dr", "vs", "e.g",
                                                                   "i.e"};
    std::string lowered;
    lowered.reserve(word.size());
    for (char c : word) lowered.push_back(ascii_lower(c));
    return std::find(kGuardList.begin(), kGuardList.end(), lowered) != kGuardList.end();
}

struct Counter {
    std::size_t latin = 0;
    std::size_t cjk = 0;

    void add(char32_t cp) {
        if (utf8::is_cjk(cp)) {
            ++cjk;
        } else {
            ++latin;
        }
    }
    std::size_t tokens() const { return (latin + 3) / 4 + cjk; }
};

}  // namespace

std::size_t estimate_tokens(std::string_view text) {
    Counter c;
    std::size_t pos = 0;
    while (pos < text.size()) {
        auto [cp, len] = utf8::decode(text, pos);
        c.add(cp);
        pos += len;
    }
    return c.tokens();
}

std::vector<Sentence> split_sentences(std::string_view text) {
    std::vector<Sentence> out;
    const std::size_t n = text.size();
    std::size_t pos = 0;

    auto emit = [&](std::size_t begin, std::size_t end, const Counter& counts) {
        if (end <= begin) return;
        Sentence s;
        s.index = out.size();
        s.char_span = {begin, end};
        s.text = std::string(text.substr(begin, end - begin));
        s.latin_chars = counts.latin;
        s.cjk_chars = counts.cjk;
        s.token_estimate = counts.tokens();
        out.push_back(std::move(s));
    };

    while (pos < n) {
        // skip inter-sentence whitespace
        while (pos < n) {
            auto [cp, len] = utf8::decode(text, pos);
            if (!utf8::is_space(cp)) break;
            pos += len;
        }
        if (pos >= n) break;

        const std::size_t begin = pos;
        std::size_t end = begin;  // exclusive end of the sentence found so far
        Counter counts;
        bool boundary = false;

        while (pos < n && !boundary) {
            auto [cp, len] = utf8::decode(text, pos);

            if (cp == U'\n' || cp == U'\r') {
                end = pos;
                boundary = true;
                break;
            }
            if (utf8::is_space(cp) && pos - begin >= kSoftSplitBytes) {
                end = pos;
                boundary = true;
                break;
            }
            if (pos - begin >= kHardSplitBytes) {
                end = pos;
                boundary = true;
                break;
            }

            if (is_immediate_terminator(cp)) {
                pos += len;
                counts.add(cp);
                // absorb a trailing terminator run: "！？" ends once
                while (pos < n) {
                    auto nxt = utf8::decode(text, pos);
                    if (!is_immediate_terminator(nxt.cp) && !is_ascii_terminator(nxt.cp)) break;
                    counts.add(nxt.cp);
                    pos += nxt.len;
                }
                end = pos;
                boundary = true;
                break;
            }

            if (is_ascii_terminator(cp)) {
                std::size_t after = pos + len;
                bool sentence_end = false;
                if (after >= n) {
                    sentence_end = true;
                } else {
                    auto nxt = utf8::decode(text, after);
                    if (utf8::is_space(nxt.cp)) sentence_end = true;
                }
                if (sentence_end && cp == U'.' && is_abbreviation(text, pos)) {
                    sentence_end = false;
                }
                counts.add(cp);
                pos = after;
                if (sentence_end) {
                    end = pos;
                    boundary = true;
                    break;
                }
                continue;
            }

            counts.add(cp);
            pos += len;
        }

        if (!boundary) end = pos;  // trailing fragment without terminator
        emit(begin, end, counts);
    }
    return out;
}

std::vector<Sentence> cap_sentences(std::vector<Sentence> sentences, std::size_t cap) {
    if (cap < 2) throw std::invalid_argument("cap_sentences: cap must be >= 2");
    const std::size_t n = sentences.size();
    if (n <= cap) return sentences;

    // Uniform stride over [0, n-1]; endpoints always kept. With n > cap the
    // stride is > 1, so the rounded indices are strictly increasing.
    std::vector<Sentence> kept;
    kept.reserve(cap);
    const double stride = static_cast<double>(n - 1) / static_cast<double>(cap - 1);
    for (std::size_t k = 0; k < cap; ++k) {
        auto idx = static_cast<std::size_t>(std::llround(stride * static_cast<double>(k)));
        idx = std::min(idx, n - 1);
        kept.push_back(std::move(sentences[idx]));
    }
    return kept;
}

}  // namespace routefast
