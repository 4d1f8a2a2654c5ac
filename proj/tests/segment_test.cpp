// Copyright 2026 The RouteFast Authors
// SPDX-License-Identifier: Apache-2.0

#include "routefast/segment.hpp"

#include <gtest/gtest.h>

#include <random>

namespace routefast {
namespace {

TEST(EstimateTokens, EmptyIsZero) { EXPECT_EQ(estimate_tokens(""), 0u); }

TEST(EstimateTokens, AsciiCharsPerToken) {
    EXPECT_EQ(estimate_tokens("abcdefgh"), 2u);  // 8/4
    EXPECT_EQ(estimate_tokens("a"), 1u);
    EXPECT_EQ(estimate_tokens("abcd"), 1u);
    EXPECT_EQ(estimate_tokens("abcde"), 2u);
}

TEST(EstimateTokens, CjkCodepointsCountOne) {
    EXPECT_EQ(estimate_tokens("你好世界"), 4u);
    EXPECT_EQ(estimate_tokens("你好ab"), 3u);  // 2 cjk + ceil(2/4)
}

TEST(EstimateTokens, MonotoneInLength) {
    std::string text;
    std::size_t prev = 0;
    for (int i = 0; i < 200; ++i) {
        text += (i % 3 == 0) ? "好" : "x";
        std::size_t now = estimate_tokens(text);
        EXPECT_GE(now, prev);
        prev = now;
    }
}

TEST(EstimateTokens, SubAdditive) {
    std::mt19937_64 rng(1);
    const std::string pieces[] = {"hello ", "你好。", "a", "  ", "word."};
    for (int trial = 0; trial < 200; ++trial) {
        std::string a, b;
        for (int i = 0; i < 5; ++i) a += pieces[rng() % 5];
        for (int i = 0; i < 5; ++i) b += pieces[rng() % 5];
        EXPECT_LE(estimate_tokens(a + b), estimate_tokens(a) + estimate_tokens(b) + 1);
    }
}

TEST(SplitSentences, Empty) { EXPECT_TRUE(split_sentences("").empty()); }

TEST(SplitSentences, SingleTerminator) {
    auto s = split_sentences("Hello world.");
    ASSERT_EQ(s.size(), 1u);
    EXPECT_EQ(s[0].index, 0u);
    EXPECT_EQ(s[0].text, "Hello world.");
    EXPECT_GE(s[0].token_estimate, 1u);
}

TEST(SplitSentences, CjkFullStops) {
    auto s = split_sentences("你好。再见。");
    ASSERT_EQ(s.size(), 2u);
    EXPECT_EQ(s[0].text, "你好。");
    EXPECT_EQ(s[1].text, "再见。");
}

// hand-segmented multilingual fixture (built before the splitter): CJK,
// Devanagari danda, Arabic question mark, abbreviation guards
TEST(SplitSentences, MultilingualFixture) {
    const std::string text =
        "你好。再见！こんにちは。मैं ठीक हूँ। هل أنت بخير؟ Mr. Smith arrived. "
        "U.S. policy changed.";
    auto s = split_sentences(text);
    ASSERT_EQ(s.size(), 7u);
    EXPECT_EQ(s[0].text, "你好。");
    EXPECT_EQ(s[1].text, "再见！");
    EXPECT_EQ(s[2].text, "こんにちは。");
    EXPECT_EQ(s[3].text, "मैं ठीक हूँ।");
    EXPECT_EQ(s[4].text, "هل أنت بخير؟");
    EXPECT_EQ(s[5].text, "Mr. Smith arrived.");
    EXPECT_EQ(s[6].text, "U.S. policy changed.");
}

TEST(SplitSentences, SingleLetterDotSplits) {
    // "A." is a sentence end; only dotted compounds like "U.S." are guarded
    auto s = split_sentences("A. B. C.");
    ASSERT_EQ(s.size(), 3u);
    EXPECT_EQ(s[0].text, "A.");
    EXPECT_EQ(s[2].text, "C.");
}

TEST(SplitSentences, TerminatorWithoutSpaceDoesNotSplit) {
    auto s = split_sentences("pi is 3.14 not 3.15");
    ASSERT_EQ(s.size(), 1u);
    auto t = split_sentences("Really?!Yes. Done.");
    ASSERT_EQ(t.size(), 2u);  // "?!Y" has no whitespace after the run
    EXPECT_EQ(t[0].text, "Really?!Yes.");
}

TEST(SplitSentences, NewlineRunsSplit) {
    auto s = split_sentences("first line\nsecond line\n\nthird");
    ASSERT_EQ(s.size(), 3u);
    EXPECT_EQ(s[0].text, "first line");
    EXPECT_EQ(s[1].text, "second line");
    EXPECT_EQ(s[2].text, "third");
}

TEST(SplitSentences, TrailingFragmentKept) {
    auto s = split_sentences("Complete. trailing fragment without end");
    ASSERT_EQ(s.size(), 2u);
    EXPECT_EQ(s[1].text, "trailing fragment without end");
}

std::string random_doc(std::mt19937_64& rng, std::size_t pieces) {
    static const std::string parts[] = {
        "word",    "the",  "U.S.",  "e.g.",  "3.14", "你好",   "好的。", "end.",
        "stop!",   "eh?",  "\n",    " ",     "  ",   "Mr.",    "x",      "قط؟",
        "って。", "A.",   "done.", "\n\n",  "ok",   "वाक्य।",
    };
    std::string doc;
    for (std::size_t i = 0; i < pieces; ++i) {
        doc += parts[rng() % (sizeof(parts) / sizeof(parts[0]))];
        if (rng() % 3) doc += " ";
    }
    return doc;
}

TEST(SplitSentences, RoundTripReconstruction) {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 300; ++trial) {
        std::string doc = random_doc(rng, 1 + rng() % 60);
        auto sentences = split_sentences(doc);
        std::size_t cursor = 0;
        for (const auto& s : sentences) {
            ASSERT_LE(s.char_span.begin, s.char_span.end);
            // the gap before this sentence is pure whitespace
            for (std::size_t i = cursor; i < s.char_span.begin; ++i) {
                auto d = utf8::decode(doc, i);
                ASSERT_TRUE(utf8::is_space(d.cp)) << "doc=" << doc << " gap at " << i;
                i += d.len - 1;
            }
            ASSERT_EQ(doc.substr(s.char_span.begin, s.char_span.size()), s.text);
            cursor = s.char_span.end;
        }
        for (std::size_t i = cursor; i < doc.size(); ++i) {
            auto d = utf8::decode(doc, i);
            ASSERT_TRUE(utf8::is_space(d.cp));
            i += d.len - 1;
        }
        // reconstruct byte-for-byte from spans and gaps
        std::string rebuilt;
        std::size_t prev = 0;
        for (const auto& s : sentences) {
            rebuilt += doc.substr(prev, s.char_span.begin - prev);
            rebuilt += s.text;
            prev = s.char_span.end;
        }
        rebuilt += doc.substr(prev);
        ASSERT_EQ(rebuilt, doc);
    }
}

TEST(SplitSentences, IdempotentPerSentence) {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 200; ++trial) {
        std::string doc = random_doc(rng, 1 + rng() % 40);
        for (const auto& s : split_sentences(doc)) {
            auto again = split_sentences(s.text);
            ASSERT_EQ(again.size(), 1u) << "sentence re-split: '" << s.text << "'";
            EXPECT_EQ(again[0].text, s.text);
        }
    }
}

TEST(SplitSentences, LongSentenceHardSplit) {
    std::string doc;
    for (int i = 0; i < 700; ++i) doc += "word ";  // 3500 bytes, no terminator
    auto s = split_sentences(doc);
    ASSERT_GE(s.size(), 2u);
    for (const auto& sent : s) EXPECT_LE(sent.text.size(), 2005u);

    std::string no_space(4100, 'x');  // hard split at 4000 even without whitespace
    auto t = split_sentences(no_space);
    ASSERT_EQ(t.size(), 2u);
    EXPECT_EQ(t[0].text.size(), 4000u);
}

TEST(SplitSentences, MalformedBytesDegrade) {
    std::string doc = "ok then \xFF\xFE broken. next one.";
    auto s = split_sentences(doc);
    ASSERT_EQ(s.size(), 2u);  // never fails, latin-1 fallback
}

TEST(CapSentences, UnderCapIsIdentity) {
    auto sentences = split_sentences("a. b. c. d.");
    auto capped = cap_sentences(sentences, 500);
    ASSERT_EQ(capped.size(), sentences.size());
    for (std::size_t i = 0; i < capped.size(); ++i) EXPECT_EQ(capped[i].index, i);
}

std::vector<Sentence> numbered(std::size_t n) {
    std::vector<Sentence> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i].index = i;
    return v;
}

// brute-force uniform sampling reference: round(k * (n-1)/(cap-1))
std::vector<std::size_t> stride_reference(std::size_t n, std::size_t cap) {
    std::vector<std::size_t> idx;
    long double stride = static_cast<long double>(n - 1) / static_cast<long double>(cap - 1);
    for (std::size_t k = 0; k < cap; ++k) {
        idx.push_back(static_cast<std::size_t>(llroundl(stride * static_cast<long double>(k))));
    }
    return idx;
}

TEST(CapSentences, ThousandToFiveHundred) {
    auto capped = cap_sentences(numbered(1000), 500);
    ASSERT_EQ(capped.size(), 500u);
    EXPECT_EQ(capped.front().index, 0u);
    EXPECT_EQ(capped.back().index, 999u);
    auto expected = stride_reference(1000, 500);
    for (std::size_t k = 0; k < 500; ++k) EXPECT_EQ(capped[k].index, expected[k]);
}

TEST(CapSentences, OneOver) {
    auto capped = cap_sentences(numbered(501), 500);
    ASSERT_EQ(capped.size(), 500u);
    EXPECT_EQ(capped.front().index, 0u);
    EXPECT_EQ(capped.back().index, 500u);
    for (std::size_t k = 1; k < capped.size(); ++k) {
        EXPECT_LT(capped[k - 1].index, capped[k].index);  // order, no duplicates
    }
}

TEST(CapSentences, LengthAndEndpointProperty) {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 100; ++trial) {
        std::size_t n = 2 + rng() % 2000;
        std::size_t cap = 2 + rng() % 600;
        auto capped = cap_sentences(numbered(n), cap);
        EXPECT_EQ(capped.size(), std::min(n, cap));
        if (n > cap) {
            EXPECT_EQ(capped.front().index, 0u);
            EXPECT_EQ(capped.back().index, n - 1);
        }
    }
}

}  // namespace
}  // namespace routefast
