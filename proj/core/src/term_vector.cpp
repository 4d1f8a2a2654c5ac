// Copyright 2026 The RouteFast Authors
// SPDX-License-Identifier: Apache-2.0

#include "routefast/term_vector.hpp"

#include <algorithm>
#include <cmath>

#include "routefast/segment.hpp"

namespace routefast {

uint32_t TermDictionary::intern(std::string_view term) {
    auto it = ids_.find(std::string(term));
    if (it != ids_.end()) return it->second;
    auto id = static_cast<uint32_t>(terms_.size());
    terms_.emplace_back(term);
    ids_.emplace(terms_.back(), id);
    return id;
}

std::optional<uint32_t> TermDictionary::find(std::string_view term) const {
    auto it = ids_.find(std::string(term));
    if (it == ids_.end()) return std::nullopt;
    return it->second;
}

namespace {

bool is_strippable_punct(char32_t cp) {
    if (cp < 0x80) {
        char c = static_cast<char>(cp);
        return (c >= '!' && c <= '/') || (c >= ':' && c <= '@') || (c >= '[' && c <= '`') ||
               (c >= '{' && c <= '~');
    }
    // sentence terminators and common CJK punctuation
    return cp == 0x3002 || cp == 0xFF01 || cp == 0xFF1F || cp == 0x061F || cp == 0x0964 ||
           cp == 0x3001 || cp == 0xFF0C || cp == 0x201C || cp == 0x201D || cp == 0x2018 ||
           cp == 0x2019;
}

}  // namespace

std::vector<std::string> tokenize_terms(std::string_view text) {
    std::vector<std::string> terms;
    std::string current;
    std::vector<std::pair<std::size_t, char32_t>> cps;  // (byte offset, codepoint)
    auto flush = [&] {
        if (current.empty()) {
            cps.clear();
            return;
        }
        // strip leading/trailing punctuation; inner punctuation (hyphens,
        // dots in "e.g", digit groups) stays, which keeps rare tokens rare
        std::size_t lo = 0, hi = cps.size();
        while (lo < hi && is_strippable_punct(cps[lo].second)) ++lo;
        while (hi > lo && is_strippable_punct(cps[hi - 1].second)) --hi;
        if (hi > lo) {
            std::size_t b = cps[lo].first;
            std::size_t e = hi == cps.size() ? current.size() : cps[hi].first;
            terms.push_back(current.substr(b, e - b));
        }
        current.clear();
        cps.clear();
    };

    std::size_t pos = 0;
    while (pos < text.size()) {
        auto [cp, len] = utf8::decode(text, pos);
        if (utf8::is_space(cp)) {
            flush();
        } else if (utf8::is_cjk(cp)) {
            flush();
            if (!is_strippable_punct(cp)) terms.emplace_back(text.substr(pos, len));
        } else if (cp < 0x80) {
            char c = static_cast<char>(cp);
            cps.emplace_back(current.size(), cp);
            current.push_back(c >= 'A' && c <= 'Z' ? static_cast<char>(c + 32) : c);
        } else {
            cps.emplace_back(current.size(), cp);
            current.append(text.substr(pos, len));
        }
        pos += len;
    }
    flush();
    return terms;
}

TermVector build_term_vector(std::string_view text, TermDictionary& dict) {
    TermVector v;
    auto terms = tokenize_terms(text);
    if (terms.empty()) return v;

    std::vector<uint32_t> ids;
    ids.reserve(terms.size());
    for (const auto& t : terms) ids.push_back(dict.intern(t));
    std::sort(ids.begin(), ids.end());

    double norm_sq = 0.0;
    for (std::size_t i = 0; i < ids.size();) {
        std::size_t j = i;
        while (j < ids.size() && ids[j] == ids[i]) ++j;
        auto count = static_cast<double>(j - i);
        v.entries.emplace_back(ids[i], count);
        norm_sq += count * count;
        i = j;
    }
    v.total_terms = terms.size();
    v.norm = std::sqrt(norm_sq);
    return v;
}

double dot(const TermVector& a, const TermVector& b) {
    double acc = 0.0;
    std::size_t i = 0, j = 0;
    while (i < a.entries.size() && j < b.entries.size()) {
        uint32_t ia = a.entries[i].first, ib = b.entries[j].first;
        if (ia == ib) {
            acc += a.entries[i].second * b.entries[j].second;
            ++i;
            ++j;
        } else if (ia < ib) {
            ++i;
        } else {
            ++j;
        }
    }
    return acc;
}

double cosine(const TermVector& a, const TermVector& b) {
    if (a.norm == 0.0 || b.norm == 0.0) return 0.0;
    double c = dot(a, b) / (a.norm * b.norm);
    return std::clamp(c, 0.0, 1.0);
}

}  // namespace routefast
