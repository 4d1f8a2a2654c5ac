// Copyright 2026 The RouteFast Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace routefast {

// Interns terms to dense ids so term vectors can be stored as sorted
// (id, count) pairs and compared with merge joins instead of hash lookups.
class TermDictionary {
public:
    uint32_t intern(std::string_view term);
    std::optional<uint32_t> find(std::string_view term) const;
    const std::string& term(uint32_t id) const { return terms_[id]; }
    std::size_t size() const { return terms_.size(); }

private:
    std::unordered_map<std::string, uint32_t> ids_;
    std::vector<std::string> terms_;
};

// Sparse term-frequency vector for one sentence. Entries are sorted by term
// id, counts are >= 1, and the L2 norm is cached at build time. An empty
// sentence yields an empty vector with norm 0.
struct TermVector {
    std::vector<std::pair<uint32_t, double>> entries;
    double norm = 0.0;
    std::size_t total_terms = 0;  // token instances, i.e. sum of counts

    bool empty() const { return entries.empty(); }
};

// Tokenizes into lowercased, punctuation-stripped whitespace tokens; each
// CJK codepoint is emitted as its own term (those scripts carry no spaces).
std::vector<std::string> tokenize_terms(std::string_view text);

TermVector build_term_vector(std::string_view text, TermDictionary& dict);

// Cosine similarity in [0, 1]; 0 when either vector has norm 0.
double cosine(const TermVector& a, const TermVector& b);

double dot(const TermVector& a, const TermVector& b);

}  // namespace routefast
