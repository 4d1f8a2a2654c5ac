// Copyright 2026 The RouteFast Authors
// SPDX-License-Identifier: Apache-2.0

#include "routefast/classifiers.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <map>

#include "routefast/term_vector.hpp"

namespace routefast {

namespace {

std::string ascii_lower_copy(std::string_view text) {
    std::string out(text);
    for (char& c : out) {
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c + 32);
    }
    return out;
}

struct JailbreakPattern {
    std::string_view needle;
    double score;
};

// Scores approximate how strongly each family correlates with adversarial
// intent; the canonical benchmark prefix sits near the decision boundary.
constexpr std::array<JailbreakPattern, 8> kJailbreakPatterns{{
    {"ignore all previous instructions", 0.55},
    {"ignore previous instructions", 0.55},
    {"disregard all previous instructions", 0.60},
    {"you are now dan", 0.90},
    {"pretend you have no restrictions", 0.80},
    {"bypass your safety", 0.85},
    {"do anything now", 0.70},
    {"respond without any filter", 0.75},
}};

bool digit(char c) { return c >= '0' && c <= '9'; }

}  // namespace

bool luhn_valid(std::string_view digits) {
    if (digits.size() < 13 || digits.size() > 19) return false;
    int sum = 0;
    bool dbl = false;
    for (std::size_t i = digits.size(); i-- > 0;) {
        int d = digits[i] - '0';
        if (dbl) {
            d *= 2;
            if (d > 9) d -= 9;
        }
        sum += d;
        dbl = !dbl;
    }
    return sum % 10 == 0;
}

JailbreakSignal StubJailbreakClassifier::classify(std::string_view text) const {
    std::string lowered = ascii_lower_copy(text);
    JailbreakSignal sig;
    for (const auto& p : kJailbreakPatterns) {
        if (lowered.find(p.needle) == std::string::npos) continue;
        if (p.score > sig.score) {
            sig.score = p.score;
            sig.matched = std::string(p.needle);
        }
    }
    sig.flagged = sig.score >= threshold_;
    return sig;
}

namespace {

// 123-45-6789 exactly, not embedded in a longer digit run
bool ssn_at(std::string_view t, std::size_t i) {
    if (i + 11 > t.size()) return false;
    for (int k = 0; k < 3; ++k)
        if (!digit(t[i + static_cast<std::size_t>(k)])) return false;
    if (t[i + 3] != '-') return false;
    if (!digit(t[i + 4]) || !digit(t[i + 5])) return false;
    if (t[i + 6] != '-') return false;
    for (int k = 7; k < 11; ++k)
        if (!digit(t[i + static_cast<std::size_t>(k)])) return false;
    if (i > 0 && (digit(t[i - 1]) || t[i - 1] == '-')) return false;
    if (i + 11 < t.size() && (digit(t[i + 11]) || t[i + 11] == '-')) return false;
    return true;
}

bool email_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '_' || c == '%' ||
           c == '+' || c == '-';
}

bool email_at(std::string_view t, std::size_t at) {
    if (t[at] != '@') return false;
    std::size_t local_begin = at;
    while (local_begin > 0 && email_char(t[local_begin - 1])) --local_begin;
    if (local_begin == at) return false;
    std::size_t domain_end = at + 1;
    std::size_t last_dot = 0;
    while (domain_end < t.size() &&
           (std::isalnum(static_cast<unsigned char>(t[domain_end])) || t[domain_end] == '.' ||
            t[domain_end] == '-')) {
        if (t[domain_end] == '.') last_dot = domain_end;
        ++domain_end;
    }
    if (last_dot == 0 || domain_end - last_dot - 1 < 2) return false;  // needs a TLD
    return last_dot > at + 1;
}

}  // namespace

PiiSignal StubPiiClassifier::classify(std::string_view text) const {
    PiiSignal sig;
    bool ssn = false, email = false, card = false;

    for (std::size_t i = 0; i < text.size(); ++i) {
        if (!ssn && digit(text[i]) && ssn_at(text, i)) ssn = true;
        if (!email && text[i] == '@' && email_at(text, i)) email = true;
    }

    // credit card: 13-19 digits, optionally grouped by single spaces or
    // dashes, passing Luhn
    std::string run;
    std::size_t i = 0;
    while (i < text.size() && !card) {
        if (!digit(text[i])) {
            ++i;
            continue;
        }
        run.clear();
        std::size_t j = i;
        while (j < text.size() && run.size() <= 19) {
            if (digit(text[j])) {
                run.push_back(text[j]);
                ++j;
            } else if ((text[j] == ' ' || text[j] == '-') && j + 1 < text.size() &&
                       digit(text[j + 1])) {
                ++j;
            } else {
                break;
            }
        }
        if (run.size() >= 13 && run.size() <= 19 && luhn_valid(run)) card = true;
        i = j;
    }

    if (ssn) sig.kinds.emplace_back("ssn");
    if (email) sig.kinds.emplace_back("email");
    if (card) sig.kinds.emplace_back("credit_card");
    sig.flagged = !sig.kinds.empty();
    return sig;
}

namespace {

struct DomainLexicon {
    std::string name;
    std::vector<std::string_view> keywords;
};

const std::vector<DomainLexicon>& lexicons() {
    static const std::vector<DomainLexicon> kLexicons = {
        {"computer_science",
         {"algorithm", "compiler", "kernel", "software", "cpu", "thread", "cache", "database",
          "protocol", "encryption", "latency", "runtime", "debugger", "scheduler"}},
        {"finance",
         {"revenue", "earnings", "portfolio", "dividend", "buyback", "margins", "fiscal",
          "investor", "equity", "liquidity", "hedge", "quarterly", "valuation", "shares"}},
        {"health",
         {"patient", "clinical", "immune", "diagnosis", "therapy", "vaccine", "symptom",
          "dosage", "cardiac", "oncology", "antibody", "pathogen"}},
        {"legal",
         {"contract", "statute", "plaintiff", "liability", "jurisdiction", "clause", "tort",
          "litigation", "compliance", "indemnity", "arbitration", "defendant"}},
        {"science",
         {"experiment", "hypothesis", "quantum", "molecule", "particle", "catalyst", "genome",
          "telescope", "entropy", "isotope", "spectrum", "photon"}},
    };
    return kLexicons;
}

}  // namespace

const std::vector<std::string>& StubDomainClassifier::domains() {
    static const std::vector<std::string> kNames = [] {
        std::vector<std::string> names;
        for (const auto& lex : lexicons()) names.push_back(lex.name);
        return names;
    }();
    return kNames;
}

DomainSignal StubDomainClassifier::classify(std::string_view text) const {
    auto terms = tokenize_terms(text);
    std::map<std::string_view, std::size_t> counts;
    for (const auto& term : terms) ++counts[std::string_view(term)];

    std::size_t total_hits = 0;
    std::string best;
    std::size_t best_hits = 0;
    for (const auto& lex : lexicons()) {
        std::size_t hits = 0;
        for (auto kw : lex.keywords) {
            auto it = counts.find(kw);
            if (it != counts.end()) hits += it->second;
        }
        total_hits += hits;
        if (hits > best_hits) {  // ties keep the earlier (lexicographic) domain
            best_hits = hits;
            best = lex.name;
        }
    }

    DomainSignal sig;
    if (best_hits == 0) return sig;  // "general", score 0
    sig.label = best;
    sig.score = static_cast<double>(best_hits) / static_cast<double>(total_hits);
    return sig;
}

ClassifierSet ClassifierSet::stubs(double jailbreak_threshold) {
    ClassifierSet set;
    set.jailbreak = std::make_shared<StubJailbreakClassifier>(jailbreak_threshold);
    set.pii = std::make_shared<StubPiiClassifier>();
    set.domain = std::make_shared<StubDomainClassifier>();
    return set;
}

}  // namespace routefast
