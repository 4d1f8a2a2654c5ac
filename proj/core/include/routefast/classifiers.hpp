// Copyright 2026 The RouteFast Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace routefast {

struct JailbreakSignal {
    bool flagged = false;
    double score = 0.0;
    std::string matched;  // the pattern that fired, for diagnostics
};

struct PiiSignal {
    bool flagged = false;
    std::vector<std::string> kinds;  // "ssn", "email", "credit_card"
};

struct DomainSignal {
    std::string label = "general";
    double score = 0.0;
};

// Pluggable classifier interface. The library ships deterministic keyword /
// pattern stubs so the whole routing pipeline is testable without a model
// runtime; real model backends can be dropped in behind the same interface.
class JailbreakClassifier {
public:
    virtual ~JailbreakClassifier() = default;
    virtual JailbreakSignal classify(std::string_view text) const = 0;
};

class PiiClassifier {
public:
    virtual ~PiiClassifier() = default;
    virtual PiiSignal classify(std::string_view text) const = 0;
};

class DomainClassifier {
public:
    virtual ~DomainClassifier() = default;
    virtual DomainSignal classify(std::string_view text) const = 0;
};

// Prefix/keyword scoring. "Ignore all previous instructions" lands just
// above the default 0.5 decision boundary.
class StubJailbreakClassifier final : public JailbreakClassifier {
public:
    explicit StubJailbreakClassifier(double threshold = 0.5) : threshold_(threshold) {}
    JailbreakSignal classify(std::string_view text) const override;

private:
    double threshold_;
};

// SSN / email / credit-card (Luhn-checked) pattern scans, no regex engine.
class StubPiiClassifier final : public PiiClassifier {
public:
    PiiSignal classify(std::string_view text) const override;
};

// Keyword-dictionary voting over a fixed domain set.
class StubDomainClassifier final : public DomainClassifier {
public:
    DomainSignal classify(std::string_view text) const override;
    static const std::vector<std::string>& domains();
};

struct ClassifierSet {
    std::shared_ptr<const JailbreakClassifier> jailbreak;
    std::shared_ptr<const PiiClassifier> pii;
    std::shared_ptr<const DomainClassifier> domain;

    static ClassifierSet stubs(double jailbreak_threshold = 0.5);
};

// True when `digits` (13..19 chars) passes the Luhn checksum.
bool luhn_valid(std::string_view digits);

}  // namespace routefast
