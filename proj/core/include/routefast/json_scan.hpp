// Copyright 2026 The RouteFast Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace routefast {

// Structural scan failed: unbalanced braces/brackets, bad escape, stray bytes.
class MalformedJson : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// rewrite_model was asked to rewrite a body without a top-level "model" string.
class ModelFieldMissing : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Dot-path with optional array index: "model", "messages.0.content",
// "messages.#.content" ('#' = every element; at most one wildcard).
struct FieldQuery {
    struct Segment {
        enum class Kind { key, index, wildcard };
        Kind kind = Kind::key;
        std::string name;
        std::size_t index = 0;
    };
    std::vector<Segment> segments;

    static FieldQuery parse(std::string_view path);  // throws std::invalid_argument
};

// Extracted value. Strings are unescaped copies of just the value; objects,
// arrays and numbers-as-raw reference the input buffer without copying.
struct JsonValue {
    enum class Kind { string, number, boolean, raw };
    Kind kind = Kind::raw;
    std::string str;
    double num = 0.0;
    bool boolean = false;
    std::string_view raw;  // valid only while the scanned body is alive
};

// Scans bytes directly; no document tree is built. `body` must be a complete
// well-formed JSON document. Missing path (or JSON null) yields nullopt.
std::optional<JsonValue> extract_field(std::string_view body, const FieldQuery& query);
std::optional<JsonValue> extract_field(std::string_view body, std::string_view path);

// Wildcard form: collects the value at the remaining path for every element
// of the '#' array. Elements where the path is missing are skipped.
std::vector<JsonValue> extract_all(std::string_view body, const FieldQuery& query);
std::vector<JsonValue> extract_all(std::string_view body, std::string_view path);

// Byte-level surgery: replaces only the quoted span of the top-level "model"
// string value (first occurrence wins). Every other byte of the body --
// whitespace, key order, escapes -- is preserved exactly.
std::string rewrite_model(std::string_view body, std::string_view new_model);

// Model detection on a body prefix of any length.
enum class DetectKind {
    specified,  // complete non-"auto" model string seen
    auto_route, // "auto", or the object completed without a usable model
    unknown,    // valid prefix, but the answer is not determined yet
    not_json,   // the prefix cannot begin a JSON object
};
struct DetectResult {
    DetectKind kind = DetectKind::unknown;
    std::string model;  // set for `specified`

    bool operator==(const DetectResult&) const = default;
};
DetectResult detect_model_in_prefix(std::string_view prefix);

// messages.#.content string values joined with '\n'; nullopt when the body
// has no messages array or no string contents at all.
std::optional<std::string> extract_chat_contents(std::string_view body);

std::string escape_json_string(std::string_view raw);

}  // namespace routefast
