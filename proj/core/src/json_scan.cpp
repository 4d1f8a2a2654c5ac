// Copyright 2026 The RouteFast Authors
// SPDX-License-Identifier: Apache-2.0

#include "routefast/json_scan.hpp"

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <cstring>

namespace routefast {

namespace {

enum class Scan { ok, incomplete, malformed };

constexpr int kMaxDepth = 256;

bool is_ws(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; }
bool is_hex(char c) {
    return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f') || (c >= 'A' && c <= 'F');
}
bool is_digit(char c) { return c >= '0' && c <= '9'; }

// Byte-level scanner shared by the complete-body extractors and the
// prefix-tolerant model detector. `complete` distinguishes "ran off the end
// of a full document" (malformed) from "need more bytes" (incomplete).
struct Scanner {
    std::string_view s;
    std::size_t pos = 0;
    bool complete = true;

    bool eof() const { return pos >= s.size(); }
    char peek() const { return s[pos]; }

    Scan skip_ws() {
        while (!eof() && is_ws(s[pos])) ++pos;
        return eof() ? Scan::incomplete : Scan::ok;
    }

    // pos at the opening quote; on ok, pos is one past the closing quote
    Scan scan_string() {
        ++pos;  // opening quote
        while (true) {
            if (eof()) return Scan::incomplete;
            unsigned char c = static_cast<unsigned char>(s[pos]);
            if (c == '"') {
                ++pos;
                return Scan::ok;
            }
            if (c < 0x20) return Scan::malformed;
            if (c == '\\') {
                if (pos + 1 >= s.size()) return Scan::incomplete;
                char e = s[pos + 1];
                switch (e) {
                    case '"':
                    case '\\':
                    case '/':
                    case 'b':
                    case 'f':
                    case 'n':
                    case 'r':
                    case 't':
                        pos += 2;
                        break;
                    case 'u': {
                        if (pos + 6 > s.size()) {
                            for (std::size_t i = pos + 2; i < s.size(); ++i) {
                                if (!is_hex(s[i])) return Scan::malformed;
                            }
                            return Scan::incomplete;
                        }
                        for (std::size_t i = pos + 2; i < pos + 6; ++i) {
                            if (!is_hex(s[i])) return Scan::malformed;
                        }
                        pos += 6;
                        break;
                    }
                    default:
                        return Scan::malformed;
                }
            } else {
                ++pos;
            }
        }
    }

    Scan scan_number() {
        if (s[pos] == '-') ++pos;
        std::size_t digits = 0;
        while (!eof() && is_digit(s[pos])) {
            ++pos;
            ++digits;
        }
        if (digits == 0) return eof() && !complete ? Scan::incomplete : Scan::malformed;
        if (!eof() && s[pos] == '.') {
            ++pos;
            std::size_t frac = 0;
            while (!eof() && is_digit(s[pos])) {
                ++pos;
                ++frac;
            }
            if (frac == 0) return eof() && !complete ? Scan::incomplete : Scan::malformed;
        }
        if (!eof() && (s[pos] == 'e' || s[pos] == 'E')) {
            ++pos;
            if (!eof() && (s[pos] == '+' || s[pos] == '-')) ++pos;
            std::size_t exp = 0;
            while (!eof() && is_digit(s[pos])) {
                ++pos;
                ++exp;
            }
            if (exp == 0) return eof() && !complete ? Scan::incomplete : Scan::malformed;
        }
        // a number at the very end of a prefix may still be growing
        if (eof() && !complete) return Scan::incomplete;
        return Scan::ok;
    }

    Scan scan_literal(std::string_view word) {
        std::size_t avail = std::min(word.size(), s.size() - pos);
        if (s.compare(pos, avail, word, 0, avail) != 0) return Scan::malformed;
        if (avail < word.size()) return Scan::incomplete;
        pos += word.size();
        return Scan::ok;
    }

    // pos at a value start; on ok, pos is one past the value
    Scan scan_value(int depth = 0) {
        if (depth > kMaxDepth) return Scan::malformed;
        if (eof()) return Scan::incomplete;
        char c = s[pos];
        if (c == '"') return scan_string();
        if (c == '{') return scan_container('}', depth);
        if (c == '[') return scan_container(']', depth);
        if (c == 't') return scan_literal("true");
        if (c == 'f') return scan_literal("false");
        if (c == 'n') return scan_literal("null");
        if (c == '-' || is_digit(c)) return scan_number();
        return Scan::malformed;
    }

    Scan scan_container(char close, int depth) {
        const bool object = close == '}';
        ++pos;  // opening brace/bracket
        if (skip_ws() != Scan::ok) return Scan::incomplete;
        if (peek() == close) {
            ++pos;
            return Scan::ok;
        }
        while (true) {
            if (object) {
                if (peek() != '"') return Scan::malformed;
                if (Scan st = scan_string(); st != Scan::ok) return st;
                if (skip_ws() != Scan::ok) return Scan::incomplete;
                if (peek() != ':') return Scan::malformed;
                ++pos;
                if (skip_ws() != Scan::ok) return Scan::incomplete;
            }
            if (Scan st = scan_value(depth + 1); st != Scan::ok) return st;
            if (skip_ws() != Scan::ok) return Scan::incomplete;
            char c = peek();
            if (c == close) {
                ++pos;
                return Scan::ok;
            }
            if (c != ',') return Scan::malformed;
            ++pos;
            if (skip_ws() != Scan::ok) return Scan::incomplete;
        }
    }
};

void append_utf8(std::string& out, char32_t cp) {
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

uint32_t parse_hex4(std::string_view s) {
    uint32_t v = 0;
    for (char c : s) {
        v <<= 4;
        if (c >= '0' && c <= '9') v |= static_cast<uint32_t>(c - '0');
        else if (c >= 'a' && c <= 'f') v |= static_cast<uint32_t>(c - 'a' + 10);
        else v |= static_cast<uint32_t>(c - 'A' + 10);
    }
    return v;
}

// `span` includes the surrounding quotes and was validated by scan_string.
std::string unescape_string(std::string_view span) {
    std::string out;
    out.reserve(span.size());
    std::size_t i = 1;                    // skip opening quote
    std::size_t end = span.size() - 1;    // closing quote
    while (i < end) {
        char c = span[i];
        if (c != '\\') {
            out.push_back(c);
            ++i;
            continue;
        }
        char e = span[i + 1];
        switch (e) {
            case '"': out.push_back('"'); i += 2; break;
            case '\\': out.push_back('\\'); i += 2; break;
            case '/': out.push_back('/'); i += 2; break;
            case 'b': out.push_back('\b'); i += 2; break;
            case 'f': out.push_back('\f'); i += 2; break;
            case 'n': out.push_back('\n'); i += 2; break;
            case 'r': out.push_back('\r'); i += 2; break;
            case 't': out.push_back('\t'); i += 2; break;
            case 'u': {
                uint32_t cp = parse_hex4(span.substr(i + 2, 4));
                i += 6;
                if (cp >= 0xD800 && cp <= 0xDBFF) {
                    if (i + 6 <= end && span[i] == '\\' && span[i + 1] == 'u') {
                        uint32_t lo = parse_hex4(span.substr(i + 2, 4));
                        if (lo >= 0xDC00 && lo <= 0xDFFF) {
                            cp = 0x10000 + ((cp - 0xD800) << 10) + (lo - 0xDC00);
                            i += 6;
                        } else {
                            throw MalformedJson("unpaired surrogate escape");
                        }
                    } else {
                        throw MalformedJson("unpaired surrogate escape");
                    }
                } else if (cp >= 0xDC00 && cp <= 0xDFFF) {
                    throw MalformedJson("unpaired surrogate escape");
                }
                append_utf8(out, cp);
                break;
            }
            default:
                throw MalformedJson("invalid escape");
        }
    }
    return out;
}

[[noreturn]] void fail(Scan st) {
    throw MalformedJson(st == Scan::incomplete ? "truncated JSON" : "malformed JSON");
}

void expect_ok(Scan st) {
    if (st != Scan::ok) fail(st);
}

// Positioned at an object's '{'. Advances to the start of the value of the
// first member named `key`; returns false (scanner past the object) when the
// key is absent. Throws on structural failure.
bool seek_member(Scanner& sc, std::string_view key) {
    ++sc.pos;  // '{'
    expect_ok(sc.skip_ws());
    if (sc.peek() == '}') {
        ++sc.pos;
        return false;
    }
    while (true) {
        if (sc.peek() != '"') throw MalformedJson("expected object key");
        std::size_t key_begin = sc.pos;
        expect_ok(sc.scan_string());
        std::string member = unescape_string(sc.s.substr(key_begin, sc.pos - key_begin));
        expect_ok(sc.skip_ws());
        if (sc.peek() != ':') throw MalformedJson("expected ':'");
        ++sc.pos;
        expect_ok(sc.skip_ws());
        if (member == key) return true;
        expect_ok(sc.scan_value());
        expect_ok(sc.skip_ws());
        if (sc.peek() == '}') {
            ++sc.pos;
            return false;
        }
        if (sc.peek() != ',') throw MalformedJson("expected ','");
        ++sc.pos;
        expect_ok(sc.skip_ws());
    }
}

// Positioned at an array's '['. Advances to the start of element `index`;
// returns false when the array is shorter.
bool seek_element(Scanner& sc, std::size_t index) {
    ++sc.pos;  // '['
    expect_ok(sc.skip_ws());
    if (sc.peek() == ']') {
        ++sc.pos;
        return false;
    }
    std::size_t i = 0;
    while (true) {
        if (i == index) return true;
        expect_ok(sc.scan_value());
        expect_ok(sc.skip_ws());
        if (sc.peek() == ']') {
            ++sc.pos;
            return false;
        }
        if (sc.peek() != ',') throw MalformedJson("expected ','");
        ++sc.pos;
        expect_ok(sc.skip_ws());
        ++i;
    }
}

JsonValue materialize(Scanner& sc) {
    std::size_t begin = sc.pos;
    char c = sc.peek();
    JsonValue v;
    if (c == '"') {
        expect_ok(sc.scan_string());
        v.kind = JsonValue::Kind::string;
        v.str = unescape_string(sc.s.substr(begin, sc.pos - begin));
    } else if (c == 't' || c == 'f') {
        expect_ok(sc.scan_value());
        v.kind = JsonValue::Kind::boolean;
        v.boolean = c == 't';
    } else if (c == '-' || is_digit(c)) {
        expect_ok(sc.scan_value());
        v.kind = JsonValue::Kind::number;
        std::string tmp(sc.s.substr(begin, sc.pos - begin));
        v.num = std::strtod(tmp.c_str(), nullptr);
        v.raw = sc.s.substr(begin, sc.pos - begin);
    } else {
        expect_ok(sc.scan_value());
        v.kind = JsonValue::Kind::raw;
        v.raw = sc.s.substr(begin, sc.pos - begin);
    }
    return v;
}

bool is_null_at(const Scanner& sc) { return !sc.eof() && sc.peek() == 'n'; }

// Descends `segments[seg..]` from the current value position. Returns the
// value or nullopt when some step is missing.
std::optional<JsonValue> descend(Scanner& sc, const FieldQuery& q, std::size_t seg) {
    for (std::size_t k = seg; k < q.segments.size(); ++k) {
        const auto& segment = q.segments[k];
        if (sc.eof()) throw MalformedJson("truncated JSON");
        if (segment.kind == FieldQuery::Segment::Kind::key) {
            if (sc.peek() != '{') return std::nullopt;
            if (!seek_member(sc, segment.name)) return std::nullopt;
        } else {
            if (sc.peek() != '[') return std::nullopt;
            if (!seek_element(sc, segment.index)) return std::nullopt;
        }
    }
    if (is_null_at(sc)) return std::nullopt;
    return materialize(sc);
}

}  // namespace

FieldQuery FieldQuery::parse(std::string_view path) {
    FieldQuery q;
    if (path.empty()) throw std::invalid_argument("empty field path");
    std::size_t start = 0;
    bool saw_wildcard = false;
    while (start <= path.size()) {
        std::size_t dot = path.find('.', start);
        std::string_view part =
            dot == std::string_view::npos ? path.substr(start) : path.substr(start, dot - start);
        if (part.empty()) throw std::invalid_argument("empty path segment");
        Segment seg;
        if (part == "#") {
            if (saw_wildcard) throw std::invalid_argument("at most one '#' wildcard");
            saw_wildcard = true;
            seg.kind = Segment::Kind::wildcard;
        } else if (std::all_of(part.begin(), part.end(), [](char c) { return is_digit(c); })) {
            seg.kind = Segment::Kind::index;
            seg.index = static_cast<std::size_t>(std::strtoull(std::string(part).c_str(), nullptr, 10));
        } else {
            seg.kind = Segment::Kind::key;
            seg.name = std::string(part);
        }
        q.segments.push_back(std::move(seg));
        if (dot == std::string_view::npos) break;
        start = dot + 1;
    }
    return q;
}

std::optional<JsonValue> extract_field(std::string_view body, const FieldQuery& query) {
    for (const auto& seg : query.segments) {
        if (seg.kind == FieldQuery::Segment::Kind::wildcard) {
            throw std::invalid_argument("extract_field cannot take a '#' wildcard");
        }
    }
    Scanner sc{body};
    expect_ok(sc.skip_ws());
    return descend(sc, query, 0);
}

std::optional<JsonValue> extract_field(std::string_view body, std::string_view path) {
    return extract_field(body, FieldQuery::parse(path));
}

std::vector<JsonValue> extract_all(std::string_view body, const FieldQuery& query) {
    std::size_t wc = query.segments.size();
    for (std::size_t i = 0; i < query.segments.size(); ++i) {
        if (query.segments[i].kind == FieldQuery::Segment::Kind::wildcard) wc = i;
    }
    if (wc == query.segments.size()) {
        std::vector<JsonValue> out;
        if (auto v = extract_field(body, query)) out.push_back(std::move(*v));
        return out;
    }

    Scanner sc{body};
    expect_ok(sc.skip_ws());
    // navigate to the wildcard array
    for (std::size_t k = 0; k < wc; ++k) {
        const auto& segment = query.segments[k];
        if (segment.kind == FieldQuery::Segment::Kind::key) {
            if (sc.eof() || sc.peek() != '{') return {};
            if (!seek_member(sc, segment.name)) return {};
        } else {
            if (sc.eof() || sc.peek() != '[') return {};
            if (!seek_element(sc, segment.index)) return {};
        }
    }
    if (sc.eof() || sc.peek() != '[') return {};

    std::vector<JsonValue> out;
    ++sc.pos;  // '['
    expect_ok(sc.skip_ws());
    if (sc.peek() == ']') return out;
    while (true) {
        std::size_t elem_begin = sc.pos;
        expect_ok(sc.scan_value());
        std::size_t elem_end = sc.pos;
        Scanner elem{body.substr(elem_begin, elem_end - elem_begin)};
        expect_ok(elem.skip_ws());
        if (auto v = descend(elem, query, wc + 1)) out.push_back(std::move(*v));
        expect_ok(sc.skip_ws());
        if (sc.peek() == ']') break;
        if (sc.peek() != ',') throw MalformedJson("expected ','");
        ++sc.pos;
        expect_ok(sc.skip_ws());
    }
    return out;
}

std::vector<JsonValue> extract_all(std::string_view body, std::string_view path) {
    return extract_all(body, FieldQuery::parse(path));
}

std::string escape_json_string(std::string_view raw) {
    std::string out;
    out.reserve(raw.size() + 2);
    for (unsigned char c : raw) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\b': out += "\\b"; break;
            case '\f': out += "\\f"; break;
            case '\n': out += "\\n"; break;
            case '\r': out += "\\r"; break;
            case '\t': out += "\\t"; break;
            default:
                if (c < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof buf, "\\u%04x", c);
                    out += buf;
                } else {
                    out.push_back(static_cast<char>(c));
                }
        }
    }
    return out;
}

std::string rewrite_model(std::string_view body, std::string_view new_model) {
    // Validate the whole body once; remember the top-level model value span.
    Scanner whole{body};
    expect_ok(whole.skip_ws());
    if (whole.eof() || whole.peek() != '{') throw MalformedJson("body is not a JSON object");
    std::size_t root_begin = whole.pos;
    expect_ok(whole.scan_value());
    while (!whole.eof()) {
        if (!is_ws(whole.peek())) throw MalformedJson("trailing bytes after JSON value");
        ++whole.pos;
    }

    Scanner sc{body, root_begin};
    if (!seek_member(sc, "model")) throw ModelFieldMissing("no top-level \"model\" field");
    if (sc.eof() || sc.peek() != '"') {
        throw ModelFieldMissing("top-level \"model\" is not a string");
    }
    std::size_t value_begin = sc.pos;
    expect_ok(sc.scan_string());
    std::size_t value_end = sc.pos;

    std::string out;
    out.reserve(body.size() + new_model.size());
    out.append(body.substr(0, value_begin));
    out.push_back('"');
    out += escape_json_string(new_model);
    out.push_back('"');
    out.append(body.substr(value_end));
    return out;
}

DetectResult detect_model_in_prefix(std::string_view prefix) {
    Scanner sc{prefix, 0, /*complete=*/false};
    if (sc.skip_ws() != Scan::ok) return {DetectKind::unknown, {}};
    if (sc.peek() != '{') return {DetectKind::not_json, {}};
    ++sc.pos;

    if (sc.skip_ws() != Scan::ok) return {DetectKind::unknown, {}};
    if (sc.peek() == '}') return {DetectKind::auto_route, {}};  // no model field at all

    while (true) {
        if (sc.peek() != '"') return {DetectKind::not_json, {}};
        std::size_t key_begin = sc.pos;
        switch (sc.scan_string()) {
            case Scan::ok: break;
            case Scan::incomplete: return {DetectKind::unknown, {}};
            case Scan::malformed: return {DetectKind::not_json, {}};
        }
        std::string key;
        try {
            key = unescape_string(sc.s.substr(key_begin, sc.pos - key_begin));
        } catch (const MalformedJson&) {
            return {DetectKind::not_json, {}};
        }
        if (sc.skip_ws() != Scan::ok) return {DetectKind::unknown, {}};
        if (sc.peek() != ':') return {DetectKind::not_json, {}};
        ++sc.pos;
        if (sc.skip_ws() != Scan::ok) return {DetectKind::unknown, {}};

        if (key == "model") {
            if (sc.peek() != '"') {
                // null / number / object: not a usable model name, so the
                // request needs classification either way
                return {DetectKind::auto_route, {}};
            }
            std::size_t value_begin = sc.pos;
            switch (sc.scan_string()) {
                case Scan::ok: break;
                case Scan::incomplete: return {DetectKind::unknown, {}};
                case Scan::malformed: return {DetectKind::not_json, {}};
            }
            std::string model;
            try {
                model = unescape_string(sc.s.substr(value_begin, sc.pos - value_begin));
            } catch (const MalformedJson&) {
                return {DetectKind::not_json, {}};
            }
            if (model.empty() || model == "auto") return {DetectKind::auto_route, {}};
            return {DetectKind::specified, std::move(model)};
        }

        switch (sc.scan_value()) {
            case Scan::ok: break;
            case Scan::incomplete: return {DetectKind::unknown, {}};
            case Scan::malformed: return {DetectKind::not_json, {}};
        }
        if (sc.skip_ws() != Scan::ok) return {DetectKind::unknown, {}};
        char c = sc.peek();
        if (c == '}') return {DetectKind::auto_route, {}};  // complete body, no model
        if (c != ',') return {DetectKind::not_json, {}};
        ++sc.pos;
        if (sc.skip_ws() != Scan::ok) return {DetectKind::unknown, {}};
    }
}

std::optional<std::string> extract_chat_contents(std::string_view body) {
    auto values = extract_all(body, "messages.#.content");
    std::string joined;
    bool any = false;
    for (const auto& v : values) {
        if (v.kind != JsonValue::Kind::string) continue;
        if (any) joined.push_back('\n');
        joined += v.str;
        any = true;
    }
    if (!any) return std::nullopt;
    return joined;
}

}  // namespace routefast
