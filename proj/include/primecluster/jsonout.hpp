#pragma once

#include <cinttypes>
#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include "primecluster/rational.hpp"

namespace pcl {

// Minimal JSON writer with deterministic number formatting: reals are printed
// with 17 significant digits so a reader recovers the exact double. Nesting
// correctness is the caller's responsibility.
class JsonWriter {
public:
    static std::string number(double v) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        return buf;
    }

    static std::string quote(const std::string& s) {
        std::string out = "\"";
        for (char c : s) {
            switch (c) {
                case '"': out += "\\\""; break;
                case '\\': out += "\\\\"; break;
                case '\n': out += "\\n"; break;
                case '\t': out += "\\t"; break;
                case '\r': out += "\\r"; break;
                default:
                    if (static_cast<unsigned char>(c) < 0x20) {
                        char buf[8];
                        std::snprintf(buf, sizeof(buf), "\\u%04x", c);
                        out += buf;
                    } else {
                        out += c;
                    }
            }
        }
        out += '"';
        return out;
    }

    JsonWriter& begin_object() {
        maybe_comma();
        out_ += '{';
        needs_comma_ = false;
        return *this;
    }
    JsonWriter& end_object() {
        out_ += '}';
        needs_comma_ = true;
        return *this;
    }
    JsonWriter& begin_array() {
        maybe_comma();
        out_ += '[';
        needs_comma_ = false;
        return *this;
    }
    JsonWriter& end_array() {
        out_ += ']';
        needs_comma_ = true;
        return *this;
    }

    JsonWriter& key(const std::string& k) {
        maybe_comma();
        out_ += quote(k);
        out_ += ':';
        needs_comma_ = false;
        return *this;
    }

    JsonWriter& value(double v) { return raw(number(v)); }
    JsonWriter& value(std::uint64_t v) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%" PRIu64, v);
        return raw(buf);
    }
    JsonWriter& value(std::int64_t v) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%" PRId64, v);
        return raw(buf);
    }
    JsonWriter& value(int v) { return value(static_cast<std::int64_t>(v)); }
    JsonWriter& value(unsigned v) { return value(static_cast<std::uint64_t>(v)); }
    JsonWriter& value(bool v) { return raw(v ? "true" : "false"); }
    JsonWriter& value(const std::string& v) { return raw(quote(v)); }
    JsonWriter& value(const char* v) { return raw(quote(v)); }
    JsonWriter& value(uint128 v) { return raw(quote(to_string(v))); }
    JsonWriter& null() { return raw("null"); }

    // Appends a pre-rendered JSON token (object, array or scalar).
    JsonWriter& raw_token(const std::string& tok) { return raw(tok); }

    const std::string& str() const { return out_; }

private:
    JsonWriter& raw(const std::string& tok) {
        maybe_comma();
        out_ += tok;
        needs_comma_ = true;
        return *this;
    }

    void maybe_comma() {
        if (needs_comma_) out_ += ',';
        needs_comma_ = false;
    }

    std::string out_;
    bool needs_comma_ = false;
};

// One CSV row; fields are joined with commas, LF line endings. Fields are
// expected not to contain commas or newlines (numeric payloads).
inline std::string csv_row(const std::vector<std::string>& fields) {
    std::string out;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out += ',';
        out += fields[i];
    }
    out += '\n';
    return out;
}

} // namespace pcl
