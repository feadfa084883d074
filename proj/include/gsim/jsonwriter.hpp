#pragma once

#include <cstdio>
#include <type_traits>
#include <string>

namespace gsim {

// Minimal append-only JSON writer with a stable byte representation:
// fields appear in insertion order and doubles are formatted with %.17g,
// which round-trips IEEE doubles exactly. Used wherever serialized output
// must be byte-reproducible (telemetry lines, bundle metadata, reports).
class JsonWriter {
public:
    JsonWriter() { buf_.reserve(256); }

    void begin_object() { open('{'); }
    void end_object() { close('}'); }
    void begin_array() { open('['); }
    void end_array() { close(']'); }

    void key(const std::string& name) {
        comma();
        append_string(name);
        buf_ += ':';
        just_keyed_ = true;
    }

    void value(double v) {
        comma();
        char tmp[32];
        std::snprintf(tmp, sizeof(tmp), "%.17g", v);
        buf_ += tmp;
    }
    template <typename T>
        requires(std::is_integral_v<T> && !std::is_same_v<T, bool>)
    void value(T v) {
        comma();
        buf_ += std::to_string(v);
    }
    void value(bool v) {
        comma();
        buf_ += v ? "true" : "false";
    }
    void value(const std::string& v) {
        comma();
        append_string(v);
    }
    void value(const char* v) { value(std::string(v)); }

    template <typename T>
    void field(const std::string& name, const T& v) {
        key(name);
        value(v);
    }

    const std::string& str() const { return buf_; }

private:
    void open(char c) {
        comma();
        buf_ += c;
        fresh_ = true;
    }
    void close(char c) {
        buf_ += c;
        fresh_ = false;
    }
    void comma() {
        if (just_keyed_) {
            just_keyed_ = false;
            return;
        }
        if (!fresh_ && !buf_.empty()) buf_ += ',';
        fresh_ = false;
    }
    void append_string(const std::string& s) {
        buf_ += '"';
        for (char c : s) {
            switch (c) {
                case '"': buf_ += "\\\""; break;
                case '\\': buf_ += "\\\\"; break;
                case '\n': buf_ += "\\n"; break;
                case '\r': buf_ += "\\r"; break;
                case '\t': buf_ += "\\t"; break;
                default:
                    if (static_cast<unsigned char>(c) < 0x20) {
                        char tmp[8];
                        std::snprintf(tmp, sizeof(tmp), "\\u%04x", c);
                        buf_ += tmp;
                    } else {
                        buf_ += c;
                    }
            }
        }
        buf_ += '"';
    }

    std::string buf_;
    bool fresh_ = true;
    bool just_keyed_ = false;
};

}  // namespace gsim
