#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

// Minimal ordered JSON writer. Doubles are emitted with %.17g so every value
// round-trips exactly and identical runs serialize byte-identically.
class JsonW {
public:
    void begin_obj() {
        comma();
        raw_open('{');
    }
    void begin_obj(const char* k) {
        key(k);
        raw_open('{');
    }
    void begin_arr() {
        comma();
        raw_open('[');
    }
    void begin_arr(const char* k) {
        key(k);
        raw_open('[');
    }
    void end_obj() {
        s_ += '}';
        first_.pop_back();
    }
    void end_arr() {
        s_ += ']';
        first_.pop_back();
    }

    void str(const char* k, const std::string& v) {
        key(k);
        append_escaped(v);
    }
    void num(const char* k, double v) {
        key(k);
        append_double(v);
    }
    void integer(const char* k, long long v) {
        key(k);
        s_ += std::to_string(v);
    }
    void uinteger(const char* k, std::uint64_t v) {
        key(k);
        s_ += std::to_string(v);
    }
    void boolean(const char* k, bool v) {
        key(k);
        s_ += v ? "true" : "false";
    }
    void arr_num(double v) {
        comma();
        append_double(v);
    }
    void arr_str(const std::string& v) {
        comma();
        append_escaped(v);
    }

    std::string take() {
        s_ += '\n';
        return std::move(s_);
    }

private:
    std::string s_;
    std::vector<bool> first_;

    void comma() {
        if (!first_.empty()) {
            if (!first_.back()) s_ += ',';
            first_.back() = false;
        }
    }
    void raw_open(char c) {
        s_ += c;
        first_.push_back(true);
    }
    void key(const char* k) {
        comma();
        append_escaped(k);
        s_ += ':';
    }
    void append_escaped(const std::string& v) {
        s_ += '"';
        for (char c : v) {
            switch (c) {
                case '"': s_ += "\\\""; break;
                case '\\': s_ += "\\\\"; break;
                case '\n': s_ += "\\n"; break;
                case '\r': s_ += "\\r"; break;
                case '\t': s_ += "\\t"; break;
                default:
                    if (static_cast<unsigned char>(c) < 0x20) {
                        char buf[8];
                        std::snprintf(buf, sizeof buf, "\\u%04x", c);
                        s_ += buf;
                    } else {
                        s_ += c;
                    }
            }
        }
        s_ += '"';
    }
    void append_double(double v) {
        if (!std::isfinite(v)) {
            s_ += "null";
            return;
        }
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.17g", v);
        s_ += buf;
    }
};
