#pragma once

// Minimal JSON text emission for flat records. Numbers use the shortest
// round-trip decimal form, so 1.0 prints as `1` and 1/e as `0.36787944117144233`.

#include <charconv>
#include <cmath>
#include <string>
#include <string_view>

namespace abstop::json {

[[nodiscard]] inline std::string number(double value) {
    if (!std::isfinite(value)) {
        return "null";
    }
    char buf[32];
    const auto result = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, result.ptr);
}

[[nodiscard]] inline std::string string(std::string_view text) {
    std::string out = "\"";
    for (const char c : text) {
        switch (c) {
        case '"': out += "\\\""; break;
        case '\\': out += "\\\\"; break;
        case '\n': out += "\\n"; break;
        case '\t': out += "\\t"; break;
        default:
            if (static_cast<unsigned char>(c) < 0x20) {
                out += ' ';
            } else {
                out += c;
            }
        }
    }
    out += '"';
    return out;
}

} // namespace abstop::json
