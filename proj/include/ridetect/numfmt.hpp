#pragma once

#include <charconv>
#include <string>
#include <string_view>

namespace ridetect {

/// Shortest decimal string that round-trips the double exactly. Used for every
/// CSV number so output bytes do not depend on locale or printf quirks.
inline std::string format_double(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

/// Strict full-token double parse; returns false on trailing junk or empty input.
inline bool parse_double(std::string_view token, double& out) {
    const char* first = token.data();
    const char* last = token.data() + token.size();
    const auto res = std::from_chars(first, last, out);
    return res.ec == std::errc{} && res.ptr == last;
}

/// Strict full-token integer parse.
inline bool parse_int(std::string_view token, int& out) {
    const char* first = token.data();
    const char* last = token.data() + token.size();
    const auto res = std::from_chars(first, last, out);
    return res.ec == std::errc{} && res.ptr == last;
}

}  // namespace ridetect
