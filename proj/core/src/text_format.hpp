#pragma once

#include <charconv>
#include <cmath>
#include <string>
#include <system_error>

namespace aeos::detail {

// Shortest round-trip decimal form, locale-independent; NaN becomes an empty
// field so CSV readers see a missing value.
inline void append_double(std::string& out, double value) {
    if (std::isnan(value)) return;
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), value);
    out.append(buf, res.ptr);
}

inline std::string format_double(double value) {
    std::string s;
    append_double(s, value);
    return s;
}

} // namespace aeos::detail
