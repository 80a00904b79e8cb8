#pragma once

#include <charconv>
#include <cstdio>
#include <string>

namespace patrec {

/// %.17g rendering, enough digits to reproduce any double exactly.
inline std::string format_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

/// Shortest decimal form that round-trips to the same double ("0.5", "2").
inline std::string format_shortest(double v) {
    char buf[40];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

}  // namespace patrec
