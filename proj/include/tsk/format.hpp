#pragma once

#include <charconv>
#include <string>

namespace tsk {

// Shortest decimal form that round-trips to the same double.
inline std::string format_double(double v) {
    char buf[32];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return (ec == std::errc{}) ? std::string(buf, end) : std::string("nan");
}

// Fixed-point with the given number of decimals.
inline std::string format_fixed(double v, int decimals) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::fixed, decimals);
    return (ec == std::errc{}) ? std::string(buf, end) : std::string("nan");
}

}  // namespace tsk
