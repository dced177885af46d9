#pragma once

#include <cmath>
#include <cstdio>
#include <string>

namespace dualmode::detail {

/// Prints a double with 12 significant digits, trailing zeros trimmed by %g.
/// Every number the library emits (CSV, JSON, certificates) goes through
/// here so identical values always serialize to identical bytes.
inline std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", x);
    return buf;
}

}  // namespace dualmode::detail
