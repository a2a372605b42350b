#pragma once

#include <cstdio>
#include <ostream>
#include <string>

namespace cospm {

/// Shortest round-trippable decimal form of a double (17 significant digits).
inline std::string format_full(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace cospm
