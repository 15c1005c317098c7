#pragma once

#include <cstdio>
#include <string>

namespace slnorm::detail {

// Round-trip-safe decimal form of a double (17 significant digits).  Used
// everywhere a float is turned into text so that reports are reproducible
// byte for byte.
inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace slnorm::detail
