#pragma once

#include <cstdio>
#include <string>

namespace projlab {

// A real value or +infinity, kept as an explicit marker rather than a
// floating overflow. Serialized as the literal "inf".
struct ExtendedReal {
    bool finite = true;
    double value = 0.0;

    static ExtendedReal of(double v) { return ExtendedReal{true, v}; }
    static ExtendedReal infinity() { return ExtendedReal{false, 0.0}; }

    std::string str() const {
        if (!finite) return "inf";
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", value);
        return buf;
    }
};

}  // namespace projlab
