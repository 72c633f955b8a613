#pragma once

#include <cstdio>
#include <string>

namespace ustat {

// 15 significant digits, the precision the CLI prints everywhere.
inline std::string format_g15(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.15g", v);
    return std::string(buf);
}

}  // namespace ustat
