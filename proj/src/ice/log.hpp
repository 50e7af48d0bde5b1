#pragma once

#include <cstdio>
#include <string>

namespace ice {

inline void log_info(const std::string& message) {
    std::fprintf(stderr, "[ice] %s\n", message.c_str());
}

inline void log_warn(const std::string& message) {
    std::fprintf(stderr, "[ice][warn] %s\n", message.c_str());
}

}  // namespace ice
