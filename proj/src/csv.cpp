#include "repayrisk/csv.hpp"

#include <cstdio>

namespace repayrisk::csv {

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string fmt6(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

std::string version_header(const std::string& command) {
    return "# repay-risk v" + std::string(kVersion) + " " + command + "\n";
}

}  // namespace repayrisk::csv
