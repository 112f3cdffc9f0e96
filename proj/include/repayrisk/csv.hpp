#pragma once

#include <string>

namespace repayrisk::csv {

inline constexpr const char* kVersion = "0.1.0";

// Machine-readable precision (17 significant digits).
std::string fmt17(double v);

// Human-table precision (6 significant digits, the published tables' width).
std::string fmt6(double v);

// Schema version comment: "# repay-risk v<semver> <command>".
std::string version_header(const std::string& command);

}  // namespace repayrisk::csv
