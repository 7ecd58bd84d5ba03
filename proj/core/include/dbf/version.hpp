#pragma once

#include <string_view>

namespace dbf {

inline constexpr std::string_view kToolName = "dbf";
inline constexpr std::string_view kToolVersion = "0.1.0";

}  // namespace dbf
