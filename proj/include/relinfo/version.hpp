#pragma once

namespace relinfo {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace relinfo
