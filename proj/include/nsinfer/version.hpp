#pragma once

namespace nsinfer {

inline constexpr const char* kSoftwareName = "nsinfer";
inline constexpr const char* kSoftwareVersion = "0.1.0";

}  // namespace nsinfer
