#pragma once

namespace reachcloud {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace reachcloud
