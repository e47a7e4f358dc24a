#pragma once

namespace nlad {
inline constexpr const char* kToolName = "nlad";
inline constexpr const char* kToolVersion = "0.1.0";
} // namespace nlad
