#pragma once

namespace autoreson {

inline constexpr const char* kToolName = "autoreson";
inline constexpr const char* kVersion = "1.0.0";

} // namespace autoreson
