#pragma once

namespace pseudospec {

inline constexpr const char* kToolName = "pseudospec";
inline constexpr const char* kVersion = "0.1.0";

}  // namespace pseudospec
