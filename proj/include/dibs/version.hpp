#pragma once

namespace dibs {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace dibs
