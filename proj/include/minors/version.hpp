#pragma once

namespace minors {

inline constexpr const char* kVersion = "1.0.0";

}  // namespace minors
