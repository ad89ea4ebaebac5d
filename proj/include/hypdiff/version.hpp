#pragma once

namespace hypdiff {

inline constexpr const char* kVersion = "0.1.0";

} // namespace hypdiff
