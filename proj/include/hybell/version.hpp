#pragma once

namespace hybell {

inline constexpr const char* kVersion = "0.1.0";

} // namespace hybell
