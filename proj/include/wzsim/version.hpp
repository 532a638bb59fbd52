#pragma once

namespace wzsim {

inline constexpr const char* kVersion = "wzsim 0.1.0";

} // namespace wzsim
