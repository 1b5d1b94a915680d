#pragma once

namespace chaospec {

inline constexpr const char* version = "0.1.0";

}  // namespace chaospec
