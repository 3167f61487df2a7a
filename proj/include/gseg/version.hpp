#pragma once

namespace gseg {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace gseg
