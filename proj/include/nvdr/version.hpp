#pragma once

namespace nvdr {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace nvdr
