#pragma once

namespace bnsim {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace bnsim
