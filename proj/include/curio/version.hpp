#pragma once

namespace curio {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace curio
