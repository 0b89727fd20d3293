#pragma once

namespace reg {
inline constexpr const char* kVersion = "0.1.0";
}
