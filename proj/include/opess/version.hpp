#pragma once

namespace opess {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace opess
