#pragma once

namespace stratvar {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace stratvar
