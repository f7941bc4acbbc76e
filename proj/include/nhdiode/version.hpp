#pragma once

namespace nhdiode {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace nhdiode
